//! Eigen-decompositions, quench overlaps `c_{mn}`, participation ratios and
//! the truncated entropy expansion.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, numeric, Result};
use crate::expansion::{rational_to_f64, ExpansionCoefficients, Truncation};
use crate::partition::{reduced_partitions_up_to, Partition, DEFAULT_MAX_WEIGHT};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `1 − γ`, the fully delocalized value of `ΔS`.
pub const DELOCALIZED_DELTA_S: f64 = 1.0 - EULER_GAMMA;

/// Columns with `h̄_n` below this are treated as empty.
pub const H_BAR_FLOOR: f64 = 1e-300;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (column `n` is `|n⟩`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

/// Full eigen-decomposition of a real symmetric matrix.
pub fn diagonalize(h: &DMatrix<f64>) -> Result<Spectrum> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(domain!("matrix is {}x{}, not square", n, h.ncols()));
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(domain!("matrix has non-finite entries"));
    }
    let norm = max_abs(h);
    for i in 0..n {
        for j in 0..i {
            if (h[(i, j)] - h[(j, i)]).abs() > 1e-12 * norm {
                return Err(domain!("matrix is not symmetric at ({i},{j})"));
            }
        }
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 0)
        .ok_or_else(|| numeric!("symmetric eigensolver did not converge (n = {n})"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

impl Spectrum {
    /// Assembles a spectrum from ascending eigenvalues and column eigenvectors.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: DMatrix<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(domain!("{n} eigenvalues but a {}x{} eigenvector matrix", eigenvectors.nrows(), eigenvectors.ncols()));
        }
        if eigenvalues.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(domain!("eigenvalues must be finite and ascending"));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Smallest spacing between consecutive eigenvalues (`+∞` for `N < 2`).
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn width(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `max |(VᵀV − I)_{ij}|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.eigenvectors.transpose() * &self.eigenvectors;
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - want).abs());
            }
        }
        worst
    }

    /// `max |H v_n − E_n v_n|` over all entries.
    pub fn residual(&self, h: &DMatrix<f64>) -> f64 {
        let hv = h * &self.eigenvectors;
        let mut worst = 0.0f64;
        for (n, &e) in self.eigenvalues.iter().enumerate() {
            for i in 0..self.dim() {
                worst = worst.max((hv[(i, n)] - e * self.eigenvectors[(i, n)]).abs());
            }
        }
        worst
    }
}

/// Amplitudes `⟨m|n⟩` between the eigenbasis of `H′` (rows `m`) and that of
/// `H` (columns `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct BasisOverlap {
    amplitudes: DMatrix<f64>,
}

impl BasisOverlap {
    /// Identical eigenvector matrices give the exact identity.
    pub fn new(spec: &Spectrum, spec_prime: &Spectrum) -> Result<Self> {
        if spec.dim() != spec_prime.dim() {
            return Err(domain!(
                "spectra have dimensions {} and {}",
                spec.dim(),
                spec_prime.dim()
            ));
        }
        let amplitudes = if spec.eigenvectors == spec_prime.eigenvectors {
            DMatrix::identity(spec.dim(), spec.dim())
        } else {
            spec_prime.eigenvectors.transpose() * &spec.eigenvectors
        };
        Ok(Self { amplitudes })
    }

    pub fn from_amplitudes(amplitudes: DMatrix<f64>) -> Result<Self> {
        if amplitudes.nrows() != amplitudes.ncols() {
            return Err(domain!("overlap matrix must be square"));
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.nrows()
    }

    /// `⟨m|n⟩`.
    pub fn amplitudes(&self) -> &DMatrix<f64> {
        &self.amplitudes
    }
}

/// `c_{mn} = |⟨m|n₀⟩|² |⟨m|n⟩|²` together with `h̄_n = Σ_m c_{mn}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTable {
    c: DMatrix<f64>,
    n0: usize,
    h_bar: Vec<f64>,
}

impl OverlapTable {
    pub fn new(overlap: &BasisOverlap, n0: usize) -> Result<Self> {
        let n = overlap.dim();
        if n0 >= n {
            return Err(domain!("initial index {n0} out of range for N = {n}"));
        }
        let a = &overlap.amplitudes;
        let c = DMatrix::from_fn(n, n, |m, col| {
            let x = a[(m, n0)] * a[(m, n0)];
            let y = a[(m, col)] * a[(m, col)];
            x * y
        });
        Ok(Self::from_weights_unchecked(c, n0))
    }

    /// Wraps an explicit weight matrix (rows `m`, columns `n`).
    pub fn from_weights(c: DMatrix<f64>, n0: usize) -> Result<Self> {
        if c.nrows() != c.ncols() {
            return Err(domain!("overlap table must be square"));
        }
        if n0 >= c.ncols() {
            return Err(domain!("initial index {n0} out of range"));
        }
        if c.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(domain!("overlap weights must be finite and nonnegative"));
        }
        Ok(Self::from_weights_unchecked(c, n0))
    }

    fn from_weights_unchecked(c: DMatrix<f64>, n0: usize) -> Self {
        let h_bar = (0..c.ncols()).map(|n| c.column(n).sum()).collect();
        Self { c, n0, h_bar }
    }

    pub fn dim(&self) -> usize {
        self.c.ncols()
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Mean transition probabilities `h̄_n`.
    pub fn h_bar(&self) -> &[f64] {
        &self.h_bar
    }

    /// `ξ_{q,n}` for `q = 2..=q_max` (index `q − 2`), or `None` if `h̄_n`
    /// underflows.
    pub fn participation_ratios(&self, n: usize, q_max: u32) -> Option<Vec<f64>> {
        let hb = self.h_bar[n];
        if !(hb > H_BAR_FLOOR) {
            return None;
        }
        let mut sums = vec![0.0; q_max.saturating_sub(1) as usize];
        for &c in self.c.column(n).iter() {
            let x = c / hb;
            let mut pow = x;
            for s in sums.iter_mut() {
                pow *= x;
                *s += pow;
            }
        }
        Some(sums)
    }
}

/// `ξ_{q,n} = Σ_m c_{mn}^q / (Σ_m c_{mn})^q`; `None` when column `n` is empty.
pub fn participation_ratio(table: &OverlapTable, q: u32, n: usize) -> Option<f64> {
    if q < 2 {
        return if q == 1 { Some(1.0) } else { None };
    }
    table
        .participation_ratios(n, q)
        .map(|v| v[(q - 2) as usize])
}

pub fn overlap_table(spec: &Spectrum, spec_prime: &Spectrum, n0: usize) -> Result<OverlapTable> {
    OverlapTable::new(&BasisOverlap::new(spec, spec_prime)?, n0)
}

/// Weighted averages `ξ̄_{μ′} = Σ_n h̄_n Π_i ξ_{μ′_i, n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiBarSet {
    pub values: Vec<(Partition, f64)>,
    /// Columns skipped because `h̄_n` underflowed.
    pub excluded: usize,
}

impl XiBarSet {
    pub fn get(&self, mu: &Partition) -> Option<f64> {
        self.values.iter().find(|(p, _)| p == mu).map(|&(_, v)| v)
    }

    pub fn max_weight(&self) -> u32 {
        self.values.iter().map(|(p, _)| p.weight()).max().unwrap_or(0)
    }
}

/// `ξ̄_{μ′}` for every reduced `μ′` with `2 ≤ |μ′| ≤ s_max`.
pub fn xi_bar_set(table: &OverlapTable, s_max: u32) -> Result<XiBarSet> {
    if s_max < 2 {
        return Err(domain!("s_max must be at least 2, got {s_max}"));
    }
    let partitions = reduced_partitions_up_to(s_max, DEFAULT_MAX_WEIGHT)?;
    let mut values: Vec<(Partition, f64)> = partitions.into_iter().map(|p| (p, 0.0)).collect();
    let mut excluded = 0;
    for n in 0..table.dim() {
        let Some(xi) = table.participation_ratios(n, s_max) else {
            excluded += 1;
            continue;
        };
        let hb = table.h_bar[n];
        for (mu, acc) in values.iter_mut() {
            let prod: f64 = mu.parts().iter().map(|&q| xi[(q - 2) as usize]).product();
            *acc += hb * prod;
        }
    }
    Ok(XiBarSet { values, excluded })
}

/// `1 − γ + Σ coeff(μ′) ξ̄_{μ′}` over the truncation.
pub fn order_estimate(
    xis: &XiBarSet,
    coeffs: &ExpansionCoefficients,
    trunc: Truncation,
) -> Result<f64> {
    if trunc.max_weight() > xis.max_weight() {
        return Err(domain!(
            "xi-bar values reach weight {} but {trunc:?} needs {}",
            xis.max_weight(),
            trunc.max_weight()
        ));
    }
    let mut total = DELOCALIZED_DELTA_S;
    for (mu, c) in coeffs.truncated(trunc)? {
        let xi = xis
            .get(&mu)
            .ok_or_else(|| domain!("missing xi-bar for {mu:?}"))?;
        total += rational_to_f64(&c) * xi;
    }
    Ok(total)
}

/// `(O₁, O₂, O₃)` under the bracket grouping.
pub fn bracket_orders(xis: &XiBarSet, coeffs: &ExpansionCoefficients) -> Result<[f64; 3]> {
    Ok([
        order_estimate(xis, coeffs, Truncation::Order(1))?,
        order_estimate(xis, coeffs, Truncation::Order(2))?,
        order_estimate(xis, coeffs, Truncation::Order(3))?,
    ])
}
