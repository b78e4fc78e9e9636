//! Model Hamiltonians: the truncated Dicke model in a parity block, the
//! disordered small-world ring, and a synthetic pair of random matrices.
//!
//! All randomness comes from ChaCha8 streams keyed by the run seed, so every
//! builder is a pure function of its parameters.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};

const DISORDER_STREAM: u64 = 0;
const SHORTCUT_STREAM: u64 = 1;
const SYNTHETIC_STREAM_A: u64 = 2;
const SYNTHETIC_STREAM_B: u64 = 3;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Parity sector of the Dicke model, eigenvalue of `exp(iπ(a†a + J_z + j))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            other => Err(domain!("parity must be +1 or -1, got {other}")),
        }
    }
}

/// `H(λ) = ω₀ J_z + ω a†a + λ/√(2j) (a† + a)(J₋ + J₊)` truncated to `n_t`
/// boson states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    /// `2j`, so half-integer pseudospins stay exact.
    pub two_j: u32,
    pub n_t: u32,
    pub parity: Parity,
}

impl DickeParams {
    /// Critical coupling `√(ω₀ω)/2`.
    pub fn lambda_c(&self) -> f64 {
        libm::sqrt(self.omega0 * self.omega) / 2.0
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega0 > 0.0) {
            return Err(domain!("Dicke frequencies must be positive"));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(domain!("Dicke coupling must be finite and >= 0"));
        }
        if self.two_j == 0 {
            return Err(domain!("pseudospin j must be positive"));
        }
        if self.n_t == 0 {
            return Err(domain!("boson truncation must be >= 1"));
        }
        Ok(())
    }

    /// Basis states `(n_b, j + m)` in phonon-major order, optionally
    /// restricted to the parameter's parity sector.
    pub fn basis(&self, projected: bool) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for nb in 0..self.n_t {
            for k in 0..=self.two_j {
                let even = (nb + k) % 2 == 0;
                let keep = match self.parity {
                    Parity::Even => even,
                    Parity::Odd => !even,
                };
                if !projected || keep {
                    out.push((nb, k));
                }
            }
        }
        out
    }

    fn assemble(&self, basis: &[(u32, u32)]) -> DMatrix<f64> {
        let dim = basis.len();
        let j = self.j();
        let g = self.lambda / libm::sqrt(self.two_j as f64);
        let index = |nb: u32, k: u32| -> Option<usize> {
            basis.binary_search(&(nb, k)).ok()
        };
        let mut h = DMatrix::zeros(dim, dim);
        for (a, &(nb, k)) in basis.iter().enumerate() {
            let m = k as f64 - j;
            h[(a, a)] = self.omega0 * m + self.omega * nb as f64;
            // a† J₊ and a† J₋; the a J± terms are their transposes.
            let boson = libm::sqrt(nb as f64 + 1.0);
            if k < self.two_j {
                if let Some(b) = index(nb + 1, k + 1) {
                    let v = g * boson * libm::sqrt(j * (j + 1.0) - m * (m + 1.0));
                    h[(a, b)] += v;
                    h[(b, a)] += v;
                }
            }
            if k > 0 {
                if let Some(b) = index(nb + 1, k - 1) {
                    let v = g * boson * libm::sqrt(j * (j + 1.0) - m * (m - 1.0));
                    h[(a, b)] += v;
                    h[(b, a)] += v;
                }
            }
        }
        h
    }
}

/// Dicke Hamiltonian restricted to the parity block.
pub fn build_dicke(params: &DickeParams) -> Result<DMatrix<f64>> {
    params.validate()?;
    Ok(params.assemble(&params.basis(true)))
}

/// Dicke Hamiltonian on the full truncated product space (both parities).
pub fn build_dicke_unprojected(params: &DickeParams) -> Result<DMatrix<f64>> {
    params.validate()?;
    Ok(params.assemble(&params.basis(false)))
}

/// Which levels of the parity block count as converged: below the 60th
/// percentile of the block spectrum and stable to `1e−6` when the boson
/// cutoff grows by 10%.
pub fn dicke_converged_levels(params: &DickeParams) -> Result<Vec<bool>> {
    let base = sorted_eigenvalues(build_dicke(params)?);
    let grown = DickeParams {
        n_t: params.n_t + params.n_t.div_ceil(10),
        ..*params
    };
    let bigger = sorted_eigenvalues(build_dicke(&grown)?);
    if base.is_empty() {
        return Ok(Vec::new());
    }
    let cut = base[((base.len() - 1) as f64 * 0.6) as usize];
    Ok(base
        .iter()
        .zip(bigger.iter())
        .map(|(&e, &f)| e < cut && (e - f).abs() < 1e-6)
        .collect())
}

fn sorted_eigenvalues(h: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Disordered tight-binding ring with `⌊pN⌋` shortcut links, `V = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallWorldParams {
    pub n_sites: usize,
    /// Standard deviation `W` of the Gaussian on-site energies.
    pub disorder_width: f64,
    pub shortcut_density: f64,
    pub seed: u64,
    pub shortcuts: Vec<(usize, usize)>,
}

impl SmallWorldParams {
    /// Samples the shortcut list once so that quenched copies share it.
    pub fn new(n_sites: usize, disorder_width: f64, shortcut_density: f64, seed: u64) -> Result<Self> {
        let shortcuts = sample_shortcuts(n_sites, shortcut_density, seed)?;
        let p = Self {
            n_sites,
            disorder_width,
            shortcut_density,
            seed,
            shortcuts,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 4 || !self.n_sites.is_power_of_two() {
            return Err(domain!("small-world size must be a power of two >= 4, got {}", self.n_sites));
        }
        if !(self.disorder_width >= 0.0) || !self.disorder_width.is_finite() {
            return Err(domain!("disorder width must be finite and >= 0"));
        }
        if self.shortcuts.len() != shortcut_count(self.n_sites, self.shortcut_density)? {
            return Err(domain!("shortcut list does not match floor(pN)"));
        }
        if self
            .shortcuts
            .iter()
            .any(|&(i, j)| i == j || i >= self.n_sites || j >= self.n_sites)
        {
            return Err(domain!("invalid shortcut pair"));
        }
        Ok(())
    }

    /// On-site energies `ε_i = W g_i` with `g_i` standard normal.
    pub fn onsite_energies(&self) -> Vec<f64> {
        unit_disorder(self.n_sites, self.seed)
            .into_iter()
            .map(|g| self.disorder_width * g)
            .collect()
    }
}

fn shortcut_count(n_sites: usize, p: f64) -> Result<usize> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(domain!("shortcut density must be finite and >= 0"));
    }
    let count = libm::floor(p * n_sites as f64) as usize;
    let pairs = n_sites * n_sites.saturating_sub(1) / 2;
    if count > pairs {
        return Err(domain!("{count} shortcuts exceed the {pairs} available pairs"));
    }
    Ok(count)
}

/// Standard-normal draws for the on-site energies, before scaling by `W`.
pub fn unit_disorder(n_sites: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, DISORDER_STREAM);
    (0..n_sites).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `⌊pN⌋` distinct unordered pairs `i < j`; repeated shortcuts are redrawn,
/// pairs that coincide with ring edges are kept.
pub fn sample_shortcuts(n_sites: usize, p: f64, seed: u64) -> Result<Vec<(usize, usize)>> {
    let count = shortcut_count(n_sites, p)?;
    let mut rng = rng_for(seed, SHORTCUT_STREAM);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = rng.random_range(0..n_sites);
        let j = rng.random_range(0..n_sites);
        if i == j {
            continue;
        }
        let pair = (i.min(j), i.max(j));
        if seen.insert(pair) {
            out.push(pair);
        }
    }
    Ok(out)
}

fn smallworld_with_energies(params: &SmallWorldParams, energies: &[f64]) -> DMatrix<f64> {
    let n = params.n_sites;
    let mut h = DMatrix::zeros(n, n);
    for (i, &e) in energies.iter().enumerate() {
        h[(i, i)] = e;
    }
    for i in 0..n {
        let j = (i + 1) % n;
        h[(i, j)] += 1.0;
        h[(j, i)] += 1.0;
    }
    for &(i, j) in &params.shortcuts {
        h[(i, j)] += 1.0;
        h[(j, i)] += 1.0;
    }
    h
}

pub fn build_smallworld(params: &SmallWorldParams) -> Result<DMatrix<f64>> {
    params.validate()?;
    Ok(smallworld_with_energies(params, &params.onsite_energies()))
}

/// A pair of independent GOE matrices `A`, `B` (semicircle radius 2); the
/// quenched Hamiltonian is `cos δ A + sin δ B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    pub dim: usize,
    pub seed: u64,
}

fn goe(dim: usize, seed: u64, stream: u64) -> DMatrix<f64> {
    let mut rng = rng_for(seed, stream);
    let scale = 1.0 / libm::sqrt(2.0 * dim as f64);
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            let v = (a + b) * scale;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

pub fn build_synthetic(params: &SyntheticParams) -> Result<DMatrix<f64>> {
    if params.dim == 0 {
        return Err(domain!("synthetic dimension must be positive"));
    }
    Ok(goe(params.dim, params.seed, SYNTHETIC_STREAM_A))
}

/// One of the supported model families.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Dicke(DickeParams),
    SmallWorld(SmallWorldParams),
    Synthetic(SyntheticParams),
}

impl Model {
    pub fn hamiltonian(&self) -> Result<DMatrix<f64>> {
        match self {
            Model::Dicke(p) => build_dicke(p),
            Model::SmallWorld(p) => build_smallworld(p),
            Model::Synthetic(p) => build_synthetic(p),
        }
    }
}

/// `(H, H′)` for a quench of strength `delta`:
/// Dicke `λ → λ + δ`, small-world `W → W − δ` with fixed disorder pattern and
/// shortcuts, synthetic `A → cos δ A + sin δ B`.
pub fn quench(model: &Model, delta: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !delta.is_finite() {
        return Err(domain!("quench strength must be finite"));
    }
    match model {
        Model::Dicke(p) => {
            let h = build_dicke(p)?;
            let q = DickeParams {
                lambda: p.lambda + delta,
                ..*p
            };
            Ok((h, build_dicke(&q)?))
        }
        Model::SmallWorld(p) => {
            p.validate()?;
            if delta >= p.disorder_width && delta != 0.0 {
                return Err(domain!(
                    "disorder quench {delta} must stay below W = {}",
                    p.disorder_width
                ));
            }
            let unit = unit_disorder(p.n_sites, p.seed);
            let before: Vec<f64> = unit.iter().map(|g| p.disorder_width * g).collect();
            let after: Vec<f64> = unit
                .iter()
                .map(|g| (p.disorder_width - delta) * g)
                .collect();
            Ok((
                smallworld_with_energies(p, &before),
                smallworld_with_energies(p, &after),
            ))
        }
        Model::Synthetic(p) => {
            let a = build_synthetic(p)?;
            if delta == 0.0 {
                return Ok((a.clone(), a));
            }
            let b = goe(p.dim, p.seed, SYNTHETIC_STREAM_B);
            let (s, c) = (libm::sin(delta), libm::cos(delta));
            let mixed = &a * c + &b * s;
            Ok((a, mixed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::diagonalize;

    fn dicke(lambda: f64, two_j: u32, n_t: u32, parity: Parity) -> DickeParams {
        DickeParams {
            omega: 1.0,
            omega0: 1.0,
            lambda,
            two_j,
            n_t,
            parity,
        }
    }

    fn assert_exactly_symmetric(h: &DMatrix<f64>) {
        for i in 0..h.nrows() {
            for j in 0..i {
                assert_eq!(h[(i, j)].to_bits(), h[(j, i)].to_bits());
            }
        }
    }

    #[test]
    fn critical_coupling() {
        assert_eq!(dicke(0.3, 2, 4, Parity::Even).lambda_c(), 0.5);
    }

    #[test]
    fn decoupled_dicke_spectrum() {
        let p = dicke(0.0, 4, 6, Parity::Even);
        let h = build_dicke(&p).unwrap();
        assert_eq!(h.nrows(), 15);
        let mut want: Vec<f64> = p
            .basis(true)
            .iter()
            .map(|&(nb, k)| nb as f64 + (k as f64 - 2.0))
            .collect();
        want.sort_by(f64::total_cmp);
        let s = diagonalize(&h).unwrap();
        for (a, b) in s.eigenvalues().iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_half_two_bosons_matches_unprojected() {
        // j = 1/2, N_t = 2: each parity block is 2x2.
        for parity in [Parity::Even, Parity::Odd] {
            let p = dicke(1.0, 1, 2, parity);
            let block = build_dicke(&p).unwrap();
            assert_eq!(block.nrows(), 2);
            // Even block {(0,↓),(1,↑)}: [[-1/2, λ/√1·1·1],[., 1+1/2]]
            let full = diagonalize(&build_dicke_unprojected(&p).unwrap()).unwrap();
            let part = diagonalize(&block).unwrap();
            for e in part.eigenvalues() {
                assert!(full.eigenvalues().iter().any(|f| (f - e).abs() < 1e-12));
            }
        }
        let even = build_dicke(&dicke(1.0, 1, 2, Parity::Even)).unwrap();
        let tr = even[(0, 0)] + even[(1, 1)];
        let det = even[(0, 0)] * even[(1, 1)] - even[(0, 1)] * even[(1, 0)];
        let ground = tr / 2.0 - libm::sqrt(tr * tr / 4.0 - det);
        assert!((ground - (0.5 - libm::sqrt(2.0))).abs() < 1e-12);
    }

    #[test]
    fn parity_blocks_decouple() {
        let p = dicke(0.7, 3, 5, Parity::Even);
        let full = build_dicke_unprojected(&p).unwrap();
        assert_exactly_symmetric(&full);
        let basis = p.basis(false);
        for (a, &(nb, k)) in basis.iter().enumerate() {
            for (b, &(nb2, k2)) in basis.iter().enumerate() {
                if (nb + k) % 2 != (nb2 + k2) % 2 {
                    assert_eq!(full[(a, b)], 0.0);
                }
            }
        }
        let mut both: Vec<f64> = Vec::new();
        for parity in [Parity::Even, Parity::Odd] {
            let h = build_dicke(&DickeParams { parity, ..p }).unwrap();
            assert_exactly_symmetric(&h);
            both.extend(diagonalize(&h).unwrap().eigenvalues());
        }
        both.sort_by(f64::total_cmp);
        let all = diagonalize(&full).unwrap();
        for (a, b) in all.eigenvalues().iter().zip(both.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn low_dicke_levels_converge() {
        let p = dicke(0.4, 4, 40, Parity::Even);
        let flags = dicke_converged_levels(&p).unwrap();
        assert!(flags[..10].iter().all(|&f| f));
        assert!(!flags[flags.len() - 1]);
    }

    #[test]
    fn dicke_rejects_bad_params() {
        assert!(build_dicke(&dicke(-0.1, 2, 4, Parity::Even)).is_err());
        assert!(build_dicke(&dicke(0.1, 0, 4, Parity::Even)).is_err());
        assert!(build_dicke(&DickeParams { omega: 0.0, ..dicke(0.1, 2, 4, Parity::Even) }).is_err());
        assert!(Parity::from_sign(0).is_err());
    }

    #[test]
    fn clean_ring_spectrum() {
        let p = SmallWorldParams::new(16, 0.0, 0.0, 7).unwrap();
        let h = build_smallworld(&p).unwrap();
        let s = diagonalize(&h).unwrap();
        let mut want: Vec<f64> = (0..16)
            .map(|k| 2.0 * libm::cos(2.0 * core::f64::consts::PI * k as f64 / 16.0))
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues().iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn shortcut_sampling() {
        assert!(sample_shortcuts(512, 0.0, 1).unwrap().is_empty());
        let s = sample_shortcuts(512, 0.06, 1).unwrap();
        assert_eq!(s.len(), 30);
        assert_eq!(s, sample_shortcuts(512, 0.06, 1).unwrap());
        assert_ne!(s, sample_shortcuts(512, 0.06, 2).unwrap());
        let set: BTreeSet<_> = s.iter().collect();
        assert_eq!(set.len(), 30);
        assert!(s.iter().all(|&(i, j)| i < j));
        assert!(sample_shortcuts(4, 2.0, 1).is_err());
        assert!(sample_shortcuts(8, -0.1, 1).is_err());
    }

    #[test]
    fn smallworld_is_deterministic_and_symmetric() {
        let p = SmallWorldParams::new(64, 1.5, 0.1, 11).unwrap();
        let a = build_smallworld(&p).unwrap();
        let b = build_smallworld(&SmallWorldParams::new(64, 1.5, 0.1, 11).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_exactly_symmetric(&a);
        // Disorder does not depend on the shortcut density.
        let c = build_smallworld(&SmallWorldParams::new(64, 1.5, 0.0, 11).unwrap()).unwrap();
        for i in 0..64 {
            assert_eq!(a[(i, i)], c[(i, i)]);
        }
        assert!(SmallWorldParams::new(48, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn disorder_quench_scales_diagonal_only() {
        let p = SmallWorldParams::new(32, 2.0, 0.06, 3).unwrap();
        let (h, hp) = quench(&Model::SmallWorld(p.clone()), 0.3).unwrap();
        assert_eq!(h, build_smallworld(&p).unwrap());
        for i in 0..32 {
            for j in 0..32 {
                if i == j {
                    assert!((hp[(i, i)] - h[(i, i)] * (1.7 / 2.0)).abs() < 1e-14);
                } else {
                    assert_eq!(h[(i, j)], hp[(i, j)]);
                }
            }
        }
        assert!(quench(&Model::SmallWorld(p.clone()), 2.0).is_err());
        let (h0, h1) = quench(&Model::SmallWorld(p), 0.0).unwrap();
        assert_eq!(h0, h1);
    }

    #[test]
    fn dicke_and_synthetic_quench() {
        let p = dicke(0.4, 4, 10, Parity::Even);
        let (h, hp) = quench(&Model::Dicke(p), 0.1).unwrap();
        assert_eq!(hp, build_dicke(&DickeParams { lambda: 0.5, ..p }).unwrap());
        assert_eq!(h, build_dicke(&p).unwrap());
        let (a, b) = quench(&Model::Dicke(p), 0.0).unwrap();
        assert_eq!(a, b);

        let s = SyntheticParams { dim: 20, seed: 5 };
        let (a, b) = quench(&Model::Synthetic(s), 0.0).unwrap();
        assert_eq!(a, b);
        let (a, b) = quench(&Model::Synthetic(s), core::f64::consts::FRAC_PI_2).unwrap();
        assert_ne!(a, b);
        assert_exactly_symmetric(&b);
    }
}
