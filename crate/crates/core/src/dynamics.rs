//! Direct evaluation of `h_n(τ) = |⟨n|e^{−iH′τ}|n₀⟩|²` and of the entropy
//! difference between the time-averaged diagonal and the averaged entropy.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{domain, numeric, Error, Result};
use crate::models::{dicke_converged_levels, quench, Model};
use crate::expansion::ExpansionCoefficients;
use crate::spectral::{bracket_orders, diagonalize, xi_bar_set, BasisOverlap, OverlapTable, Spectrum, XiBarSet};

/// `⟨z ln z⟩ − ⟨z⟩ ln⟨z⟩` for `z = sin²x`, `x` uniform: `(1 − ln 2)/2`.
pub const SIN2_LOG_AVERAGE: f64 = (1.0 - core::f64::consts::LN_2) / 2.0;

/// Results with `min_gap · Δτ` below this are flagged as phase-unresolved.
pub const PHASE_RESOLUTION_MIN: f64 = 10.0;

/// Allowed drift of `Σ h_n` away from one.
pub const NORMALIZATION_TOL: f64 = 1e-8;

const BATCH: usize = 32;

/// Uniform grid of `n_samples` times covering `[τ, τ + Δτ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub tau_start: f64,
    pub tau_window: f64,
    pub n_samples: usize,
}

impl TimeWindow {
    pub const DEFAULT_SAMPLES: usize = 400;

    pub fn new(tau_start: f64, tau_window: f64, n_samples: usize) -> Result<Self> {
        let w = Self {
            tau_start,
            tau_window,
            n_samples,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_start > 0.0 && self.tau_start.is_finite()) {
            return Err(domain!("window start must be positive, got {}", self.tau_start));
        }
        if !(self.tau_window > 0.0 && self.tau_window.is_finite()) {
            return Err(domain!("window length must be positive, got {}", self.tau_window));
        }
        if self.n_samples < 2 {
            return Err(domain!("need at least 2 samples, got {}", self.n_samples));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let step = self.tau_window / (self.n_samples - 1) as f64;
        (0..self.n_samples)
            .map(|i| self.tau_start + step * i as f64)
            .collect()
    }
}

/// Precomputed products `⟨m|n⟩⟨m|n₀⟩` for repeated evaluation of `h(τ)`.
///
/// Phases are measured from the level with the largest `|⟨m|n₀⟩|`; the
/// global phase drops out of `|a_n|²` and a stationary state stays an
/// exact delta.
#[derive(Debug, Clone)]
pub struct Propagator {
    products: DMatrix<f64>,
    energies: Vec<f64>,
    n0: usize,
}

impl Propagator {
    pub fn new(overlap: &BasisOverlap, spec_prime: &Spectrum, n0: usize) -> Result<Self> {
        let dim = overlap.dim();
        if spec_prime.dim() != dim {
            return Err(domain!("overlap has dimension {dim}, spectrum {}", spec_prime.dim()));
        }
        if n0 >= dim {
            return Err(domain!("initial index {n0} out of range for dimension {dim}"));
        }
        let a = overlap.amplitudes();
        let mut reference = 0;
        for m in 1..dim {
            if a[(m, n0)].abs() > a[(reference, n0)].abs() {
                reference = m;
            }
        }
        let e_ref = spec_prime.eigenvalues()[reference];
        let energies = spec_prime.eigenvalues().iter().map(|e| e - e_ref).collect();
        let products = DMatrix::from_fn(dim, dim, |m, n| a[(m, n)] * a[(m, n0)]);
        Ok(Self {
            products,
            energies,
            n0,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// `h(τ)` for one time.
    pub fn probabilities(&self, tau: f64) -> Result<Vec<f64>> {
        let batch = self.batch(&[tau])?;
        Ok(batch.column(0).iter().copied().collect())
    }

    /// `h(τ_t)` as the columns of an `N × T` matrix.
    pub fn batch(&self, taus: &[f64]) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, taus.len());
        for (start, chunk) in taus.chunks(BATCH).enumerate().map(|(i, c)| (i * BATCH, c)) {
            if let Some(t) = chunk.iter().find(|t| !t.is_finite()) {
                return Err(domain!("time must be finite, got {t}"));
            }
            let cos = DMatrix::from_fn(dim, chunk.len(), |m, t| libm::cos(self.energies[m] * chunk[t]));
            let sin = DMatrix::from_fn(dim, chunk.len(), |m, t| libm::sin(self.energies[m] * chunk[t]));
            let re = self.products.tr_mul(&cos);
            let im = self.products.tr_mul(&sin);
            for t in 0..chunk.len() {
                let mut total = 0.0;
                for n in 0..dim {
                    let h = re[(n, t)] * re[(n, t)] + im[(n, t)] * im[(n, t)];
                    out[(n, start + t)] = h;
                    total += h;
                }
                if (total - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(numeric!(
                        "probabilities sum to {total} at tau = {}",
                        chunk[t]
                    ));
                }
            }
        }
        Ok(out)
    }
}

/// `h_n(τ)` from the two spectra.
pub fn transition_probabilities(
    spec: &Spectrum,
    spec_prime: &Spectrum,
    n0: usize,
    tau: f64,
) -> Result<Vec<f64>> {
    let overlap = BasisOverlap::new(spec, spec_prime)?;
    Propagator::new(&overlap, spec_prime, n0)?.probabilities(tau)
}

/// `h̄_n = Σ_m c_{mn}`, the infinite-time average in the absence of
/// degenerate gaps.
pub fn analytic_h_bar(table: &OverlapTable) -> Vec<f64> {
    table.h_bar().to_vec()
}

/// `−Σ h ln h` in nats, with `0 ln 0 = 0`.
pub fn diagonal_entropy(h: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    let mut entropy = 0.0;
    for &p in h {
        if !(p >= -1e-12) {
            return Err(domain!("probability {p} is negative or not a number"));
        }
        total += p;
        if p > 0.0 {
            entropy -= p * libm::log(p);
        }
    }
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(domain!("probabilities sum to {total}"));
    }
    Ok(entropy)
}

/// Window-averaged entropies of one quench.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    /// Mean of `S_D(τ)` over the window.
    pub s_avg: f64,
    /// `S_D` of the window-averaged diagonal.
    pub s_of_avg: f64,
    pub delta_s: f64,
    pub h_bar_numeric: Vec<f64>,
    /// Smallest level spacing of `H′`.
    pub min_gap: f64,
    /// `min_gap · Δτ`.
    pub phase_resolution: f64,
    /// `S_D(τ)` on the window grid.
    pub entropy_trace: Vec<f64>,
}

impl EntropyResult {
    pub fn phase_unresolved(&self) -> bool {
        self.phase_resolution < PHASE_RESOLUTION_MIN
    }
}

pub fn run_quench_on(
    spec: &Spectrum,
    spec_prime: &Spectrum,
    n0: usize,
    window: &TimeWindow,
) -> Result<EntropyResult> {
    let overlap = BasisOverlap::new(spec, spec_prime)?;
    entropy_window(&overlap, spec_prime, n0, window)
}

pub fn entropy_window(
    overlap: &BasisOverlap,
    spec_prime: &Spectrum,
    n0: usize,
    window: &TimeWindow,
) -> Result<EntropyResult> {
    window.validate()?;
    let prop = Propagator::new(overlap, spec_prime, n0)?;
    let dim = prop.dim();
    let times = window.times();
    let mut h_sum = vec![0.0; dim];
    let mut trace = Vec::with_capacity(times.len());
    for chunk in times.chunks(BATCH) {
        let h = prop.batch(chunk)?;
        for col in h.column_iter() {
            for (acc, &p) in h_sum.iter_mut().zip(col.iter()) {
                *acc += p;
            }
            trace.push(diagonal_entropy(col.as_slice())?);
        }
    }
    let count = times.len() as f64;
    let h_bar_numeric: Vec<f64> = h_sum.into_iter().map(|s| s / count).collect();
    let s_avg = trace.iter().sum::<f64>() / count;
    let s_of_avg = diagonal_entropy(&h_bar_numeric)?;
    let min_gap = spec_prime.min_gap();
    Ok(EntropyResult {
        s_avg,
        s_of_avg,
        delta_s: s_of_avg - s_avg,
        h_bar_numeric,
        min_gap,
        phase_resolution: min_gap * window.tau_window,
        entropy_trace: trace,
    })
}

/// Both Hamiltonians of a quench, diagonalized once and shared by every
/// initial state.
#[derive(Debug, Clone)]
pub struct QuenchSystem {
    pub spec: Spectrum,
    pub spec_prime: Spectrum,
    pub overlap: BasisOverlap,
    /// Per-level convergence for truncated models, `None` otherwise.
    pub converged: Option<Vec<bool>>,
}

impl QuenchSystem {
    pub fn prepare(model: &Model, delta: f64) -> Result<Self> {
        let (h, h_prime) = quench(model, delta)?;
        let converged = match model {
            Model::Dicke(p) => Some(dicke_converged_levels(p)?),
            _ => None,
        };
        Self::from_matrices(&h, &h_prime, converged)
    }

    pub fn from_matrices(
        h: &DMatrix<f64>,
        h_prime: &DMatrix<f64>,
        converged: Option<Vec<bool>>,
    ) -> Result<Self> {
        let spec = diagonalize(h)?;
        let spec_prime = diagonalize(h_prime)?;
        let overlap = BasisOverlap::new(&spec, &spec_prime)?;
        Ok(Self {
            spec,
            spec_prime,
            overlap,
            converged,
        })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn is_converged(&self, n0: usize) -> bool {
        match &self.converged {
            Some(flags) => flags.get(n0).copied().unwrap_or(false),
            None => n0 < self.dim(),
        }
    }

    pub fn check_initial(&self, n0: usize) -> Result<()> {
        if n0 >= self.dim() {
            return Err(domain!("initial index {n0} out of range for dimension {}", self.dim()));
        }
        if !self.is_converged(n0) {
            return Err(Error::Unconverged { n0 });
        }
        Ok(())
    }

    pub fn entropy(&self, n0: usize, window: &TimeWindow) -> Result<EntropyResult> {
        self.check_initial(n0)?;
        entropy_window(&self.overlap, &self.spec_prime, n0, window)
    }

    pub fn overlap_table(&self, n0: usize) -> Result<OverlapTable> {
        OverlapTable::new(&self.overlap, n0)
    }

    /// Numeric `ΔS` next to the truncated expansion evaluated on the same
    /// overlaps.
    pub fn analyze(
        &self,
        n0: usize,
        window: &TimeWindow,
        coeffs: &ExpansionCoefficients,
    ) -> Result<QuenchAnalysis> {
        let entropy = self.entropy(n0, window)?;
        let table = self.overlap_table(n0)?;
        let xis = xi_bar_set(&table, coeffs.max_weight)?;
        let orders = bracket_orders(&xis, coeffs)?;
        Ok(QuenchAnalysis {
            n0,
            entropy,
            xis,
            orders,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchAnalysis {
    pub n0: usize,
    pub entropy: EntropyResult,
    pub xis: XiBarSet,
    /// `O₁`, `O₂`, `O₃`.
    pub orders: [f64; 3],
}

/// A single quench experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchRun {
    pub model: Model,
    pub delta: f64,
    pub n0: usize,
    pub window: TimeWindow,
}

pub fn run_quench(run: &QuenchRun) -> Result<EntropyResult> {
    run.window.validate()?;
    QuenchSystem::prepare(&run.model, run.delta)?.entropy(run.n0, &run.window)
}

/// Leading-order density of `h_n` over the window with its `ξ₂` correction.
/// May dip below zero in the tail for large `ξ₂`.
pub fn predicted_density(h_bar: f64, xi2: f64, h: f64) -> f64 {
    let x = h / h_bar;
    libm::exp(-x) / h_bar * (1.0 - (x * x / 4.0 - x + 0.5) * xi2)
}

/// `∫ h^k P(h) dh = k! h̄^k (1 − k(k−1)ξ₂/4)`.
pub fn density_moment(h_bar: f64, xi2: f64, k: u32) -> f64 {
    let kf = k as f64;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    fact * libm::pow(h_bar, kf) * (1.0 - kf * (kf - 1.0) / 4.0 * xi2)
}

/// The moment generating function of [`predicted_density`] in closed form
/// and as its power series through `t^{k_max}`.
pub fn moment_generating_check(h_bar: f64, xi2: f64, t: f64, k_max: u32) -> Result<(f64, f64)> {
    let x = h_bar * t;
    if !(x.abs() < 1.0) {
        return Err(domain!("series diverges for |h_bar t| = {}", x.abs()));
    }
    let closed = 1.0 / (1.0 - x) - x * x / (2.0 * libm::pow(1.0 - x, 3.0)) * xi2;
    let mut series = 0.0;
    let mut power = 1.0;
    for k in 0..=k_max {
        let kf = k as f64;
        series += power * (1.0 - kf * (kf - 1.0) / 4.0 * xi2);
        power *= x;
    }
    Ok((closed, series))
}
