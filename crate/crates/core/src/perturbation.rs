//! Small quenches `H′ = H + εV` treated at lowest order in `ε`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dynamics::{QuenchSystem, TimeWindow};
use crate::error::{domain, Result};
use crate::models::{dicke_converged_levels, quench, Model};
use crate::expansion::{rational_to_f64, ExpansionCoefficients, Truncation};
use crate::partition::Partition;
use crate::spectral::{Spectrum, EULER_GAMMA};
use crate::symmetric::PartitionEngine;

/// `2(1 − ln 2)`, the slope of `ΔS` in `Σ v²`.
pub const PERTURBATIVE_SLOPE: f64 = 2.0 * (1.0 - core::f64::consts::LN_2);

/// Above this `max |v|` first-order results are flagged unreliable.
pub const LARGE_V: f64 = 0.1;

/// Relative gap below which the spectrum counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationInput {
    pub spec: Spectrum,
    /// Perturbation in the site basis of `H`.
    pub v: DMatrix<f64>,
    pub epsilon: f64,
    pub n0: usize,
}

/// First-order mixing amplitudes `v_{nm} = ε Ṽ_{nm}/(E_m − E_n)`, with `Ṽ`
/// the perturbation in the eigenbasis of `H`. The diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingAmplitudes {
    pub v: DMatrix<f64>,
    pub n0: usize,
    /// `max_n |v_{nn₀}| > 0.1`.
    pub large: bool,
}

impl MixingAmplitudes {
    /// `Σ_{n≠n₀} v_{nn₀}²`.
    pub fn sum_v2(&self) -> f64 {
        (0..self.v.nrows())
            .filter(|&n| n != self.n0)
            .map(|n| self.v[(n, self.n0)] * self.v[(n, self.n0)])
            .sum()
    }
}

pub fn perturbative_v(input: &PerturbationInput) -> Result<MixingAmplitudes> {
    let spec = &input.spec;
    let dim = spec.dim();
    let v = &input.v;
    if v.nrows() != dim || v.ncols() != dim {
        return Err(domain!("perturbation is {}x{}, spectrum has dimension {dim}", v.nrows(), v.ncols()));
    }
    if !(input.epsilon >= 0.0) || !input.epsilon.is_finite() {
        return Err(domain!("epsilon must be finite and >= 0, got {}", input.epsilon));
    }
    if input.n0 >= dim {
        return Err(domain!("initial index {} out of range for dimension {dim}", input.n0));
    }
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    for i in 0..dim {
        for j in 0..i {
            if (v[(i, j)] - v[(j, i)]).abs() > 1e-12 * scale {
                return Err(domain!("perturbation is not symmetric at ({i},{j})"));
            }
        }
    }
    if dim > 1 && spec.min_gap() <= DEGENERACY_TOL * spec.width() {
        return Err(domain!("spectrum is degenerate (min gap {})", spec.min_gap()));
    }
    let u = spec.eigenvectors();
    let rotated = u.transpose() * v * u;
    let e = spec.eigenvalues();
    let mixing = DMatrix::from_fn(dim, dim, |n, m| {
        if n == m {
            0.0
        } else {
            input.epsilon * rotated[(n, m)] / (e[m] - e[n])
        }
    });
    let large = mixing.column(input.n0).iter().any(|x| x.abs() > LARGE_V);
    Ok(MixingAmplitudes {
        v: mixing,
        n0: input.n0,
        large,
    })
}

/// `2(1 − ln 2) Σ v²`; the `n = n₀` channel is time independent and drops out.
pub fn perturbative_delta_s(input: &PerturbationInput) -> Result<f64> {
    Ok(PERTURBATIVE_SLOPE * perturbative_v(input)?.sum_v2())
}

/// `κ(μ′)` in `ξ̄_{μ′} ≃ 1 − κ Σ v²`: `2 − 2^{1 + lg(μ′) − |μ′|}`.
///
/// The initial column carries `ξ ≈ 1` and weight `1 − 2Σv²`; every other
/// column has two entries of order `v²`, so `ξ_q = 2^{1−q}` there.
pub fn perturbative_kappa(mu: &Partition) -> Result<BigRational> {
    if mu.is_empty() || !mu.is_reduced() {
        return Err(domain!("kappa needs a nonempty reduced partition, got {mu:?}"));
    }
    let d = mu.delocalized_order();
    let two = BigInt::from(2);
    Ok(BigRational::from_integer(two) - BigRational::new(BigInt::one(), BigInt::from(2).pow(d - 1)))
}

pub fn perturbative_xi(input: &PerturbationInput, mu: &Partition) -> Result<f64> {
    let kappa = rational_to_f64(&perturbative_kappa(mu)?);
    Ok(1.0 - kappa * perturbative_v(input)?.sum_v2())
}

/// `(offset − γ) + slope · Σ v²` with exact rational parts.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLine {
    pub offset: BigRational,
    pub slope: BigRational,
}

impl AffineLine {
    pub fn constant(&self) -> f64 {
        rational_to_f64(&self.offset) - EULER_GAMMA
    }

    pub fn evaluate(&self, sum_v2: f64) -> f64 {
        self.constant() + rational_to_f64(&self.slope) * sum_v2
    }
}

/// Truncated expansion with `ξ̄_{μ′} = 1 − κ(μ′) Σv²` substituted exactly.
pub fn perturbative_line(coeffs: &ExpansionCoefficients, trunc: Truncation) -> Result<AffineLine> {
    let mut offset = BigRational::one();
    let mut slope = BigRational::zero();
    for (mu, c) in coeffs.truncated(trunc)? {
        offset += &c;
        slope -= &c * perturbative_kappa(&mu)?;
    }
    Ok(AffineLine { offset, slope })
}

/// The lines for `O₁`, `O₂`, `O₃`.
pub fn perturbative_lines() -> Result<[AffineLine; 3]> {
    let coeffs = PartitionEngine::default().delta_s_coefficients(6)?;
    Ok([
        perturbative_line(&coeffs, Truncation::Order(1))?,
        perturbative_line(&coeffs, Truncation::Order(2))?,
        perturbative_line(&coeffs, Truncation::Order(3))?,
    ])
}

pub fn perturbative_orders(input: &PerturbationInput) -> Result<[f64; 3]> {
    let x = perturbative_v(input)?.sum_v2();
    let lines = perturbative_lines()?;
    Ok([lines[0].evaluate(x), lines[1].evaluate(x), lines[2].evaluate(x)])
}

/// Lowest-order `h_n(τ)`: `4 sin²((E_n − E_{n₀})τ/2) v_{nn₀}²` off the initial
/// state and `1 − 2Σ_k v_{n₀k}²` on it. Unperturbed energies stand in for
/// `E′`. The two branches are not jointly normalized at this order.
pub fn first_order_probabilities(input: &PerturbationInput, tau: f64) -> Result<Vec<f64>> {
    let mix = perturbative_v(input)?;
    let e = input.spec.eigenvalues();
    let n0 = input.n0;
    let stay = 1.0 - 2.0 * (0..e.len()).filter(|&k| k != n0).map(|k| mix.v[(n0, k)].powi(2)).sum::<f64>();
    Ok((0..e.len())
        .map(|n| {
            if n == n0 {
                stay
            } else {
                let s = libm::sin((e[n] - e[n0]) * tau / 2.0);
                4.0 * s * s * mix.v[(n, n0)].powi(2)
            }
        })
        .collect())
}

/// Exact and first-order results for one quench strength.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderPoint {
    pub epsilon: f64,
    pub delta_s_exact: f64,
    pub delta_s_pert: f64,
    /// Perturbative `O₁`, `O₂`, `O₃`.
    pub orders: [f64; 3],
    pub sum_v2: f64,
    pub large: bool,
    pub phase_unresolved: bool,
}

/// Runs the quench `δ = ε` directly and compares it with first-order theory,
/// taking `V = (H′ − H)/ε`.
pub fn ladder_point(model: &Model, epsilon: f64, n0: usize, window: &TimeWindow) -> Result<LadderPoint> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(domain!("ladder needs epsilon > 0, got {epsilon}"));
    }
    let (h, h_prime) = quench(model, epsilon)?;
    let converged = match model {
        Model::Dicke(p) => Some(dicke_converged_levels(p)?),
        _ => None,
    };
    let sys = QuenchSystem::from_matrices(&h, &h_prime, converged)?;
    let exact = sys.entropy(n0, window)?;
    let input = PerturbationInput {
        spec: sys.spec.clone(),
        v: (h_prime - h) / epsilon,
        epsilon,
        n0,
    };
    let mix = perturbative_v(&input)?;
    let x = mix.sum_v2();
    let lines = perturbative_lines()?;
    Ok(LadderPoint {
        epsilon,
        delta_s_exact: exact.delta_s,
        delta_s_pert: PERTURBATIVE_SLOPE * x,
        orders: [lines[0].evaluate(x), lines[1].evaluate(x), lines[2].evaluate(x)],
        sum_v2: x,
        large: mix.large,
        phase_unresolved: exact.phase_unresolved(),
    })
}
