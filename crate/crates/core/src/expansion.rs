//! Resummed entropy-difference expansion `ΔS = 1 − γ + Σ_{μ′} Z̃_{μ′}/(s(s−1)) ξ̄_{μ′}`.
//!
//! Each reduced partition `μ′` of weight `s` contributes a pole of order
//! `s + 1` to the moment generating function. Integrating the resulting
//! density against `h ln h` produces sums of unsigned Stirling numbers; the
//! logarithmic and `γ` parts cancel for `s ≥ 2`, leaving a rational weight.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{numeric, Error, Result};
use crate::partition::{binomial, factorial, Partition};
use crate::symmetric::PartitionEngine;

/// Exact rational numbers used for every combinatorial coefficient.
pub type Rational = BigRational;

/// Unsigned Stirling number of the first kind `[n, k]`.
pub fn unsigned_stirling_first(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    // Row recurrence [i+1, j] = i [i, j] + [i, j-1].
    let mut row = alloc::vec![BigUint::ZERO; (k + 1) as usize];
    row[0] = BigUint::one();
    for i in 0..n {
        for j in (0..=k as usize).rev() {
            let carry = if j > 0 { row[j - 1].clone() } else { BigUint::ZERO };
            row[j] = &row[j] * i + carry;
        }
    }
    row[k as usize].clone()
}

/// The Stirling number `|S_a|` entering `∫ x^{a−1} e^{−x} ln x dx = (a−1)!(|S_a|/(a−1)! − γ)`,
/// i.e. `[a, 2] = (a−1)! H_{a−1}`. Indexing fixed by [`verify_stirling_identities`].
pub fn stirling_first_kind(a: u32, max: u32) -> Result<BigUint> {
    if a > max {
        return Err(Error::SizeLimit {
            what: "Stirling index",
            value: a as u64,
            max: max as u64,
        });
    }
    Ok(unsigned_stirling_first(a, 2))
}

/// Coefficients of the resummed `h ln h` integral for one pole order `s`:
/// the contribution is `log_coeff · (ln h̄ − γ) + constant` in units of
/// `Z̃_{μ′} p_{μ′} / h̄^{s−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResummationWeights {
    pub log_coeff: BigInt,
    pub constant: BigRational,
}

/// `Σ_r C(s,r)(−1)^r (r+1) (ln h̄ − γ + |S_{r+2}|/(r+1)!)` split into parts.
pub fn resummation_weights(s: u32) -> ResummationWeights {
    let mut log_coeff = BigInt::zero();
    let mut constant = BigRational::zero();
    for r in 0..=s {
        let sign = if r % 2 == 0 { 1 } else { -1 };
        let c = BigInt::from(binomial(s, r)) * sign;
        log_coeff += &c * BigInt::from(r + 1);
        let stirling = BigInt::from(unsigned_stirling_first(r + 2, 2));
        // (r+1) |S_{r+2}| / (r+1)! = |S_{r+2}| / r!
        constant += BigRational::new(c * stirling, BigInt::from(factorial(r)));
    }
    ResummationWeights {
        log_coeff,
        constant,
    }
}

/// Checks both summation identities used by the resummation for `2 ≤ s ≤ s_max`:
/// `Σ C(s,r)(−1)^r (r+1) = 0` and `Σ C(s,r)(−1)^r |S_{r+2}|/r! = 1/(s(s−1))`.
pub fn verify_stirling_identities(s_max: u32) -> Result<()> {
    for s in 2..=s_max {
        let w = resummation_weights(s);
        if !w.log_coeff.is_zero() {
            return Err(numeric!("log coefficient {} at s = {s}", w.log_coeff));
        }
        let want = BigRational::new(BigInt::one(), BigInt::from(s * (s - 1)));
        if w.constant != want {
            return Err(numeric!("Stirling sum {} != {want} at s = {s}", w.constant));
        }
    }
    Ok(())
}

/// How an expansion is cut off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// All `μ′` with `|μ′| ≤ s_max`.
    Weight(u32),
    /// All `μ′` with `|μ′| − lg(μ′) ≤ d`: the bracket grouping, in which
    /// order `d` collects the terms scaling as `N^{−d}` for delocalized
    /// overlaps. Orders 1, 2, 3 are `O₁`, `O₂`, `O₃`.
    Order(u32),
}

impl Truncation {
    pub fn includes(&self, mu: &Partition) -> bool {
        match *self {
            Truncation::Weight(s) => mu.weight() <= s,
            Truncation::Order(d) => mu.delocalized_order() <= d,
        }
    }

    /// Largest `|μ′|` the truncation can touch.
    pub fn max_weight(&self) -> u32 {
        match *self {
            Truncation::Weight(s) => s,
            Truncation::Order(d) => 2 * d,
        }
    }
}

/// Exact expansion coefficients `Z̃_{μ′}/(s(s−1))` for every reduced
/// partition with `2 ≤ s ≤ max_weight`, ordered by weight then reverse
/// lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    pub max_weight: u32,
    pub coeffs: Vec<(Partition, BigRational)>,
}

impl ExpansionCoefficients {
    pub fn get(&self, mu: &Partition) -> Option<&BigRational> {
        self.coeffs.iter().find(|(p, _)| p == mu).map(|(_, c)| c)
    }

    pub fn covers(&self, trunc: Truncation) -> bool {
        trunc.max_weight() <= self.max_weight
    }

    /// Entries kept by a truncation.
    pub fn truncated(&self, trunc: Truncation) -> Result<Vec<(Partition, BigRational)>> {
        if !self.covers(trunc) {
            return Err(Error::Domain(alloc::format!(
                "coefficients up to weight {} cannot serve {trunc:?}",
                self.max_weight
            )));
        }
        Ok(self
            .coeffs
            .iter()
            .filter(|(p, _)| trunc.includes(p))
            .cloned()
            .collect())
    }

    /// `Σ coeff` over a truncation: the expansion at `ξ̄ ≡ 1`, without `1 − γ`.
    pub fn localized_sum(&self, trunc: Truncation) -> Result<BigRational> {
        Ok(self
            .truncated(trunc)?
            .into_iter()
            .fold(BigRational::zero(), |acc, (_, c)| acc + c))
    }
}

impl PartitionEngine {
    /// Builds the resummed coefficients through the Stirling-number route.
    pub fn delta_s_coefficients(&self, s_max: u32) -> Result<ExpansionCoefficients> {
        if s_max < 2 {
            return Err(Error::Domain(alloc::format!(
                "expansion needs s_max >= 2, got {s_max}"
            )));
        }
        crate::partition::check_weight(s_max, self.max_weight)?;
        verify_stirling_identities(s_max)?;
        let mut coeffs = Vec::new();
        for s in 2..=s_max {
            let weights = resummation_weights(s);
            let fact = BigInt::from(factorial(s));
            for (mu, z) in self.z_coefficients(s)? {
                if !mu.is_reduced() {
                    continue;
                }
                let z_tilde = BigRational::new(z, fact.clone());
                coeffs.push((mu, z_tilde * &weights.constant));
            }
        }
        // z_coefficients lists each weight in reverse lex order already.
        Ok(ExpansionCoefficients {
            max_weight: s_max,
            coeffs,
        })
    }
}

/// Formats a rational as `num/den` (denominator always printed).
pub fn format_rational(r: &BigRational) -> alloc::string::String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}

/// Lossy conversion used at evaluation time.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
