//! Power-sum / monomial basis change and the moment coefficients `Z_μ`.
//!
//! Under phase averaging the `k`-th moment of a transition probability is
//! `Σ_λ P_λ² m_λ(c)`. Rewriting the monomial symmetric polynomials `m_λ` in
//! power sums `p_μ = h̄^k ξ_{μ₁} ξ_{μ₂} …` turns it into `h̄^k Σ_μ Z_μ ξ_μ`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::error::{domain, numeric, Result};
use crate::partition::{
    binomial, check_weight, factorial, multinomial, partitions_of_capped, Partition,
    DEFAULT_MAX_WEIGHT,
};

/// The matrix `L` with `p_λ = Σ_μ L_{λμ} m_μ`, rows and columns in reverse
/// lexicographic partition order.
#[derive(Debug, Clone, PartialEq)]
pub struct LMatrix {
    partitions: Vec<Partition>,
    entries: Vec<BigUint>,
}

impl LMatrix {
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn dim(&self) -> usize {
        self.partitions.len()
    }

    pub fn get(&self, row: usize, col: usize) -> &BigUint {
        &self.entries[row * self.dim() + col]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }

    pub fn is_lower_triangular(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j).is_zero()))
    }

    /// Exact inverse, as rationals.
    pub fn inverse(&self) -> Vec<Vec<BigRational>> {
        let n = self.dim();
        let mut inv = vec![vec![BigRational::zero(); n]; n];
        // Forward substitution, one column of the identity at a time.
        for col in 0..n {
            for row in col..n {
                let mut acc = if row == col {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                for k in col..row {
                    let l = self.get(row, k);
                    if !l.is_zero() {
                        acc -= to_rational(l) * &inv[k][col];
                    }
                }
                inv[row][col] = acc / to_rational(self.get(row, row));
            }
        }
        inv
    }
}

fn to_rational(u: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(u.clone()))
}

/// Number of ways to distribute the labelled parts of `lambda` into labelled
/// bins of sizes `mu` so that every bin is filled exactly: the coefficient of
/// `x₁^{μ₁} x₂^{μ₂} …` in `p_λ`.
fn count_merges(remaining: &mut [(u32, u32)], bins: &[u32]) -> BigUint {
    let Some((&target, rest)) = bins.split_first() else {
        return if remaining.iter().all(|&(_, r)| r == 0) {
            BigUint::one()
        } else {
            BigUint::ZERO
        };
    };
    let mut total = BigUint::ZERO;
    fill_bin(remaining, 0, target, rest, BigUint::one(), &mut total);
    total
}

fn fill_bin(
    remaining: &mut [(u32, u32)],
    idx: usize,
    left: u32,
    rest: &[u32],
    ways: BigUint,
    total: &mut BigUint,
) {
    if left == 0 {
        *total += ways * count_merges(remaining, rest);
        return;
    }
    if idx == remaining.len() {
        return;
    }
    let (value, avail) = remaining[idx];
    let max_take = avail.min(left / value);
    for take in 0..=max_take {
        remaining[idx].1 = avail - take;
        fill_bin(
            remaining,
            idx + 1,
            left - take * value,
            rest,
            &ways * binomial(avail, take),
            total,
        );
    }
    remaining[idx].1 = avail;
}

/// `L_{λμ}` for a single pair of partitions of the same weight.
pub fn l_entry(lambda: &Partition, mu: &Partition) -> BigUint {
    if lambda.weight() != mu.weight() {
        return BigUint::ZERO;
    }
    let mut remaining = lambda.multiplicities();
    count_merges(&mut remaining, mu.parts())
}

/// Options for the partition engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionEngine {
    pub max_weight: u32,
}

impl Default for PartitionEngine {
    fn default() -> Self {
        Self {
            max_weight: DEFAULT_MAX_WEIGHT,
        }
    }
}

/// Symbolic `overline{h^k}/h̄^k = Σ_μ Z_μ ξ_{μ₁} ξ_{μ₂} …` with `ξ₁ ≡ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFormula {
    pub degree: u32,
    pub terms: Vec<(Partition, BigInt)>,
}

impl MomentFormula {
    pub fn coefficient(&self, mu: &Partition) -> Option<&BigInt> {
        self.terms.iter().find(|(p, _)| p == mu).map(|(_, z)| z)
    }

    /// Evaluates with `xi(q)` supplying `ξ_q` for `q ≥ 2`.
    pub fn evaluate_f64(&self, xi: impl Fn(u32) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(mu, z)| {
                let prod: f64 = mu.reduced().parts().iter().map(|&q| xi(q)).product();
                z.to_f64().unwrap_or(f64::NAN) * prod
            })
            .sum()
    }

    /// Exact evaluation with rational `ξ_q`.
    pub fn evaluate_rational(&self, xi: impl Fn(u32) -> BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (mu, z) in &self.terms {
            let prod = mu
                .reduced()
                .parts()
                .iter()
                .fold(BigRational::one(), |a, &q| a * xi(q));
            acc += BigRational::from_integer(z.clone()) * prod;
        }
        acc
    }
}

impl PartitionEngine {
    pub fn new(max_weight: u32) -> Self {
        Self { max_weight }
    }

    pub fn partitions_of(&self, k: u32) -> Result<Vec<Partition>> {
        if k == 0 {
            return Err(domain!("partition weight must be positive"));
        }
        partitions_of_capped(k, self.max_weight)
    }

    /// The lower-triangular basis-change matrix for weight `k`.
    pub fn l_matrix(&self, k: u32) -> Result<LMatrix> {
        let partitions = self.partitions_of(k)?;
        let n = partitions.len();
        let mut entries = vec![BigUint::ZERO; n * n];
        for (i, lambda) in partitions.iter().enumerate() {
            let mults = lambda.multiplicities();
            for (j, mu) in partitions.iter().enumerate().take(i + 1) {
                // Merging never increases the number of parts.
                if mu.len() > lambda.len() {
                    continue;
                }
                let mut remaining = mults.clone();
                entries[i * n + j] = count_merges(&mut remaining, mu.parts());
            }
        }
        Ok(LMatrix {
            partitions,
            entries,
        })
    }

    /// `Z_μ = Σ_λ P_λ² (L⁻¹)_{λμ}` for every `μ ⊢ k`, obtained by solving the
    /// triangular system `Σ_μ L_{μλ} Z_μ = P_λ²`.
    pub fn z_coefficients(&self, k: u32) -> Result<Vec<(Partition, BigInt)>> {
        let l = self.l_matrix(k)?;
        let n = l.dim();
        let mut z: Vec<BigRational> = vec![BigRational::zero(); n];
        for i in (0..n).rev() {
            let p = BigInt::from(multinomial(&l.partitions[i]));
            let mut acc = BigRational::from_integer(&p * &p);
            for (j, zj) in z.iter().enumerate().skip(i + 1) {
                let lji = l.get(j, i);
                if !lji.is_zero() {
                    acc -= to_rational(lji) * zj;
                }
            }
            z[i] = acc / to_rational(l.get(i, i));
        }
        l.partitions
            .into_iter()
            .zip(z)
            .map(|(mu, zr)| {
                if !zr.is_integer() {
                    return Err(numeric!("Z_{mu:?} = {zr} is not an integer"));
                }
                Ok((mu, zr.to_integer()))
            })
            .collect()
    }

    /// `Z̃_{μ′}` computed from the weight-`k` table, `Z_μ = k! C(k,s) Z̃_{μ′}`
    /// with `μ = (μ′, 1^{k−s})`.
    pub fn z_tilde_at(&self, mu_prime: &Partition, k: u32) -> Result<BigRational> {
        if !mu_prime.is_reduced() {
            return Err(domain!(
                "Z-tilde needs a partition without parts equal to 1, got {mu_prime:?}"
            ));
        }
        let s = mu_prime.weight();
        if k < s {
            return Err(domain!("weight {k} is below |μ′| = {s}"));
        }
        if k == 0 {
            return Ok(BigRational::one());
        }
        check_weight(k, self.max_weight)?;
        let mu = Partition::with_ones(mu_prime, k - s);
        let table = self.z_coefficients(k)?;
        let z = table
            .into_iter()
            .find(|(p, _)| *p == mu)
            .map(|(_, z)| z)
            .ok_or_else(|| numeric!("missing Z for {mu:?}"))?;
        let denom = BigInt::from(factorial(k) * binomial(k, s));
        Ok(BigRational::new(z, denom))
    }

    /// `Z̃_{μ′}` at the smallest admissible weight. The empty partition gives 1.
    pub fn z_tilde(&self, mu_prime: &Partition) -> Result<BigRational> {
        self.z_tilde_at(mu_prime, mu_prime.weight())
    }

    pub fn moment_formula(&self, k: u32) -> Result<MomentFormula> {
        Ok(MomentFormula {
            degree: k,
            terms: self.z_coefficients(k)?,
        })
    }
}

/// `overline{h^k} = Σ_λ P_λ² m_λ(c)` by direct summation over distinct
/// monomials. Independent of the `L`/`Z` route; meant for small `k` and short
/// vectors.
pub fn moment_formula_oracle<T>(k: u32, c: &[T]) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + FromPrimitive,
{
    let n = c.len();
    let mut total = T::zero();
    if k == 0 {
        return T::one();
    }
    if n == 0 {
        return total;
    }
    // Nondecreasing index tuples enumerate each monomial exactly once.
    let mut idx = vec![0usize; k as usize];
    loop {
        let mut monomial = T::one();
        let mut counts: Vec<u32> = Vec::new();
        let mut run = 0u32;
        for (pos, &i) in idx.iter().enumerate() {
            monomial = monomial * c[i].clone();
            run += 1;
            if pos + 1 == idx.len() || idx[pos + 1] != i {
                counts.push(run);
                run = 0;
            }
        }
        let p = multinomial(&Partition::new(counts)).to_u64().unwrap_or(u64::MAX);
        let w = T::from_u64(p * p).expect("weight fits");
        total = total + w * monomial;

        // Next nondecreasing tuple.
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return total;
            }
            pos -= 1;
            if idx[pos] + 1 < n {
                let v = idx[pos] + 1;
                for slot in idx.iter_mut().skip(pos) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
pub(crate) fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
