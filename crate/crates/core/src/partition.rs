//! Integer partitions with multiplicity bookkeeping.
//!
//! Partitions are stored as nonincreasing part lists. Enumeration order is
//! reverse lexicographic, `(3), (2,1), (1,1,1)`, which also fixes the row and
//! column order of every matrix indexed by partitions.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{domain, Error, Result};

/// Default cap on partition weights handled by the combinatorial routines.
pub const DEFAULT_MAX_WEIGHT: u32 = 20;

/// An integer partition `λ = (λ₁ ≥ λ₂ ≥ … ≥ 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts in any order. Zero parts are dropped.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    /// The empty partition of 0.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a partition from parts that must already be nonincreasing and positive.
    pub fn from_parts(parts: &[u32]) -> Result<Self> {
        if parts.contains(&0) {
            return Err(domain!("partition parts must be positive: {parts:?}"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(domain!("partition parts must be nonincreasing: {parts:?}"));
        }
        Ok(Self {
            parts: parts.to_vec(),
        })
    }

    /// `μ′` with `r` ones appended.
    pub fn with_ones(reduced: &Partition, ones: u32) -> Self {
        let mut parts = reduced.parts.clone();
        parts.extend(core::iter::repeat_n(1, ones as usize));
        Self { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `|λ|`, the sum of the parts.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts, `lg(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The sub-partition of parts `≥ 2`.
    pub fn reduced(&self) -> Partition {
        Partition {
            parts: self.parts.iter().copied().filter(|&p| p >= 2).collect(),
        }
    }

    /// Number of parts equal to one.
    pub fn ones(&self) -> u32 {
        self.parts.iter().filter(|&&p| p == 1).count() as u32
    }

    /// True when no part equals one.
    pub fn is_reduced(&self) -> bool {
        self.parts.iter().all(|&p| p >= 2)
    }

    /// `|λ| − lg(λ)`: the power of `1/N` carried by `ξ̄_λ` for fully spread
    /// overlaps. Groups the terms of the entropy expansion into orders.
    pub fn delocalized_order(&self) -> u32 {
        self.weight() - self.len() as u32
    }

    /// Multiplicities `(value, count)` in decreasing value order.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, c)) if *v == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Dash-joined parts, e.g. `3-2`. The empty partition prints as `0`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, "-")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Self::empty());
        }
        let parts = s
            .split('-')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| domain!("bad partition `{s}`"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(&parts)
    }
}

pub(crate) fn check_weight(k: u32, max: u32) -> Result<()> {
    if k > max {
        return Err(Error::SizeLimit {
            what: "partition weight",
            value: k as u64,
            max: max as u64,
        });
    }
    Ok(())
}

/// All partitions of `k` in reverse lexicographic order, with the default cap.
pub fn partitions_of(k: u32) -> Result<Vec<Partition>> {
    partitions_of_capped(k, DEFAULT_MAX_WEIGHT)
}

/// All partitions of `k` in reverse lexicographic order.
///
/// `k = 0` yields the single empty partition.
pub fn partitions_of_capped(k: u32, max_weight: u32) -> Result<Vec<Partition>> {
    check_weight(k, max_weight)?;
    let mut out = Vec::new();
    if k == 0 {
        out.push(Partition::empty());
        return Ok(out);
    }
    let mut cur: Vec<u32> = alloc::vec![k];
    loop {
        out.push(Partition { parts: cur.clone() });
        // Strip trailing ones, decrement the last part > 1, refill greedily.
        let mut rem = 0u32;
        while cur.last() == Some(&1) {
            cur.pop();
            rem += 1;
        }
        let Some(last) = cur.last_mut() else { break };
        *last -= 1;
        let cap = *last;
        rem += 1;
        while rem > 0 {
            let p = rem.min(cap);
            cur.push(p);
            rem -= p;
        }
    }
    Ok(out)
}

/// All partitions with every part `≥ 2` and weight in `2..=max_weight`,
/// ordered by weight and then reverse lexicographically.
pub fn reduced_partitions_up_to(max_weight: u32, cap: u32) -> Result<Vec<Partition>> {
    check_weight(max_weight, cap)?;
    let mut out = Vec::new();
    for s in 2..=max_weight {
        out.extend(
            partitions_of_capped(s, cap)?
                .into_iter()
                .filter(Partition::is_reduced),
        );
    }
    Ok(out)
}

pub(crate) fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub(crate) fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Multinomial coefficient `k!/(λ₁!λ₂!…)`.
pub fn multinomial(lambda: &Partition) -> BigUint {
    let denom = lambda
        .parts
        .iter()
        .fold(BigUint::one(), |acc, &p| acc * factorial(p));
    factorial(lambda.weight()) / denom
}
