//! Horn's inequalities for eigenvalues of `C = A + B` with `A`, `B`
//! Hermitian of order 4.
//!
//! Each entry reads `K|I|J`, meaning
//! `Σ_{k∈K} γ_k ≤ Σ_{i∈I} α_i + Σ_{j∈J} β_j` for an upper bound and the same
//! with `≥` for a lower bound. Indices are 1-based into non-increasing
//! spectra.

use alloc::vec::Vec;

use crate::numerics::{Spectrum, TOL};
use crate::{Error, Result};

const UPPER: [&str; 41] = [
    // r = 1
    "1|1|1", "2|1|2", "3|1|3", "4|1|4", "2|2|1", "3|2|2", "4|2|3", "3|3|1", "4|3|2", "4|4|1",
    // r = 2
    "12|12|12", "13|12|13", "14|12|14", "23|12|23", "24|12|24", "34|12|34", "13|13|12",
    "14|13|13", "23|13|13", "24|13|14", "24|13|23", "34|13|24", "14|14|12", "24|14|13",
    "34|14|14", "23|23|12", "24|23|13", "34|23|23", "24|24|12", "34|24|13", "34|34|12",
    // r = 3
    "123|123|123", "124|123|124", "134|123|134", "234|123|234", "124|124|123",
    "134|124|124", "234|124|134", "134|134|123", "234|134|124", "234|234|123",
];

const LOWER: [&str; 41] = [
    // r = 1
    "4|4|4", "3|4|3", "2|4|2", "1|4|1", "3|3|4", "2|3|3", "1|3|2", "2|2|4", "1|2|3", "1|1|4",
    // r = 2
    "34|34|34", "24|34|24", "23|34|23", "14|34|14", "13|34|13", "12|34|12", "24|24|34",
    "23|24|24", "14|24|24", "13|24|23", "13|24|14", "12|24|13", "23|23|34", "13|23|24",
    "12|23|23", "14|14|34", "13|14|24", "12|14|14", "13|13|34", "12|13|24", "12|12|34",
    // r = 3
    "234|234|234", "134|234|134", "124|234|124", "123|234|123", "134|134|234",
    "124|134|134", "123|134|124", "124|124|234", "123|124|134", "123|123|234",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HornDirection {
    /// `Σγ_K ≤ Σα_I + Σβ_J`.
    Upper,
    /// `Σγ_K ≥ Σα_I + Σβ_J`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HornInequality {
    /// 1-based indices.
    pub k: Vec<usize>,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub direction: HornDirection,
}

impl HornInequality {
    fn parse(s: &str, direction: HornDirection) -> Self {
        let mut parts = s.split('|').map(|p| p.bytes().map(|c| (c - b'0') as usize).collect::<Vec<_>>());
        let k = parts.next().unwrap_or_default();
        let i = parts.next().unwrap_or_default();
        let j = parts.next().unwrap_or_default();
        HornInequality { k, i, j, direction }
    }

    pub fn rank(&self) -> usize {
        self.k.len()
    }

    /// Slack of the inequality; negative means violated.
    pub fn margin(&self, alpha: &[f64], beta: &[f64], gamma: &[f64]) -> f64 {
        let pick = |v: &[f64], idx: &[usize]| idx.iter().map(|&x| v[x - 1]).sum::<f64>();
        let lhs = pick(gamma, &self.k);
        let rhs = pick(alpha, &self.i) + pick(beta, &self.j);
        match self.direction {
            HornDirection::Upper => rhs - lhs,
            HornDirection::Lower => lhs - rhs,
        }
    }
}

/// The order-4 Horn inequalities: 10, 21 and 10 of each direction for
/// `r = 1, 2, 3`, plus the trace equality checked separately.
#[derive(Debug, Clone, PartialEq)]
pub struct HornInequalitySet {
    pub n: usize,
    pub inequalities: Vec<HornInequality>,
}

impl HornInequalitySet {
    pub fn order_four() -> Self {
        let upper = UPPER.iter().map(|s| HornInequality::parse(s, HornDirection::Upper));
        let lower = LOWER.iter().map(|s| HornInequality::parse(s, HornDirection::Lower));
        HornInequalitySet { n: 4, inequalities: upper.chain(lower).collect() }
    }

    pub fn count(&self, rank: usize, direction: HornDirection) -> usize {
        self.inequalities.iter().filter(|q| q.rank() == rank && q.direction == direction).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HornReport {
    /// `Σα + Σβ - Σγ`; zero for a valid triple.
    pub trace_gap: f64,
    /// One margin per inequality of [`HornInequalitySet::order_four`], same order.
    pub margins: Vec<f64>,
}

impl HornReport {
    pub fn violations(&self, tol: f64) -> usize {
        self.margins.iter().filter(|m| **m < -tol).count() + usize::from(self.trace_gap.abs() > tol)
    }

    pub fn passed(&self) -> bool {
        self.violations(TOL) == 0
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates every order-4 inequality on the three spectra.
pub fn horn_check(alpha: &Spectrum, beta: &Spectrum, gamma: &Spectrum) -> Result<HornReport> {
    horn_check_with(&HornInequalitySet::order_four(), alpha, beta, gamma)
}

pub fn horn_check_with(
    set: &HornInequalitySet,
    alpha: &Spectrum,
    beta: &Spectrum,
    gamma: &Spectrum,
) -> Result<HornReport> {
    for s in [alpha, beta, gamma] {
        if s.len() != set.n {
            return Err(Error::DimensionMismatch { expected: set.n, found: s.len() });
        }
        // Spectrum sorts on construction; guard against hand-built values anyway.
        if s.values().windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("spectrum", "entries are not sorted non-increasing"));
        }
    }
    let (a, b, g) = (alpha.values(), beta.values(), gamma.values());
    let trace_gap = alpha.sum() + beta.sum() - gamma.sum();
    let margins = set.inequalities.iter().map(|q| q.margin(a, b, g)).collect();
    Ok(HornReport { trace_gap, margins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == r {
                out.push((1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect());
            }
        }
        out
    }

    /// `T^n_r` from the recursive definition, as `(I, J, K)`.
    fn horn_t(n: usize, r: usize) -> Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        let subs = subsets(n, r);
        for i in &subs {
            for j in &subs {
                for k in &subs {
                    let lhs: usize = i.iter().sum::<usize>() + j.iter().sum::<usize>();
                    if lhs != k.iter().sum::<usize>() + r * (r + 1) / 2 {
                        continue;
                    }
                    let ok = (1..r).all(|p| {
                        horn_t(r, p).iter().all(|(f, g, h)| {
                            let s: usize = f.iter().map(|&x| i[x - 1]).sum::<usize>()
                                + g.iter().map(|&x| j[x - 1]).sum::<usize>();
                            s <= h.iter().map(|&x| k[x - 1]).sum::<usize>() + p * (p + 1) / 2
                        })
                    });
                    if ok {
                        out.push((i.clone(), j.clone(), k.clone()));
                    }
                }
            }
        }
        out
    }

    fn complement(v: &[usize]) -> Vec<usize> {
        (1..=4).filter(|x| !v.contains(x)).collect()
    }

    #[test]
    fn counts() {
        let set = HornInequalitySet::order_four();
        for (r, n) in [(1, 10), (2, 21), (3, 10)] {
            assert_eq!(set.count(r, HornDirection::Upper), n);
            assert_eq!(set.count(r, HornDirection::Lower), n);
        }
    }

    #[test]
    fn upper_list_matches_recursive_definition() {
        let set = HornInequalitySet::order_four();
        for r in 1..4 {
            let listed: BTreeSet<_> = set
                .inequalities
                .iter()
                .filter(|q| q.direction == HornDirection::Upper && q.rank() == r)
                .map(|q| (q.i.clone(), q.j.clone(), q.k.clone()))
                .collect();
            let generated: BTreeSet<_> = horn_t(4, r).into_iter().collect();
            assert_eq!(listed, generated, "r={r}");
        }
    }

    #[test]
    fn lower_list_is_complement_of_upper() {
        let set = HornInequalitySet::order_four();
        let from_upper: BTreeSet<_> = set
            .inequalities
            .iter()
            .filter(|q| q.direction == HornDirection::Upper)
            .map(|q| (complement(&q.k), complement(&q.i), complement(&q.j)))
            .collect();
        let lower: BTreeSet<_> = set
            .inequalities
            .iter()
            .filter(|q| q.direction == HornDirection::Lower)
            .map(|q| (q.k.clone(), q.i.clone(), q.j.clone()))
            .collect();
        assert_eq!(from_upper, lower);
    }

    #[test]
    fn adding_zero() {
        let a = Spectrum::new(vec![0.6, 0.3, 0.1, 0.0]).unwrap();
        let z = Spectrum::new(vec![0.0; 4]).unwrap();
        let r = horn_check(&a, &z, &a).unwrap();
        assert!(r.passed());
        assert!(r.min_margin() >= 0.0);
    }

    #[test]
    fn detects_violation() {
        let a = Spectrum::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let g = Spectrum::new(vec![2.0, 0.0, 0.0, -1.0]).unwrap();
        let r = horn_check(&a, &a, &g).unwrap();
        assert!(!r.passed());
        assert!(horn_check(&a, &a, &Spectrum::new(vec![1.0; 3]).unwrap()).is_err());
    }
}
