//! Continuity bounds on `Δ = |H(B^Z|E)_ρ - H(B^Z|E)_σ|`.
//!
//! Three curves are available:
//!
//! * [`winter_delta_bound`]: `ε log2 D + (1+ε) h(ε/(1+ε))`, valid everywhere.
//! * [`lemma_delta_bound`]: `h(1 - q - √(q(1-q)))`, valid for qubit
//!   depolarizing noise with `q ≤ 0.1464`.
//! * [`wilde_conjecture_curve`]: `ε log2(D_B - 1) + h(ε)`. Unproven, so it is
//!   always returned with `applicable = false` and never enters a key rate.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Upper end of the noise range on which [`lemma_delta_bound`] is proven.
pub const LEMMA_Q_MAX: f64 = 0.1464;

/// Largest noise accepted by [`verify_lemma_support`] in diagnostic mode.
pub const DIAGNOSTIC_Q_MAX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaKind {
    Winter,
    LemmaD2,
    WildeConjecture,
}

impl DeltaKind {
    pub fn name(self) -> &'static str {
        match self {
            DeltaKind::Winter => "winter",
            DeltaKind::LemmaD2 => "lemma_d2",
            DeltaKind::WildeConjecture => "wilde_conjecture",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBound {
    /// Bits.
    pub value: f64,
    pub kind: DeltaKind,
    /// When false the value must not be used in a key rate.
    pub applicable: bool,
}

/// Binary entropy with the argument clamped into `[0, 1]`.
pub(crate) fn h(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    math::xlog2x_neg(x) + math::xlog2x_neg(1.0 - x)
}

fn entropy4(p: [f64; 4]) -> f64 {
    p.iter().map(|&x| math::xlog2x_neg(x)).sum()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..=1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::Domain { what: "epsilon", value: epsilon })
    }
}

pub fn winter_delta_bound(epsilon: f64, dim: usize) -> Result<DeltaBound> {
    check_epsilon(epsilon)?;
    if dim < 2 {
        return Err(Error::Domain { what: "dimension", value: dim as f64 });
    }
    let value = epsilon * math::log2(dim as f64) + (1.0 + epsilon) * h(epsilon / (1.0 + epsilon));
    Ok(DeltaBound { value, kind: DeltaKind::Winter, applicable: true })
}

pub fn lemma_delta_bound(q: f64) -> DeltaBound {
    let s = math::sqrt((q * (1.0 - q)).max(0.0));
    DeltaBound {
        value: h(1.0 - q - s),
        kind: DeltaKind::LemmaD2,
        applicable: (0.0..=LEMMA_Q_MAX).contains(&q),
    }
}

pub fn wilde_conjecture_curve(epsilon: f64, dim_b: usize) -> Result<DeltaBound> {
    check_epsilon(epsilon)?;
    if dim_b < 2 {
        return Err(Error::Domain { what: "dimension", value: dim_b as f64 });
    }
    let value = epsilon * math::log2((dim_b - 1) as f64) + h(epsilon);
    Ok(DeltaBound { value, kind: DeltaKind::WildeConjecture, applicable: false })
}

/// Margins (left side minus right side) of the three inequalities behind the
/// qubit lemma at one noise value. A margin `≥ 0` means the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaSupportRow {
    pub q: f64,
    pub margins: [f64; 3],
}

impl LemmaSupportRow {
    pub fn holds(&self, index: usize) -> bool {
        self.margins[index] >= 0.0
    }

    pub fn all_hold(&self) -> bool {
        self.margins.iter().all(|m| *m >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LemmaSupportReport {
    pub rows: Vec<LemmaSupportRow>,
}

impl LemmaSupportReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(LemmaSupportRow::all_hold)
    }

    /// Number of grid points where inequality `index` fails.
    pub fn failures(&self, index: usize) -> usize {
        self.rows.iter().filter(|r| !r.holds(index)).count()
    }

    pub fn min_margin(&self, index: usize) -> f64 {
        self.rows.iter().map(|r| r.margins[index]).fold(f64::INFINITY, f64::min)
    }
}

fn support_row(q: f64) -> LemmaSupportRow {
    let s = math::sqrt(q * (1.0 - q));
    let hq = h(q);
    let maxmin = entropy4([1.0 - s, s - q, q / 2.0, q / 2.0]) - hq;
    let i = maxmin - (entropy4([(1.0 - q) / 2.0, (1.0 - q) / 2.0, q / 2.0, q / 2.0]) - hq - h((1.0 - q) / 2.0 - s));
    let lemma = h(1.0 - q - s);
    let ii = lemma - maxmin;
    let iii = lemma - (1.0 + hq - h(0.5 + s));
    LemmaSupportRow { q, margins: [i, ii, iii] }
}

/// Evaluates the three supporting inequalities on `q_grid`, which must lie in
/// `(0, 0.1464]`.
pub fn verify_lemma_support(q_grid: &[f64]) -> Result<LemmaSupportReport> {
    support_on(q_grid, LEMMA_Q_MAX)
}

/// Same as [`verify_lemma_support`] but accepts noise up to
/// [`DIAGNOSTIC_Q_MAX`], to probe where the inequalities stop holding.
pub fn verify_lemma_support_diagnostic(q_grid: &[f64]) -> Result<LemmaSupportReport> {
    support_on(q_grid, DIAGNOSTIC_Q_MAX)
}

fn support_on(q_grid: &[f64], q_max: f64) -> Result<LemmaSupportReport> {
    let rows = q_grid
        .iter()
        .map(|&q| {
            if q > 0.0 && q <= q_max {
                Ok(support_row(q))
            } else {
                Err(Error::Domain { what: "lemma support grid", value: q })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaSupportReport { rows })
}

/// `n` evenly spaced points in `(0, LEMMA_Q_MAX]`, ending at the maximum.
pub fn lemma_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| LEMMA_Q_MAX * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(q: f64) -> f64 {
        (q * (1.0 - q)).sqrt()
    }

    #[test]
    fn winter_examples() {
        assert_eq!(winter_delta_bound(0.0, 5).unwrap().value, 0.0);
        // 1·log2 2 + 2·h(1/2) = 3.
        assert!((winter_delta_bound(1.0, 2).unwrap().value - 3.0).abs() < 1e-15);
        let v = winter_delta_bound(eps(0.0185), 2).unwrap().value;
        assert!((v - 0.7313511552413141).abs() < 1e-12);
        assert!(winter_delta_bound(1.5, 2).is_err());
    }

    #[test]
    fn lemma_examples() {
        let b = lemma_delta_bound(0.0);
        assert_eq!(b.value, 0.0);
        assert!(b.applicable);
        let v = lemma_delta_bound(0.0239).value;
        assert!((v - h(1.0 - 0.0239 - eps(0.0239))).abs() < 1e-15);
        assert!((v - 0.6727).abs() < 1e-3);
        assert!(!lemma_delta_bound(0.2).applicable);
        assert!(lemma_delta_bound(LEMMA_Q_MAX).applicable);
    }

    #[test]
    fn wilde_examples() {
        let b = wilde_conjecture_curve(0.3, 2).unwrap();
        assert!((b.value - h(0.3)).abs() < 1e-15);
        assert!(!b.applicable);
        assert_eq!(wilde_conjecture_curve(0.0, 7).unwrap().value, 0.0);
    }

    #[test]
    fn ordering_on_grid() {
        for q in lemma_grid(1000) {
            let e = eps(q);
            let w = winter_delta_bound(e, 2).unwrap().value;
            let l = lemma_delta_bound(q).value;
            let c = wilde_conjecture_curve(e, 2).unwrap().value;
            assert!(w >= l && l >= c, "q={q}: {w} {l} {c}");
        }
        for i in 1..1000 {
            let q = 0.5 * i as f64 / 1000.0;
            let e = eps(q);
            assert!(wilde_conjecture_curve(e, 2).unwrap().value < winter_delta_bound(e, 2).unwrap().value);
        }
    }

    #[test]
    fn support_holds_on_range() {
        let r = verify_lemma_support(&lemma_grid(1000)).unwrap();
        assert!(r.all_hold());
        let edge = verify_lemma_support(&[0.01, LEMMA_Q_MAX]).unwrap();
        assert!(edge.all_hold());
        assert!(verify_lemma_support(&[0.2]).is_err());
        assert!(verify_lemma_support(&[0.0]).is_err());
    }

    #[test]
    fn support_range_is_tight() {
        let r = verify_lemma_support_diagnostic(&[0.2]).unwrap();
        assert!(!r.rows[0].holds(2));
        let r = verify_lemma_support_diagnostic(&[0.1465]).unwrap();
        assert!(!r.rows[0].holds(2));
    }
}
