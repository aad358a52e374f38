//! The trace distance ε between the test-round state σ_{B^Z E} and the
//! key-round state ρ_{B^Z E}.
//!
//! Under the orthogonal-ancilla attack structure the distance decomposes into
//! one block per Bob outcome `b`:
//!
//! ```text
//! ε = (1/2D) Σ_b ‖X_b‖₁,   X_b = Σ_{a≠a'} √(p(b|a) p(b|a')) |a><a'|
//! ```
//!
//! For depolarizing noise `X_b` has eigenvalue `-β` with multiplicity `D-2`
//! plus the two roots `λ±` of `λ² - (D-2)βλ - (D-1)αβ = 0`, where `α = 1-q`
//! and `β = q/(D-1)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::channels::{ChannelKind, ChannelModel};
use crate::math;
use crate::numerics::{hermitian_eigenvalues, HermitianMatrix};
use crate::{Error, Result};

/// Max deviation from the symmetric pattern tolerated before the closed form
/// is used for a depolarizing-labelled model.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonMethod {
    ClosedForm,
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonResult {
    pub epsilon: f64,
    /// `‖X_b‖₁` for each `b`.
    pub per_b_trace_norms: Vec<f64>,
    pub method: EpsilonMethod,
}

impl EpsilonResult {
    fn from_norms(norms: Vec<f64>, method: EpsilonMethod) -> Self {
        let d = norms.len() as f64;
        let epsilon = (norms.iter().sum::<f64>() / (2.0 * d)).clamp(0.0, 1.0);
        EpsilonResult { epsilon, per_b_trace_norms: norms, method }
    }
}

/// The three distinct eigenvalues `(λ+, -β, λ-)` of `X_b` for depolarizing
/// noise. `-β` has multiplicity `D-2`.
pub fn depolarizing_xb_eigenvalues(dim: usize, q: f64) -> Result<(f64, f64, f64)> {
    if dim < 2 {
        return Err(Error::Domain { what: "dimension", value: dim as f64 });
    }
    let limit = 1.0 - 1.0 / dim as f64;
    if !(q >= 0.0 && q < limit) {
        return Err(Error::Domain { what: "depolarizing noise q", value: q });
    }
    let d = dim as f64;
    let alpha = 1.0 - q;
    let beta = q / (d - 1.0);
    let root = math::sqrt(beta) * math::sqrt((d - 1.0) * (4.0 * alpha - 4.0 * beta) + beta * d * d);
    let plus = 0.5 * ((d - 2.0) * beta + root);
    let minus = 0.5 * ((d - 2.0) * beta - root);
    Ok((plus, -beta, minus))
}

/// Closed-form ε for a depolarizing channel.
pub fn epsilon_depolarizing(dim: usize, q: f64) -> Result<EpsilonResult> {
    let (plus, neg_beta, minus) = depolarizing_xb_eigenvalues(dim, q)?;
    let norm = (dim - 2) as f64 * math::abs(neg_beta) + math::abs(plus) + math::abs(minus);
    Ok(EpsilonResult::from_norms(vec![norm; dim], EpsilonMethod::ClosedForm))
}

/// `X_b` built in the computational basis.
pub fn xb_matrix(channel: &ChannelModel, b: usize) -> HermitianMatrix {
    let d = channel.dim();
    let amps: Vec<f64> = (0..d).map(|a| math::sqrt(channel.p(b, a))).collect();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|a| (0..d).map(|a2| if a == a2 { 0.0 } else { amps[a] * amps[a2] }).collect())
        .collect();
    HermitianMatrix::from_real_rows(&rows).expect("X_b is symmetric by construction")
}

/// ε from the eigenvalues of every `X_b`, for any channel.
pub fn epsilon_general(channel: &ChannelModel) -> Result<EpsilonResult> {
    let norms = (0..channel.dim())
        .map(|b| {
            let spec = hermitian_eigenvalues(&xb_matrix(channel, b))?;
            Ok(spec.values().iter().map(|v| math::abs(*v)).sum())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EpsilonResult::from_norms(norms, EpsilonMethod::General))
}

/// Closed form when the model is depolarizing and passes the symmetry test,
/// general algorithm otherwise.
pub fn epsilon(channel: &ChannelModel) -> Result<EpsilonResult> {
    if channel.kind() == ChannelKind::Depolarizing {
        if let Some(q) = channel.symmetric_noise(SYMMETRY_TOL) {
            return epsilon_depolarizing(channel.dim(), q);
        }
    }
    epsilon_general(channel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{amplitude_damping_channel, depolarizing_channel};

    #[test]
    fn noiseless_is_zero() {
        for d in 2..8 {
            assert_eq!(epsilon_depolarizing(d, 0.0).unwrap().epsilon, 0.0);
            let m = depolarizing_channel(d, 0.0).unwrap();
            assert_eq!(epsilon_general(&m).unwrap().epsilon, 0.0);
        }
    }

    #[test]
    fn qubit_closed_form() {
        for &q in &[0.001, 0.0185, 0.1, 0.3, 0.49] {
            let e = epsilon_depolarizing(2, q).unwrap().epsilon;
            assert!((e - (q * (1.0 - q)).sqrt()).abs() < 1e-15, "q={q}");
        }
        let e = epsilon_depolarizing(2, 0.0185).unwrap().epsilon;
        assert!((e - 0.1347506957310425).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_general() {
        for d in 2..10 {
            for i in 1..20 {
                let q = (1.0 - 1.0 / d as f64) * i as f64 / 20.0;
                let m = depolarizing_channel(d, q).unwrap();
                let a = epsilon_depolarizing(d, q).unwrap();
                let b = epsilon_general(&m).unwrap();
                assert!((a.epsilon - b.epsilon).abs() < 1e-10, "d={d} q={q}");
                assert_eq!(epsilon(&m).unwrap().method, EpsilonMethod::ClosedForm);
            }
        }
    }

    #[test]
    fn xb_eigenvalue_multiplicity() {
        for d in 3..9 {
            let q = 0.12;
            let m = depolarizing_channel(d, q).unwrap();
            let beta = q / (d - 1) as f64;
            let spec = hermitian_eigenvalues(&xb_matrix(&m, 0)).unwrap();
            let count = spec.values().iter().filter(|v| (**v + beta).abs() < 1e-8).count();
            assert_eq!(count, d - 2, "d={d}");
            let (plus, _, minus) = depolarizing_xb_eigenvalues(d, q).unwrap();
            assert!((spec.values()[0] - plus).abs() < 1e-12);
            assert!((spec.values()[d - 1] - minus).abs() < 1e-12);
        }
    }

    #[test]
    fn amplitude_damping_golden() {
        // Dense eigenvalues of each X_b computed independently (LAPACK eigvalsh).
        let m = amplitude_damping_channel(4, 0.1).unwrap();
        let e = epsilon(&m).unwrap();
        assert_eq!(e.method, EpsilonMethod::General);
        assert!((e.epsilon - 0.16419410907075055).abs() < 1e-12);
        let sum: f64 = e.per_b_trace_norms.iter().sum();
        assert!((e.epsilon - sum / 8.0).abs() < 1e-15);
    }

    #[test]
    fn range_errors() {
        assert!(epsilon_depolarizing(3, 1.0 - 1.0 / 3.0).is_err());
        assert!(epsilon_depolarizing(3, -1e-3).is_err());
    }
}
