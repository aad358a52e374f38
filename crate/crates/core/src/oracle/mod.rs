//! Ground truth by brute force.
//!
//! An [`AttackInstance`] fixes Eve's ancilla vectors explicitly. From them
//! the key-round state
//!
//! ```text
//! ρ_{B^Z E} = (1/D) Σ_{a,b} |b><b| ⊗ |e_b^a><e_b^a|
//! ```
//!
//! and the test-round state
//!
//! ```text
//! σ_{B^Z E} = (1/D) Σ_{a,a',b} |b><b| ⊗ |e_b^a><e_b^a'|
//! ```
//!
//! are built as dense matrices of order `D³`, and entropies, trace distances
//! and norms are computed from their spectra with no analytic shortcuts.

mod attack;
pub mod horn;
pub mod suite;

use alloc::vec::Vec;

pub use attack::{
    build_attack, build_attack_aligned, build_attack_with, trial_rng, AttackDiagnostics, AttackInstance,
};
pub use horn::{horn_check, HornDirection, HornInequality, HornInequalitySet, HornReport};

use num_complex::Complex64;

use crate::channels::ChannelKind;
use crate::numerics::{
    hermitian_eigenvalues, operator_norm, trace_distance, von_neumann_entropy, ComplexMatrix, HermitianMatrix, TOL,
};
use crate::{Error, Result};

/// `ρ_E^b = (1/D) Σ_a |e_b^a><e_b^a|` for each `b`.
pub fn rho_blocks(att: &AttackInstance) -> Vec<HermitianMatrix> {
    let d = att.dim();
    let s = 1.0 / d as f64;
    (0..d)
        .map(|b| {
            let mut m = HermitianMatrix::zeros(att.eve_dim());
            for a in 0..d {
                m.add_projector(att.vector(a, b), s);
            }
            m
        })
        .collect()
}

/// `σ_E^b = (1/D) |s_b><s_b|` with `|s_b> = Σ_a |e_b^a>`.
pub fn sigma_blocks(att: &AttackInstance) -> Vec<HermitianMatrix> {
    let d = att.dim();
    (0..d)
        .map(|b| {
            let mut s = alloc::vec![Complex64::new(0.0, 0.0); att.eve_dim()];
            for a in 0..d {
                for (x, y) in s.iter_mut().zip(att.vector(a, b)) {
                    *x += y;
                }
            }
            let mut m = HermitianMatrix::zeros(att.eve_dim());
            m.add_projector(&s, 1.0 / d as f64);
            m
        })
        .collect()
}

/// Block-diagonal matrix with `blocks` on the diagonal.
pub fn block_diagonal(blocks: &[HermitianMatrix]) -> HermitianMatrix {
    let sizes: Vec<usize> = blocks.iter().map(HermitianMatrix::dim).collect();
    let n: usize = sizes.iter().sum();
    let mut m = ComplexMatrix::zeros(n);
    let mut off = 0;
    for (blk, size) in blocks.iter().zip(sizes) {
        for i in 0..size {
            for j in 0..size {
                m.set(off + i, off + j, blk.get(i, j));
            }
        }
        off += size;
    }
    HermitianMatrix::new(m).expect("blocks are Hermitian")
}

pub fn rho_bze(att: &AttackInstance) -> HermitianMatrix {
    block_diagonal(&rho_blocks(att))
}

pub fn sigma_bze(att: &AttackInstance) -> HermitianMatrix {
    block_diagonal(&sigma_blocks(att))
}

/// `Tr_B` of a state on `C^{dim_b} ⊗ E`: the sum of the diagonal blocks.
pub fn partial_trace_b(state: &HermitianMatrix, dim_b: usize) -> Result<HermitianMatrix> {
    let n = state.dim();
    if dim_b == 0 || !n.is_multiple_of(dim_b) {
        return Err(Error::DimensionMismatch { expected: dim_b, found: n });
    }
    let e = n / dim_b;
    let m = ComplexMatrix::from_fn(e, |i, j| (0..dim_b).map(|b| state.get(b * e + i, b * e + j)).sum());
    HermitianMatrix::new(m)
}

/// `H(B|E) = H(BE) - H(E)` in bits, with `B` the first tensor factor of
/// dimension `dim_b`.
pub fn exact_conditional_entropy(state: &HermitianMatrix, dim_b: usize) -> Result<f64> {
    let reduced = partial_trace_b(state, dim_b)?;
    Ok(von_neumann_entropy(state)? - von_neumann_entropy(&reduced)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactDelta {
    pub h_rho: f64,
    pub h_sigma: f64,
    /// `|h_rho - h_sigma|`.
    pub delta: f64,
}

pub fn exact_delta(att: &AttackInstance) -> Result<ExactDelta> {
    let h_rho = exact_conditional_entropy(&rho_bze(att), att.dim())?;
    let h_sigma = exact_conditional_entropy(&sigma_bze(att), att.dim())?;
    Ok(ExactDelta { h_rho, h_sigma, delta: (h_rho - h_sigma).abs() })
}

/// `½‖σ_{B^Z E} - ρ_{B^Z E}‖₁` on the full matrices.
pub fn exact_epsilon(att: &AttackInstance) -> Result<f64> {
    trace_distance(&sigma_bze(att), &rho_bze(att))
}

fn require_qubit_depolarizing(att: &AttackInstance) -> Result<f64> {
    if att.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: att.dim() });
    }
    let c = att.channel();
    match c.symmetric_noise(TOL) {
        Some(q) if c.kind() == ChannelKind::Depolarizing => Ok(q),
        _ => Err(Error::invalid("attack channel", "requires a depolarizing channel")),
    }
}

/// `‖Δ_E‖_op` with `Δ_E = (1/D) Σ_b Σ_{a≠a'} |e_b^a><e_b^a'|`. Qubit
/// depolarizing attacks only.
pub fn delta_e_opnorm(att: &AttackInstance) -> Result<f64> {
    require_qubit_depolarizing(att)?;
    let d = att.dim();
    let mut m = HermitianMatrix::zeros(att.eve_dim());
    for b in 0..d {
        for a in 0..d {
            for a2 in (a + 1)..d {
                m.add_symmetrized_outer(att.vector(a, b), att.vector(a2, b), 1.0 / d as f64);
            }
        }
    }
    operator_norm(&m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRangeReport {
    pub q: f64,
    /// Spectrum of `ρ_E`, non-increasing.
    pub gamma: [f64; 4],
    /// `(lower, upper)` for each `γ_i`.
    pub ranges: [(f64, f64); 4],
    /// Indices (0-based) of eigenvalues outside their range by more than `TOL`.
    pub violations: Vec<usize>,
}

impl SpectralRangeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `(1-q)/2 ≤ γ₁ ≤ 1-q`, `q/2 ≤ γ₂ ≤ 1/2`, `0 ≤ γ₃ ≤ q`,
/// `0 ≤ γ₄ ≤ q/2` for the spectrum of `ρ_E`. Qubit depolarizing attacks only.
pub fn spectral_range_check(att: &AttackInstance) -> Result<SpectralRangeReport> {
    let q = require_qubit_depolarizing(att)?;
    let rho_e = partial_trace_b(&rho_bze(att), 2)?;
    let spec = hermitian_eigenvalues(&rho_e)?;
    let v = spec.values();
    let gamma = [v[0], v[1], v[2], v[3]];
    let ranges = [((1.0 - q) / 2.0, 1.0 - q), (q / 2.0, 0.5), (0.0, q), (0.0, q / 2.0)];
    let violations = (0..4)
        .filter(|&i| gamma[i] < ranges[i].0 - TOL || gamma[i] > ranges[i].1 + TOL)
        .collect();
    Ok(SpectralRangeReport { q, gamma, ranges, violations })
}

/// Second-largest eigenvalue of each `σ` block; all should vanish.
pub fn sigma_block_second_eigenvalues(att: &AttackInstance) -> Result<Vec<f64>> {
    sigma_blocks(att)
        .iter()
        .map(|blk| Ok(hermitian_eigenvalues(blk)?.values().get(1).copied().unwrap_or(0.0)))
        .collect()
}
