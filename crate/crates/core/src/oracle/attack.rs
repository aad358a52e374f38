//! Explicit collective attacks consistent with a channel.
//!
//! Eve's ancilla for input `a` and Bob outcome `b` is
//!
//! ```text
//! |e_b^a> = √p(b|a) · |a> ⊗ |w_b^a>
//! ```
//!
//! in a space of dimension `D²`. The `|a>` factor makes vectors for different
//! inputs orthogonal; the unit vectors `|w_b^a>` are free and set the
//! overlaps between different outcomes of the same input.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::channels::ChannelModel;
use crate::math;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct AttackInstance {
    dim: usize,
    eve_dim: usize,
    /// Indexed `a * dim + b`.
    vectors: Vec<Vec<Complex64>>,
    channel: ChannelModel,
}

/// Worst deviations from the structural constraints on the ancilla vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackDiagnostics {
    /// `max |<e_b^a|e_b^a> - p(b|a)|`.
    pub norm: f64,
    /// `max |<e_b^a|e_b^a'>|` over `a ≠ a'`.
    pub cross_input: f64,
    /// `max_a |Σ_b <e_b^a|e_b^a> - 1|`.
    pub unitarity: f64,
}

impl AttackDiagnostics {
    pub fn max(&self) -> f64 {
        self.norm.max(self.cross_input).max(self.unitarity)
    }
}

impl AttackInstance {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eve_dim(&self) -> usize {
        self.eve_dim
    }

    pub fn channel(&self) -> &ChannelModel {
        &self.channel
    }

    /// `|e_b^a>`.
    pub fn vector(&self, a: usize, b: usize) -> &[Complex64] {
        &self.vectors[a * self.dim + b]
    }

    pub fn diagnostics(&self) -> AttackDiagnostics {
        let d = self.dim;
        let mut diag = AttackDiagnostics { norm: 0.0, cross_input: 0.0, unitarity: 0.0 };
        for a in 0..d {
            let mut total = 0.0;
            for b in 0..d {
                let n = inner(self.vector(a, b), self.vector(a, b)).re;
                total += n;
                diag.norm = diag.norm.max(math::abs(n - self.channel.p(b, a)));
                for a2 in (a + 1)..d {
                    let o = inner(self.vector(a, b), self.vector(a2, b)).norm();
                    diag.cross_input = diag.cross_input.max(o);
                }
            }
            diag.unitarity = diag.unitarity.max(math::abs(total - 1.0));
        }
        diag
    }
}

/// `<u|v>`.
pub(crate) fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits mapped into (0, 1].
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let r = math::sqrt(-2.0 * math::ln(unit_f64(rng)));
    let t = 2.0 * core::f64::consts::PI * unit_f64(rng);
    (r * math::cos(t), r * math::sin(t))
}

/// Haar-random unit vector in `C^n`.
pub(crate) fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| {
                let (re, im) = gaussian_pair(rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Generator for trial `stream` under master seed `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random attack with `|w_b^a>` drawn from `trial_rng(seed, 0)`.
pub fn build_attack(channel: &ChannelModel, seed: u64) -> AttackInstance {
    build_attack_with(channel, &mut trial_rng(seed, 0))
}

pub fn build_attack_with(channel: &ChannelModel, rng: &mut ChaCha8Rng) -> AttackInstance {
    let d = channel.dim();
    let mut vectors = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let w = random_unit_vector(rng, d);
            let amp = math::sqrt(channel.p(b, a));
            let mut e = vec![ZERO; d * d];
            for (k, wk) in w.iter().enumerate() {
                e[a * d + k] = wk * amp;
            }
            vectors.push(e);
        }
    }
    AttackInstance { dim: d, eve_dim: d * d, vectors, channel: channel.clone() }
}

/// Deterministic attack with `|e_b^a> = √p(b|a) |(a - b) mod D>`.
///
/// For qubit depolarizing noise this makes `Δ_E` reach its operator-norm
/// bound `√(q(1-q))` and gives `ρ_E` the spectrum `(1-q, q, 0, 0)`.
pub fn build_attack_aligned(channel: &ChannelModel) -> AttackInstance {
    let d = channel.dim();
    let mut vectors = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut e = vec![ZERO; d * d];
            e[(a + d - b) % d] = Complex64::new(math::sqrt(channel.p(b, a)), 0.0);
            vectors.push(e);
        }
    }
    AttackInstance { dim: d, eve_dim: d * d, vectors, channel: channel.clone() }
}
