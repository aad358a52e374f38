//! Channel models: Z-basis conditional probabilities `p(b|a)` and the
//! X-basis outcome distribution for the test state `|x_0>`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;
use crate::numerics::{ComplexMatrix, HermitianMatrix, ProbabilityDistribution, TOL};
use crate::{Error, Result};

/// Phase convention for the X (Fourier) basis `|x_a> = D^{-1/2} Σ_b ω^{ab} |b>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierConvention {
    /// `ω = exp(-2πi/D)`: the discrete Fourier transform.
    Standard,
    /// `ω = exp(-πi/D)`. Not an orthonormal basis for any `D >= 2`; kept so the
    /// difference can be demonstrated.
    HalfPhase,
}

pub const DEFAULT_FOURIER: FourierConvention = FourierConvention::Standard;

/// Which constructor produced a [`ChannelModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Depolarizing,
    AmplitudeDamping,
    Custom,
}

/// Observable statistics of a `D`-dimensional channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    dim: usize,
    /// `z_cond[b * dim + a] = p(b|a)`.
    z_cond: Vec<f64>,
    x_dist: ProbabilityDistribution,
    q_x: f64,
    label: String,
    kind: ChannelKind,
}

impl ChannelModel {
    /// Validates and builds a model from rows `z_rows[b][a] = p(b|a)` and the
    /// X-basis distribution for input `|x_0>`.
    pub fn new(z_rows: &[Vec<f64>], x_dist: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::with_kind(z_rows, x_dist, label.into(), ChannelKind::Custom)
    }

    fn with_kind(z_rows: &[Vec<f64>], x_dist: Vec<f64>, label: String, kind: ChannelKind) -> Result<Self> {
        let dim = z_rows.len();
        if dim < 2 {
            return Err(Error::invalid("dim", format!("{dim} is below 2")));
        }
        let mut z_cond = Vec::with_capacity(dim * dim);
        for (b, row) in z_rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(
                    format!("z_cond[{b}]"),
                    format!("has {} entries, expected {dim}", row.len()),
                ));
            }
            for (a, &p) in row.iter().enumerate() {
                if !p.is_finite() || !(-TOL..=1.0 + TOL).contains(&p) {
                    return Err(Error::invalid(format!("z_cond[{b}][{a}]"), format!("{p} is not in [0, 1]")));
                }
                z_cond.push(p.clamp(0.0, 1.0));
            }
        }
        for a in 0..dim {
            let total: f64 = (0..dim).map(|b| z_cond[b * dim + a]).sum();
            if math::abs(total - 1.0) > TOL {
                return Err(Error::invalid(format!("z_cond column {a}"), format!("sums to {total}, not 1")));
            }
        }
        if x_dist.len() != dim {
            return Err(Error::invalid("x_dist", format!("has {} entries, expected {dim}", x_dist.len())));
        }
        let x_dist = ProbabilityDistribution::new(x_dist).map_err(|e| match e {
            Error::Invalid { field, reason } => Error::Invalid { field: format!("x_dist: {field}"), reason },
            other => other,
        })?;
        let q_x = 1.0 - x_dist.probs()[0];
        Ok(ChannelModel { dim, z_cond, x_dist, q_x, label, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `p(b|a)`.
    #[inline]
    pub fn p(&self, b: usize, a: usize) -> f64 {
        self.z_cond[b * self.dim + a]
    }

    /// The distribution of Bob's Z outcome given Alice sent `|a>`.
    pub fn column(&self, a: usize) -> Vec<f64> {
        (0..self.dim).map(|b| self.p(b, a)).collect()
    }

    pub fn z_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|b| (0..self.dim).map(|a| self.p(b, a)).collect()).collect()
    }

    pub fn x_dist(&self) -> &ProbabilityDistribution {
        &self.x_dist
    }

    /// Probability of the outcome `I - |x_0><x_0|`.
    pub fn q_x(&self) -> f64 {
        self.q_x
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// If `p(a|a) = 1 - q` for every `a` and all off-diagonal entries equal
    /// `q/(D-1)`, within `tol`, returns `q`.
    pub fn symmetric_noise(&self, tol: f64) -> Option<f64> {
        let q = 1.0 - self.p(0, 0);
        let off = q / (self.dim - 1) as f64;
        for b in 0..self.dim {
            for a in 0..self.dim {
                let expected = if a == b { 1.0 - q } else { off };
                if math::abs(self.p(b, a) - expected) > tol {
                    return None;
                }
            }
        }
        Some(q)
    }
}

/// A set of Kraus operators `{E_i}` with `Σ E_i† E_i = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::invalid("kraus", "no operators given"));
        };
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (i, op) in operators.iter().enumerate() {
            if op.dim() != dim {
                return Err(Error::invalid(
                    format!("kraus[{i}]"),
                    format!("has dimension {}, expected {dim}", op.dim()),
                ));
            }
            sum = sum.try_add(&op.adjoint().try_mul(op)?)?;
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > TOL {
            return Err(Error::invalid(
                "kraus",
                format!("completeness violated: max |Σ E†E - I| = {deviation:e}"),
            ));
        }
        Ok(KrausSet { dim, operators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }
}

/// `|x_a>` in the computational basis.
pub fn fourier_state(dim: usize, a: usize, convention: FourierConvention) -> Vec<Complex64> {
    let factor = match convention {
        FourierConvention::Standard => 2.0,
        FourierConvention::HalfPhase => 1.0,
    };
    let norm = 1.0 / math::sqrt(dim as f64);
    (0..dim)
        .map(|b| {
            let phase = -factor * core::f64::consts::PI * ((a * b) % (2 * dim)) as f64 / dim as f64;
            Complex64::new(math::cos(phase) * norm, math::sin(phase) * norm)
        })
        .collect()
}

/// The unitary whose columns are the X-basis states.
pub fn fourier_matrix(dim: usize, convention: FourierConvention) -> ComplexMatrix {
    let cols: Vec<Vec<Complex64>> = (0..dim).map(|a| fourier_state(dim, a, convention)).collect();
    ComplexMatrix::from_fn(dim, |b, a| cols[a][b])
}

/// `ρ ↦ Σ E_i ρ E_i†`.
pub fn apply_channel(kraus: &KrausSet, rho: &HermitianMatrix) -> Result<HermitianMatrix> {
    if rho.dim() != kraus.dim {
        return Err(Error::DimensionMismatch { expected: kraus.dim, found: rho.dim() });
    }
    let mut out = ComplexMatrix::zeros(kraus.dim);
    for e in &kraus.operators {
        out = out.try_add(&e.try_mul(rho.as_matrix())?.try_mul(&e.adjoint())?)?;
    }
    HermitianMatrix::new(out)
}

/// Depolarizing channel `ω ↦ (1 - Dq/(D-1)) ω + q/(D-1) I`, for `0 <= q < 1 - 1/D`.
pub fn depolarizing_channel(dim: usize, q: f64) -> Result<ChannelModel> {
    check_depolarizing(dim, q)?;
    let off = q / (dim - 1) as f64;
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|b| (0..dim).map(|a| if a == b { 1.0 - q } else { off }).collect())
        .collect();
    let mut x = vec![off; dim];
    x[0] = 1.0 - q;
    ChannelModel::with_kind(&rows, x, format!("depolarizing(D={dim}, q={q})"), ChannelKind::Depolarizing)
}

fn check_depolarizing(dim: usize, q: f64) -> Result<()> {
    if dim < 2 {
        return Err(Error::Domain { what: "dimension", value: dim as f64 });
    }
    let limit = 1.0 - 1.0 / dim as f64;
    if !(q >= 0.0 && q < limit) {
        return Err(Error::Domain { what: "depolarizing noise q", value: q });
    }
    Ok(())
}

/// A Kraus representation of the depolarizing channel built from the
/// Weyl-Heisenberg operators `X^j Z^k`.
pub fn depolarizing_kraus(dim: usize, q: f64) -> Result<KrausSet> {
    check_depolarizing(dim, q)?;
    let d = dim as f64;
    // (1 - λ) ω + λ I/D with λ = Dq/(D-1); the full twirl gives I/D.
    let lambda = d * q / (d - 1.0);
    let mut ops = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        for k in 0..dim {
            let weight = if j == 0 && k == 0 { 1.0 - lambda + lambda / (d * d) } else { lambda / (d * d) };
            if weight == 0.0 {
                continue;
            }
            let amp = math::sqrt(weight);
            // X^j Z^k |m> = ω^{km} |m + j>
            ops.push(ComplexMatrix::from_fn(dim, |row, col| {
                if row == (col + j) % dim {
                    let phase = 2.0 * core::f64::consts::PI * ((k * col) % dim) as f64 / d;
                    Complex64::new(math::cos(phase) * amp, math::sin(phase) * amp)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }));
        }
    }
    KrausSet::new(ops)
}

/// Amplitude damping: `E_0 = diag(1, √(1-p), …)`, `E_k = √p |0><k|` for `k >= 1`.
pub fn amplitude_damping_kraus(dim: usize, p: f64) -> Result<KrausSet> {
    if dim < 2 {
        return Err(Error::Domain { what: "dimension", value: dim as f64 });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain { what: "amplitude damping p", value: p });
    }
    let keep = math::sqrt(1.0 - p);
    let decay = math::sqrt(p);
    let mut ops = Vec::with_capacity(dim);
    ops.push(ComplexMatrix::from_fn(dim, |i, j| match (i, j) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (i, j) if i == j => Complex64::new(keep, 0.0),
        _ => Complex64::new(0.0, 0.0),
    }));
    for k in 1..dim {
        ops.push(ComplexMatrix::from_fn(dim, |i, j| {
            if i == 0 && j == k {
                Complex64::new(decay, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }));
    }
    KrausSet::new(ops)
}

pub fn amplitude_damping_channel(dim: usize, p: f64) -> Result<ChannelModel> {
    let kraus = amplitude_damping_kraus(dim, p)?;
    let mut model = channel_from_kraus(&kraus)?;
    model.kind = ChannelKind::AmplitudeDamping;
    model.label = format!("amplitude-damping(D={dim}, p={p})");
    Ok(model)
}

/// Round-off left by the change to the Fourier basis is a few ulps; values
/// that close to 0 or 1 are set exactly so a noiseless channel has zero
/// entropy.
fn snap(v: f64) -> f64 {
    const SNAP: f64 = 64.0 * f64::EPSILON;
    if math::abs(v) < SNAP {
        0.0
    } else if math::abs(v - 1.0) < SNAP {
        1.0
    } else {
        v
    }
}

/// Derives the channel statistics from a Kraus set with the default Fourier
/// convention.
pub fn channel_from_kraus(kraus: &KrausSet) -> Result<ChannelModel> {
    channel_from_kraus_with(kraus, DEFAULT_FOURIER)
}

/// `p(b|a) = <b|ℰ(|a><a|)|b>` and `x_dist[i] = <x_i|ℰ(|x_0><x_0|)|x_i>`.
pub fn channel_from_kraus_with(kraus: &KrausSet, convention: FourierConvention) -> Result<ChannelModel> {
    let dim = kraus.dim;
    let mut rows = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        let mut basis = vec![0.0; dim];
        basis[a] = 1.0;
        let out = apply_channel(kraus, &HermitianMatrix::diagonal(&basis))?;
        for (b, row) in rows.iter_mut().enumerate() {
            row[a] = out.get(b, b).re;
        }
    }
    let x0 = fourier_state(dim, 0, convention);
    let out = apply_channel(kraus, &HermitianMatrix::projector(&x0))?;
    let x_dist: Vec<f64> = (0..dim)
        .map(|i| {
            let xi = fourier_state(dim, i, convention);
            let v = out.as_matrix().mul_vec(&xi);
            snap(xi.iter().zip(&v).map(|(l, r)| l.conj() * r).sum::<Complex64>().re)
        })
        .collect();
    ChannelModel::with_kind(&rows, x_dist, String::from("kraus"), ChannelKind::Custom)
}
