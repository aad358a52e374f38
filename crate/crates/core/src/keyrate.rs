//! Key-rate assembly, noise tolerances and sweeps.
//!
//! ```text
//! K ≥ log2 D - Δ - H(B^X) - leak_EC
//! ```
//!
//! `H(B^X)` is the Shannon entropy of the full X-basis outcome distribution
//! in [`Mode::Full`] and `H_D(Q_X) log2 D` in [`Mode::Partial`]. Rates are
//! reported unclamped; a negative value simply means no key.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::bounds::{self, DeltaKind, LEMMA_Q_MAX};
use crate::channels::{amplitude_damping_channel, depolarizing_channel, ChannelKind, ChannelModel};
use crate::math;
use crate::numerics::{d_ary_entropy, shannon_entropy, ProbabilityDistribution};
use crate::tracedist;
use crate::{Error, Result};

/// Step of the coarse scan that brackets the first zero crossing.
pub const SCAN_STEP: f64 = 1e-3;

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    Partial,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Partial => "partial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSelector {
    Winter,
    LemmaD2,
    /// Smallest applicable Δ bound at each noise value.
    Best,
}

impl BoundSelector {
    pub fn name(self) -> &'static str {
        match self {
            BoundSelector::Winter => "winter",
            BoundSelector::LemmaD2 => "lemma_d2",
            BoundSelector::Best => "best",
        }
    }
}

pub type ChannelFactory = dyn Fn(usize, f64) -> Result<ChannelModel> + Send + Sync;

#[derive(Clone)]
pub enum ChannelFamily {
    Depolarizing,
    AmplitudeDamping,
    /// A user-supplied map from `(D, noise)` to a channel, valid for noise in
    /// `[0, limit]`.
    Custom { name: String, limit: f64, factory: Arc<ChannelFactory> },
}

impl ChannelFamily {
    pub fn custom<F>(name: impl Into<String>, limit: f64, factory: F) -> Self
    where
        F: Fn(usize, f64) -> Result<ChannelModel> + Send + Sync + 'static,
    {
        ChannelFamily::Custom { name: name.into(), limit, factory: Arc::new(factory) }
    }

    /// A family that ignores the noise argument and always returns `model`.
    pub fn fixed(model: ChannelModel) -> Self {
        let name = String::from(model.label());
        Self::custom(name, 0.0, move |_, _| Ok(model.clone()))
    }

    pub fn name(&self) -> &str {
        match self {
            ChannelFamily::Depolarizing => "depolarizing",
            ChannelFamily::AmplitudeDamping => "amplitude_damping",
            ChannelFamily::Custom { name, .. } => name,
        }
    }

    /// Supremum of the valid noise range. Depolarizing excludes it.
    pub fn noise_limit(&self, dim: usize) -> f64 {
        match self {
            ChannelFamily::Depolarizing => 1.0 - 1.0 / dim as f64,
            ChannelFamily::AmplitudeDamping => 1.0,
            ChannelFamily::Custom { limit, .. } => *limit,
        }
    }

    fn limit_inclusive(&self) -> bool {
        !matches!(self, ChannelFamily::Depolarizing)
    }

    pub fn channel(&self, dim: usize, noise: f64) -> Result<ChannelModel> {
        match self {
            ChannelFamily::Depolarizing => depolarizing_channel(dim, noise),
            ChannelFamily::AmplitudeDamping => amplitude_damping_channel(dim, noise),
            ChannelFamily::Custom { limit, factory, .. } => {
                if !(0.0..=*limit).contains(&noise) {
                    return Err(Error::Domain { what: "noise", value: noise });
                }
                let c = factory(dim, noise)?;
                if c.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
                }
                Ok(c)
            }
        }
    }
}

impl fmt::Debug for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    dim: usize,
    mode: Mode,
    bound: BoundSelector,
    family: ChannelFamily,
}

impl ProtocolConfig {
    pub fn new(dim: usize, mode: Mode, bound: BoundSelector, family: ChannelFamily) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain { what: "dimension", value: dim as f64 });
        }
        if bound == BoundSelector::LemmaD2 && !(dim == 2 && matches!(family, ChannelFamily::Depolarizing)) {
            return Err(Error::invalid("bound", "lemma_d2 requires D = 2 and the depolarizing family"));
        }
        Ok(ProtocolConfig { dim, mode, bound, family })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn bound(&self) -> BoundSelector {
        self.bound
    }

    pub fn family(&self) -> &ChannelFamily {
        &self.family
    }

    fn lemma_eligible(&self) -> bool {
        self.dim == 2 && matches!(self.family, ChannelFamily::Depolarizing)
    }

    /// Upper end of the noise range scanned by [`noise_tolerance`].
    pub fn scan_limit(&self) -> f64 {
        match self.bound {
            BoundSelector::LemmaD2 => LEMMA_Q_MAX,
            _ => self.family.noise_limit(self.dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyRateReport {
    pub noise: f64,
    pub epsilon: f64,
    pub delta_bound: f64,
    pub hbx_term: f64,
    pub leak_ec: f64,
    /// Bits per sifted signal; may be negative.
    pub key_rate: f64,
    pub bound_used: DeltaKind,
}

impl KeyRateReport {
    pub fn positive(&self) -> bool {
        self.key_rate > 0.0
    }
}

/// `H(B^Z|A^Z)` with uniform input: the mean entropy of the columns of
/// `p(b|a)`.
pub fn leak_ec(c: &ChannelModel) -> f64 {
    let d = c.dim();
    let total: f64 = (0..d)
        .map(|a| c.column(a).into_iter().map(math::xlog2x_neg).sum::<f64>())
        .sum();
    total / d as f64
}

pub fn hbx_full(c: &ChannelModel) -> f64 {
    shannon_entropy(c.x_dist())
}

pub fn hbx_partial(c: &ChannelModel) -> f64 {
    let d = c.dim();
    let h = d_ary_entropy(c.q_x().clamp(0.0, 1.0), d).expect("q_x is clamped into [0, 1]");
    h * math::log2(d as f64)
}

fn hbx(c: &ChannelModel, mode: Mode) -> f64 {
    match mode {
        Mode::Full => hbx_full(c),
        Mode::Partial => hbx_partial(c),
    }
}

fn delta(cfg: &ProtocolConfig, noise: f64, epsilon: f64) -> Result<(f64, DeltaKind)> {
    let winter = || bounds::winter_delta_bound(epsilon, cfg.dim).map(|b| (b.value, b.kind));
    match cfg.bound {
        BoundSelector::Winter => winter(),
        BoundSelector::LemmaD2 => {
            let b = bounds::lemma_delta_bound(noise);
            if b.applicable {
                Ok((b.value, b.kind))
            } else {
                Err(Error::BoundNotApplicable { noise })
            }
        }
        BoundSelector::Best => {
            let w = winter()?;
            if cfg.lemma_eligible() {
                let l = bounds::lemma_delta_bound(noise);
                if l.applicable && l.value < w.0 {
                    return Ok((l.value, l.kind));
                }
            }
            Ok(w)
        }
    }
}

/// Key rate for an already-built channel. `noise` is recorded in the report
/// and drives the qubit lemma when selected.
pub fn key_rate_for_channel(cfg: &ProtocolConfig, c: &ChannelModel, noise: f64) -> Result<KeyRateReport> {
    if c.dim() != cfg.dim {
        return Err(Error::DimensionMismatch { expected: cfg.dim, found: c.dim() });
    }
    let epsilon = tracedist::epsilon(c)?.epsilon;
    let (delta_bound, bound_used) = delta(cfg, noise, epsilon)?;
    let hbx_term = hbx(c, cfg.mode);
    let leak = leak_ec(c);
    let key_rate = math::log2(cfg.dim as f64) - delta_bound - hbx_term - leak;
    Ok(KeyRateReport { noise, epsilon, delta_bound, hbx_term, leak_ec: leak, key_rate, bound_used })
}

pub fn key_rate(cfg: &ProtocolConfig, noise: f64) -> Result<KeyRateReport> {
    let c = cfg.family.channel(cfg.dim, noise)?;
    key_rate_for_channel(cfg, &c, noise)
}

/// `1 - 2h(q) - h(1 - q - √(q(1-q)))`, defined for `0 ≤ q ≤ 0.1464`.
pub fn improved_key_rate_d2(q: f64) -> Result<f64> {
    let b = bounds::lemma_delta_bound(q);
    if !b.applicable {
        return Err(Error::BoundNotApplicable { noise: q });
    }
    Ok(1.0 - 2.0 * bounds::h(q) - b.value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceResult {
    /// Midpoint of the final bracket; 0 when the rate is not positive at zero
    /// noise.
    pub noise: f64,
    pub bracket: (f64, f64),
    /// False when the rate is already non-positive at zero noise.
    pub positive_at_zero: bool,
    /// The coarse scan saw the rate turn positive again after the first
    /// crossing.
    pub multiple_crossings: bool,
    pub scan_points: usize,
    pub bisection_steps: usize,
}

/// Largest noise before the first zero crossing of the key rate.
pub fn noise_tolerance(cfg: &ProtocolConfig) -> Result<ToleranceResult> {
    let rate = |noise: f64| key_rate(cfg, noise).map(|r| r.key_rate);
    if rate(0.0)? <= 0.0 {
        return Ok(ToleranceResult {
            noise: 0.0,
            bracket: (0.0, 0.0),
            positive_at_zero: false,
            multiple_crossings: false,
            scan_points: 1,
            bisection_steps: 0,
        });
    }

    let limit = cfg.scan_limit();
    let inclusive = cfg.bound == BoundSelector::LemmaD2 || cfg.family.limit_inclusive();
    // Last scan point, nudged inside an open upper end.
    let last = if inclusive { limit } else { limit - SCAN_STEP * 1e-3 };
    let mut grid = Vec::new();
    let mut k = 1usize;
    while (k as f64) * SCAN_STEP < last {
        grid.push(k as f64 * SCAN_STEP);
        k += 1;
    }
    grid.push(last);

    let mut lo = 0.0;
    let mut hi = None;
    let mut points = 1;
    let mut idx = 0;
    while idx < grid.len() {
        points += 1;
        if rate(grid[idx])? <= 0.0 {
            hi = Some(grid[idx]);
            break;
        }
        lo = grid[idx];
        idx += 1;
    }
    let Some(mut hi) = hi else {
        return Err(Error::NoSignChange { limit });
    };

    let mut multiple_crossings = false;
    for &x in &grid[idx + 1..] {
        points += 1;
        if rate(x)? > 0.0 {
            multiple_crossings = true;
            break;
        }
    }

    let mut steps = 0;
    while hi - lo >= BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if rate(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok(ToleranceResult {
        noise: 0.5 * (lo + hi),
        bracket: (lo, hi),
        positive_at_zero: true,
        multiple_crossings,
        scan_points: points,
        bisection_steps: steps,
    })
}

/// One report per grid point, in grid order. Failures stay in place.
pub fn sweep(cfg: &ProtocolConfig, noise_grid: &[f64]) -> Vec<Result<KeyRateReport>> {
    noise_grid.iter().map(|&n| key_rate(cfg, n)).collect()
}

/// Shannon entropy of a column, exposed for callers that want the per-input
/// breakdown of [`leak_ec`].
pub fn column_entropy(c: &ChannelModel, a: usize) -> Result<f64> {
    Ok(shannon_entropy(&ProbabilityDistribution::new(c.column(a))?))
}

/// Whether the channel carries the symmetric depolarizing pattern.
pub fn is_symmetric_depolarizing(c: &ChannelModel) -> bool {
    c.kind() == ChannelKind::Depolarizing && c.symmetric_noise(tracedist::SYMMETRY_TOL).is_some()
}
