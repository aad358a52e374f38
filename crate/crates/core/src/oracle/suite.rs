//! Randomised verification of the analytic formulas against the oracle.
//!
//! The work is split into independent [`Case`]s so a caller can run them in
//! any order or in parallel and then fold the outcomes with [`summarize`].
//! Every case owns its generator, derived from the master seed and the case
//! index, so results do not depend on scheduling.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use super::attack::random_unit_vector;
use super::{
    build_attack_aligned, build_attack_with, delta_e_opnorm, exact_delta, exact_epsilon, horn_check,
    sigma_block_second_eigenvalues, spectral_range_check, trial_rng, AttackInstance,
};
use crate::bounds::{self, LEMMA_Q_MAX};
use crate::channels::{amplitude_damping_channel, depolarizing_channel, ChannelModel};
use crate::numerics::{hermitian_eigenvalues, ComplexMatrix, HermitianMatrix};
use crate::tracedist;
use crate::{Error, Result};

/// Slack allowed on ε agreement and on `Δ ≤ bound`.
pub const ORACLE_SLACK: f64 = 1e-8;
/// Slack for the qubit operator-norm lemma.
pub const OPNORM_SLACK: f64 = 1e-10;
/// Ancilla constraints must hold to this precision.
pub const INVARIANT_TOL: f64 = 1e-12;
/// Threshold on the second eigenvalue of a `σ` block.
pub const RANK_TOL: f64 = 1e-9;
/// Horn margins may dip this far below zero from round-off.
pub const HORN_TOL: f64 = 1e-9;
/// Grid size for the lemma support inequalities.
pub const LEMMA_GRID_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OracleFamily {
    Depolarizing,
    AmplitudeDamping,
}

impl OracleFamily {
    pub fn name(self) -> &'static str {
        match self {
            OracleFamily::Depolarizing => "depolarizing",
            OracleFamily::AmplitudeDamping => "amplitude_damping",
        }
    }

    pub fn channel(self, dim: usize, noise: f64) -> Result<ChannelModel> {
        match self {
            OracleFamily::Depolarizing => depolarizing_channel(dim, noise),
            OracleFamily::AmplitudeDamping => amplitude_damping_channel(dim, noise),
        }
    }

    fn index(self) -> u64 {
        match self {
            OracleFamily::Depolarizing => 0,
            OracleFamily::AmplitudeDamping => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    AttackInvariants,
    ExactEpsilon,
    DeltaWinter,
    DeltaLemma,
    SigmaRankOne,
    OperatorNorm,
    SpectralRange,
    Horn,
    LemmaSupport,
    LemmaTightness,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::AttackInvariants,
        Check::ExactEpsilon,
        Check::DeltaWinter,
        Check::DeltaLemma,
        Check::SigmaRankOne,
        Check::OperatorNorm,
        Check::SpectralRange,
        Check::Horn,
        Check::LemmaSupport,
        Check::LemmaTightness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::AttackInvariants => "attack-invariants",
            Check::ExactEpsilon => "exact-epsilon",
            Check::DeltaWinter => "delta-winter",
            Check::DeltaLemma => "delta-lemma",
            Check::SigmaRankOne => "sigma-rank-one",
            Check::OperatorNorm => "operator-norm",
            Check::SpectralRange => "spectral-range",
            Check::Horn => "horn",
            Check::LemmaSupport => "lemma-support",
            Check::LemmaTightness => "lemma-tightness",
        }
    }
}

/// One evaluated property. `excess` is how far the quantity went past its
/// limit: `≤ 0` passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub check: Check,
    pub excess: f64,
}

impl Record {
    fn new(check: Check, value: f64, limit: f64) -> Self {
        Record { check, excess: value - limit }
    }

    pub fn passed(&self) -> bool {
        self.excess <= 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random attacks per (dimension, family).
    pub trials: usize,
    pub dims: Vec<usize>,
    pub families: Vec<OracleFamily>,
    /// Random Hermitian pairs for the Horn check.
    pub horn_pairs: usize,
}

impl VerifyOptions {
    /// Dimensions 2 to 6, both families, `20 × trials` Horn pairs.
    pub fn new(seed: u64, trials: usize) -> Self {
        VerifyOptions {
            seed,
            trials,
            dims: vec![2, 3, 4, 5, 6],
            families: vec![OracleFamily::Depolarizing, OracleFamily::AmplitudeDamping],
            horn_pairs: 20 * trials,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Case {
    Attack { dim: usize, family: OracleFamily, trial: usize },
    Aligned { dim: usize, family: OracleFamily },
    HornPair { trial: usize },
    LemmaSupport,
}

/// Every case implied by `opts`, in a fixed order. Empty when `trials` is 0.
pub fn cases(opts: &VerifyOptions) -> Vec<Case> {
    let mut out = Vec::new();
    if opts.trials == 0 {
        return out;
    }
    for &dim in &opts.dims {
        for &family in &opts.families {
            out.push(Case::Aligned { dim, family });
            for trial in 0..opts.trials {
                out.push(Case::Attack { dim, family, trial });
            }
        }
    }
    for trial in 0..opts.horn_pairs {
        out.push(Case::HornPair { trial });
    }
    out.push(Case::LemmaSupport);
    out
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn stream(case: &Case) -> u64 {
    match *case {
        Case::Attack { dim, family, trial } => ((trial as u64) << 16) | ((dim as u64) << 1) | family.index(),
        Case::HornPair { trial } => (1 << 62) | trial as u64,
        Case::Aligned { .. } | Case::LemmaSupport => 0,
    }
}

/// Noise for a random trial. Even qubit depolarizing trials stay inside the
/// lemma's range so that bound gets exercised.
fn draw_noise(rng: &mut ChaCha8Rng, dim: usize, family: OracleFamily, trial: usize) -> f64 {
    let u = unit_f64(rng);
    match family {
        OracleFamily::Depolarizing if dim == 2 && trial.is_multiple_of(2) => LEMMA_Q_MAX * u,
        OracleFamily::Depolarizing => (1.0 - 1.0 / dim as f64) * 0.999 * u,
        OracleFamily::AmplitudeDamping => u,
    }
}

fn aligned_noise(dim: usize, family: OracleFamily) -> f64 {
    match family {
        OracleFamily::Depolarizing if dim == 2 => 0.1,
        OracleFamily::Depolarizing => 0.5 * (1.0 - 1.0 / dim as f64),
        OracleFamily::AmplitudeDamping => 0.3,
    }
}

fn attack_records(att: &AttackInstance, noise: f64, family: OracleFamily, out: &mut Vec<Record>) -> Result<()> {
    let dim = att.dim();
    out.push(Record::new(Check::AttackInvariants, att.diagnostics().max(), INVARIANT_TOL));

    let analytic = tracedist::epsilon(att.channel())?.epsilon;
    let exact = exact_epsilon(att)?;
    out.push(Record::new(Check::ExactEpsilon, (exact - analytic).abs(), ORACLE_SLACK));

    let delta = exact_delta(att)?.delta;
    let winter = bounds::winter_delta_bound(analytic, dim)?.value;
    out.push(Record::new(Check::DeltaWinter, delta, winter + ORACLE_SLACK));

    for second in sigma_block_second_eigenvalues(att)? {
        out.push(Record::new(Check::SigmaRankOne, second.abs(), RANK_TOL));
    }

    if dim == 2 && family == OracleFamily::Depolarizing {
        let lemma = bounds::lemma_delta_bound(noise);
        if lemma.applicable {
            out.push(Record::new(Check::DeltaLemma, delta, lemma.value + ORACLE_SLACK));
        }
        let limit = libm::sqrt(noise * (1.0 - noise));
        out.push(Record::new(Check::OperatorNorm, delta_e_opnorm(att)?, limit + OPNORM_SLACK));
        let sr = spectral_range_check(att)?;
        let worst = (0..4)
            .map(|i| (sr.ranges[i].0 - sr.gamma[i]).max(sr.gamma[i] - sr.ranges[i].1))
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(Record::new(Check::SpectralRange, worst, crate::numerics::TOL));
    }
    Ok(())
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        let v = random_unit_vector(rng, n);
        m.set(i, i, Complex64::new(v[0].re * 2.0, 0.0));
        for j in (i + 1)..n {
            m.set(i, j, v[j] * 2.0);
            m.set(j, i, (v[j] * 2.0).conj());
        }
    }
    HermitianMatrix::new(m).expect("constructed Hermitian")
}

/// Evaluates one case.
pub fn run_case(opts: &VerifyOptions, case: &Case) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    let mut rng = trial_rng(opts.seed, stream(case));
    match *case {
        Case::Attack { dim, family, trial } => {
            let noise = draw_noise(&mut rng, dim, family, trial);
            let att = build_attack_with(&family.channel(dim, noise)?, &mut rng);
            attack_records(&att, noise, family, &mut out)?;
        }
        Case::Aligned { dim, family } => {
            let noise = aligned_noise(dim, family);
            let att = build_attack_aligned(&family.channel(dim, noise)?);
            attack_records(&att, noise, family, &mut out)?;
        }
        Case::HornPair { .. } => {
            let a = random_hermitian(&mut rng, 4);
            let b = random_hermitian(&mut rng, 4);
            let report = horn_check(
                &hermitian_eigenvalues(&a)?,
                &hermitian_eigenvalues(&b)?,
                &hermitian_eigenvalues(&a.try_add(&b)?)?,
            )?;
            let worst = (-report.min_margin()).max(report.trace_gap.abs());
            out.push(Record::new(Check::Horn, worst, HORN_TOL));
        }
        Case::LemmaSupport => {
            let report = bounds::verify_lemma_support(&bounds::lemma_grid(LEMMA_GRID_POINTS))?;
            for row in &report.rows {
                let worst = row.margins.iter().fold(f64::INFINITY, |m, x| m.min(*x));
                out.push(Record::new(Check::LemmaSupport, -worst, 0.0));
            }
            // Past the range, inequality (iii) must fail somewhere.
            let beyond: Vec<f64> = (1..=100).map(|i| LEMMA_Q_MAX + (0.5 - LEMMA_Q_MAX) * i as f64 / 101.0).collect();
            let diag = bounds::verify_lemma_support_diagnostic(&beyond)?;
            let fails = diag.failures(2);
            out.push(Record::new(Check::LemmaTightness, if fails > 0 { 0.0 } else { 1.0 }, 0.0));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSummary {
    pub check: Check,
    pub total: usize,
    pub failures: usize,
    /// Largest `excess` seen; negative when every record passed.
    pub worst_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub summaries: Vec<CheckSummary>,
    /// Cases that raised an error, with the error.
    pub errors: Vec<(Case, Error)>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.summaries.iter().all(|s| s.failures == 0)
    }

    pub fn summary(&self, check: Check) -> Option<&CheckSummary> {
        self.summaries.iter().find(|s| s.check == check)
    }
}

/// Folds per-case outcomes (in case order) into per-check counts.
pub fn summarize(cases: &[Case], outcomes: Vec<Result<Vec<Record>>>) -> VerifyReport {
    let mut report = VerifyReport::default();
    if cases.is_empty() {
        report.warnings.push(String::from("no trials requested; nothing was checked"));
    }
    let mut acc: Vec<CheckSummary> = Check::ALL
        .iter()
        .map(|&check| CheckSummary { check, total: 0, failures: 0, worst_excess: f64::NEG_INFINITY })
        .collect();
    for (case, outcome) in cases.iter().zip(outcomes) {
        match outcome {
            Ok(records) => {
                for r in records {
                    let s = &mut acc[r.check as usize];
                    s.total += 1;
                    s.failures += usize::from(!r.passed());
                    s.worst_excess = s.worst_excess.max(r.excess);
                }
            }
            Err(e) => report.errors.push((*case, e)),
        }
    }
    report.summaries = acc.into_iter().filter(|s| s.total > 0).collect();
    report
}

/// Runs every case sequentially.
pub fn run_suite(opts: &VerifyOptions) -> VerifyReport {
    let cs = cases(opts);
    let outcomes = cs.iter().map(|c| run_case(opts, c)).collect();
    summarize(&cs, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let mut opts = VerifyOptions::new(7, 2);
        opts.dims = vec![2, 3];
        let r = run_suite(&opts);
        assert!(r.passed(), "{r:?}");
        for check in Check::ALL {
            assert!(r.summary(check).is_some(), "{}", check.name());
        }
    }

    #[test]
    fn zero_trials_warns() {
        let r = run_suite(&VerifyOptions::new(1, 0));
        assert!(r.passed());
        assert_eq!(r.warnings.len(), 1);
        assert!(r.summaries.is_empty());
    }

    #[test]
    fn deterministic() {
        let mut opts = VerifyOptions::new(3, 1);
        opts.dims = vec![2];
        assert_eq!(run_suite(&opts), run_suite(&opts));
    }
}
