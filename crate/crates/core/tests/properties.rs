use num_complex::Complex64;
use proptest::prelude::*;

use qkdkr_core::bounds::{lemma_delta_bound, winter_delta_bound, LEMMA_Q_MAX};
use qkdkr_core::channels::{
    amplitude_damping_channel, amplitude_damping_kraus, apply_channel, channel_from_kraus, depolarizing_channel,
    ChannelModel,
};
use qkdkr_core::keyrate::{key_rate, BoundSelector, ChannelFamily, Mode, ProtocolConfig};
use qkdkr_core::numerics::{
    hermitian_eigenvalues, shannon_entropy, trace_distance, von_neumann_entropy, ComplexMatrix, HermitianMatrix,
    ProbabilityDistribution,
};
use qkdkr_core::oracle::{
    build_attack, exact_delta, exact_epsilon, sigma_block_second_eigenvalues, AttackInstance,
};
use qkdkr_core::tracedist::{epsilon, epsilon_depolarizing};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
        let m = ComplexMatrix::from_fn(n, |i, j| {
            let (lo, hi) = (i.min(j), i.max(j));
            let re = v[2 * (lo * n + hi)];
            let im = if i == j { 0.0 } else { v[2 * (lo * n + hi) + 1] };
            if i <= j {
                c(re, im)
            } else {
                c(re, -im)
            }
        });
        HermitianMatrix::new(m).unwrap()
    })
}

fn density(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
        let a = ComplexMatrix::from_fn(n, |i, j| c(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]));
        let p = a.try_mul(&a.adjoint()).unwrap();
        let t = p.trace().re.max(1e-12);
        HermitianMatrix::new(p.scale(1.0 / t)).unwrap()
    })
}

/// Gram-Schmidt on the columns of a random complex matrix.
fn unitary(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_filter_map("degenerate", move |v| {
        let mut cols: Vec<Vec<Complex64>> =
            (0..n).map(|j| (0..n).map(|i| c(v[2 * (i * n + j)], v[2 * (i * n + j) + 1])).collect()).collect();
        for j in 0..n {
            for k in 0..j {
                let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
                let ck = cols[k].clone();
                for (x, y) in cols[j].iter_mut().zip(ck) {
                    *x -= proj * y;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                return None;
            }
            for x in cols[j].iter_mut() {
                *x /= norm;
            }
        }
        Some(ComplexMatrix::from_fn(n, |i, j| cols[j][i]))
    })
}

/// Real roots of the characteristic polynomial of a 3x3 Hermitian matrix,
/// via the trigonometric cubic formula.
fn cubic_roots(m: &HermitianMatrix) -> [f64; 3] {
    let g = |i, j| m.get(i, j);
    let tr = (g(0, 0) + g(1, 1) + g(2, 2)).re;
    let minors = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)
        + g(0, 0) * g(2, 2)
        - g(0, 2) * g(2, 0)
        + g(1, 1) * g(2, 2)
        - g(1, 2) * g(2, 1))
    .re;
    let det = (g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0)))
    .re;
    // λ³ - tr λ² + minors λ - det = 0, shifted by tr/3.
    let s = tr / 3.0;
    let p = minors - tr * tr / 3.0;
    let q = -2.0 * s * s * s + s * minors - det;
    if p.abs() < 1e-14 {
        return [s; 3];
    }
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = s + r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

fn family_channel(family: u8, dim: usize, u: f64) -> ChannelModel {
    if family == 0 {
        depolarizing_channel(dim, u * (1.0 - 1.0 / dim as f64) * 0.999).unwrap()
    } else {
        amplitude_damping_channel(dim, u).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eigenvalues_match_2x2_formula(m in hermitian(2)) {
        let a = m.get(0, 0).re;
        let d = m.get(1, 1).re;
        let b = m.get(0, 1).norm();
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let s = hermitian_eigenvalues(&m).unwrap();
        prop_assert!((s.values()[0] - (mid + rad)).abs() < 1e-9);
        prop_assert!((s.values()[1] - (mid - rad)).abs() < 1e-9);
    }

    #[test]
    fn eigenvalues_match_3x3_cubic(m in hermitian(3)) {
        let s = hermitian_eigenvalues(&m).unwrap();
        for (x, y) in s.values().iter().zip(cubic_roots(&m)) {
            prop_assert!((x - y).abs() < 1e-9, "{:?} vs {:?}", s.values(), cubic_roots(&m));
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace(m in (1usize..9).prop_flat_map(hermitian)) {
        let s = hermitian_eigenvalues(&m).unwrap();
        prop_assert!((s.sum() - m.trace()).abs() < 1e-10);
        prop_assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn trace_distance_is_a_metric(a in density(3), b in density(3), c3 in density(3)) {
        let ab = trace_distance(&a, &b).unwrap();
        let ba = trace_distance(&b, &a).unwrap();
        let bc = trace_distance(&b, &c3).unwrap();
        let ac = trace_distance(&a, &c3).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn entropy_is_unitarily_invariant(rho in density(4), u in unitary(4)) {
        let before = von_neumann_entropy(&rho).unwrap();
        let after = von_neumann_entropy(&rho.conjugate_by(&u).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-8);
    }

    #[test]
    fn diagonal_entropy_is_shannon(v in prop::collection::vec(0.0f64..1.0, 1..7)) {
        let total: f64 = v.iter().sum();
        prop_assume!(total > 1e-6);
        let p: Vec<f64> = v.iter().map(|x| x / total).collect();
        let vn = von_neumann_entropy(&HermitianMatrix::diagonal(&p)).unwrap();
        let sh = shannon_entropy(&ProbabilityDistribution::new(p).unwrap());
        prop_assert!((vn - sh).abs() < 1e-12);
    }

    #[test]
    fn channels_preserve_trace(rho in density(4), p in 0.0f64..=1.0) {
        let k = amplitude_damping_kraus(4, p).unwrap();
        let out = apply_channel(&k, &rho).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-9);
        prop_assert!(hermitian_eigenvalues(&out).unwrap().values().iter().all(|v| *v > -1e-9));
    }

    #[test]
    fn constructed_channels_are_stochastic(dim in 2usize..9, u in 0.0f64..1.0, fam in 0u8..2) {
        let m = family_channel(fam, dim, u);
        for a in 0..dim {
            let col = m.column(a);
            prop_assert!((col.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(col.iter().all(|x| (0.0..=1.0).contains(x)));
        }
        prop_assert!((m.x_dist().probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert_eq!(m.q_x(), 1.0 - m.x_dist().probs()[0]);
    }

    #[test]
    fn depolarizing_is_symmetric(dim in 2usize..12, u in 0.0f64..1.0) {
        let q = u * (1.0 - 1.0 / dim as f64) * 0.999;
        let m = depolarizing_channel(dim, q).unwrap();
        let back = m.symmetric_noise(1e-15).unwrap();
        prop_assert!((back - q).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_epsilon_grows_with_noise(dim in 2usize..17, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let lim = (1.0 - 1.0 / dim as f64) * 0.999;
        let (lo, hi) = if u < v { (u * lim, v * lim) } else { (v * lim, u * lim) };
        let a = epsilon_depolarizing(dim, lo).unwrap().epsilon;
        let b = epsilon_depolarizing(dim, hi).unwrap().epsilon;
        prop_assert!(a <= b + 1e-15);
    }

    #[test]
    fn rate_at_zero_noise_is_log_d(dim in 2usize..12, fam in 0u8..2, full in any::<bool>()) {
        let family = if fam == 0 { ChannelFamily::Depolarizing } else { ChannelFamily::AmplitudeDamping };
        let mode = if full { Mode::Full } else { Mode::Partial };
        let cfg = ProtocolConfig::new(dim, mode, BoundSelector::Winter, family).unwrap();
        let r = key_rate(&cfg, 0.0).unwrap();
        prop_assert_eq!((r.delta_bound, r.hbx_term, r.leak_ec), (0.0, 0.0, 0.0));
        // The library's log kernel may differ from std's log2 in the last bit.
        prop_assert!((r.key_rate - (dim as f64).log2()).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn report_assembles_exactly(dim in 2usize..10, u in 0.0f64..1.0, fam in 0u8..2) {
        let family = if fam == 0 { ChannelFamily::Depolarizing } else { ChannelFamily::AmplitudeDamping };
        let limit = family.noise_limit(dim) * 0.999;
        let cfg = ProtocolConfig::new(dim, Mode::Full, BoundSelector::Best, family).unwrap();
        let r = key_rate(&cfg, u * limit).unwrap();
        let sum = (dim as f64).log2() - r.delta_bound - r.hbx_term - r.leak_ec;
        prop_assert!((r.key_rate - sum).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&r.epsilon));
    }

    #[test]
    fn lemma_rate_dominates_winter(u in 0.0f64..1.0) {
        let q = u * LEMMA_Q_MAX;
        let w = ProtocolConfig::new(2, Mode::Full, BoundSelector::Winter, ChannelFamily::Depolarizing).unwrap();
        let l = ProtocolConfig::new(2, Mode::Full, BoundSelector::LemmaD2, ChannelFamily::Depolarizing).unwrap();
        prop_assert!(key_rate(&l, q).unwrap().key_rate >= key_rate(&w, q).unwrap().key_rate);
    }
}

fn oracle_attack(dim: usize, fam: u8, u: f64, seed: u64) -> (AttackInstance, f64) {
    let m = family_channel(fam, dim, u);
    let noise = if fam == 0 { 1.0 - m.p(0, 0) } else { u };
    (build_attack(&m, seed), noise)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn attack_invariants(dim in 2usize..6, fam in 0u8..2, u in 0.0f64..1.0, seed in any::<u64>()) {
        let (att, _) = oracle_attack(dim, fam, u, seed);
        prop_assert!(att.diagnostics().max() < 1e-12);
        for v in sigma_block_second_eigenvalues(&att).unwrap() {
            prop_assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_epsilon_matches_analytic(dim in 2usize..6, fam in 0u8..2, u in 0.0f64..1.0, seed in any::<u64>()) {
        let (att, _) = oracle_attack(dim, fam, u, seed);
        let exact = exact_epsilon(&att).unwrap();
        let analytic = epsilon(att.channel()).unwrap().epsilon;
        prop_assert!((exact - analytic).abs() < 1e-8);
    }

    #[test]
    fn oracle_delta_within_bounds(dim in 2usize..6, fam in 0u8..2, u in 0.0f64..1.0, seed in any::<u64>()) {
        let (att, noise) = oracle_attack(dim, fam, u, seed);
        let delta = exact_delta(&att).unwrap().delta;
        let eps = epsilon(att.channel()).unwrap().epsilon;
        prop_assert!(delta <= winter_delta_bound(eps, dim).unwrap().value + 1e-8);
        let lemma = lemma_delta_bound(noise);
        if dim == 2 && fam == 0 && lemma.applicable {
            prop_assert!(delta <= lemma.value + 1e-8);
        }
    }
}

#[test]
fn kraus_path_matches_constructor() {
    for dim in 2..9 {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let a = amplitude_damping_channel(dim, p).unwrap();
            let b = channel_from_kraus(&amplitude_damping_kraus(dim, p).unwrap()).unwrap();
            for (x, y) in a.z_rows().iter().flatten().zip(b.z_rows().iter().flatten()) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!((a.q_x() - b.q_x()).abs() < 1e-12);
        }
    }
}
