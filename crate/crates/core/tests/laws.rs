//! Closed-form laws against quadrature and exact-sampler oracles.

use std::f64::consts::PI;

use bridgelaw::laws::special::{exponential_cdf, SQRT_2_OVER_PI};
use bridgelaw::laws::{
    ac_family, c_p, h_density, integrate, k_density, mellin_abs_b1_l1, sample_reference, AnalyticDensity,
    QuadratureConfig, ReferenceKind,
};
use bridgelaw::rng::RandomStream;
use bridgelaw::stats::{ks_one_sample, moment_report_values, rank_independence, EmpiricalSample};

#[test]
fn alpha_density_mass_sign_and_variance() {
    let a = AnalyticDensity::alpha();
    assert!((a.mass().unwrap() - 1.0).abs() < 1e-6);
    let neg = a.integrate_weighted(|_| 1.0, f64::NEG_INFINITY, 0.0).unwrap();
    assert!((neg - 0.549_306).abs() < 1e-6);
    let k_neg = AnalyticDensity::k().integrate_weighted(|_| 1.0, f64::NEG_INFINITY, 0.0).unwrap();
    assert!((neg - k_neg).abs() < 1e-6);
    let m2 = a.integrate_weighted(|x| x * x, f64::NEG_INFINITY, f64::INFINITY).unwrap();
    assert!((m2 - 1.0 / 3.0).abs() < 1e-5);
    for i in 0..40 {
        let x = -4.0 + 8.0 * i as f64 / 39.0;
        assert!(a.pdf(x).unwrap() >= 0.0);
    }
}

#[test]
fn h_integrates_to_one() {
    let cfg = QuadratureConfig::default().with_tolerances(1e-12, 1e-10);
    let inner = |x: f64| {
        integrate(|z| h_density(z, x).unwrap_or(0.0), 0.0, f64::INFINITY, &cfg)
            .unwrap()
            .value
    };
    let outer = QuadratureConfig::default()
        .with_tolerances(1e-10, 1e-9)
        .with_splits(&[0.0]);
    let total = integrate(inner, f64::NEG_INFINITY, 1.0, &outer).unwrap().value;
    assert!((total - 1.0).abs() < 1e-6, "{total}");
    assert!((inner(-0.5) - k_density(-0.5)).abs() < 1e-9);
}

#[test]
fn r_gamma_mass_and_mean() {
    let r = AnalyticDensity::r_gamma();
    assert!((r.mass().unwrap() - 1.0).abs() < 1e-6);
    let mean = r.integrate_weighted(|x| x, 0.0, f64::INFINITY).unwrap();
    assert!((mean - SQRT_2_OVER_PI).abs() < 1e-4);
    // l(1/y) ~ 2/y for large y, so the density vanishes like 2x at the origin
    for x in [1e-3, 1e-4, 1e-5] {
        let v = r.pdf(x).unwrap();
        assert!((v / (2.0 * x) - 1.0).abs() < 0.02, "x={x} pdf={v}");
    }
}

#[test]
fn every_named_density_is_a_cdf() {
    for name in AnalyticDensity::NAMES {
        let d = AnalyticDensity::by_name(name, Some(0.5)).unwrap();
        let (lo, hi) = d.support();
        let (lo, hi) = (lo.max(-8.0), hi.min(8.0));
        let mut last = 0.0;
        for i in 0..=25 {
            let x = lo + (hi - lo) * i as f64 / 25.0;
            let v = d.cdf(x).unwrap();
            assert!((0.0..=1.0).contains(&v) && v >= last - 1e-12, "{name} at {x}");
            last = v;
        }
        assert!((d.mass().unwrap() - 1.0).abs() < 1e-6, "{name}");
    }
}

#[test]
fn mellin_grid_matches_factorization_sampler() {
    let n = 1_000_000;
    let mut s = RandomStream::new(21, 0);
    let draws: Vec<(f64, f64)> = (0..n)
        .map(|_| sample_reference(ReferenceKind::FixedTimeFactorization { s: 1.0 }, &mut s).pair().unwrap())
        .collect();
    for a in [0.5, 1.0, 2.0] {
        for c in [0.5, 1.0, 2.0] {
            let v: Vec<f64> = draws.iter().map(|(b, l)| b.powf(a) * l.powf(c)).collect();
            let m = moment_report_values(&v, 1.0, Some(mellin_abs_b1_l1(a, c).unwrap()), false).unwrap();
            assert!(m.within(3.0), "a={a} c={c}: {m:?}");
        }
    }
    let l1: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let m = moment_report_values(&l1, 1.0, Some(mellin_abs_b1_l1(0.0, 1.0).unwrap()), false).unwrap();
    assert!(m.within(3.0));
}

#[test]
fn normalising_constant_two_routes() {
    for p in [0.0, 0.5, 1.0, 2.0, 3.5, 7.0] {
        let direct = 2f64.powf(p / 2.0) * bridgelaw::laws::special::gamma((p + 1.0) / 2.0) / PI.sqrt();
        assert!((mellin_abs_b1_l1(p, 0.0).unwrap() - c_p(p).unwrap()).abs() < 1e-12);
        assert!((c_p(p).unwrap() - direct).abs() < 1e-12 * direct.max(1.0));
    }
}

#[test]
fn corollary_two_reference_is_independent() {
    let n = 100_000;
    let mut s = RandomStream::new(22, 0);
    let t: Vec<[f64; 3]> = (0..n)
        .map(|_| sample_reference(ReferenceKind::Cor2Rhs, &mut s).triplet().unwrap().coords())
        .collect();
    let col = |k: usize| t.iter().map(|r| r[k]).collect::<Vec<_>>();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert!(rank_independence(&col(i), &col(j)).unwrap().passes(), "pair {i},{j}");
    }
}

#[test]
fn exponential_pair_marginals() {
    let mut s = RandomStream::new(23, 0);
    let (a, b): (Vec<f64>, Vec<f64>) = (0..100_000)
        .map(|_| sample_reference(ReferenceKind::LemmaExpPair, &mut s).pair().unwrap())
        .unzip();
    for v in [a, b] {
        let e = EmpiricalSample::from_values(v).unwrap();
        assert!(ks_one_sample(&e, exponential_cdf).unwrap().passes());
    }
}

#[test]
fn ac_family_examples() {
    let half = ac_family(0.5).unwrap();
    assert!((half.p_pos - 0.450_694).abs() < 1e-6);
    let one = ac_family(1.0).unwrap();
    assert!((one.p_pos - 0.306_853).abs() < 1e-6);
    for c in [0.25, 0.5, 1.0] {
        let f = ac_family(c).unwrap();
        assert!((f.z_density.mass().unwrap() - 1.0).abs() < 1e-9);
        let pos = f.alpha_density.integrate_weighted(|_| 1.0, 0.0, f64::INFINITY).unwrap();
        assert!((pos - f.p_pos).abs() < 1e-6, "c={c}");
    }
    // Z_C at c = ½ is the Z behind the positive part of α
    let z = AnalyticDensity::by_name("z", None).unwrap();
    for i in 1..20 {
        let x = i as f64 / 20.0;
        assert_eq!(z.pdf(x).unwrap(), half.z_density.pdf(x).unwrap());
    }
}
