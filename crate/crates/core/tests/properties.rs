use approx::{assert_abs_diff_eq, assert_relative_eq};
use bridgelaw::laws::AnalyticDensity;
use bridgelaw::pathkit::{levy_view, pitman_view, simulate_to_time, CrossingCorrection, StepScheme};
use bridgelaw::rng::RandomStream;
use bridgelaw::stats::{
    kolmogorov_sf, ks_two_sample, richardson, BiasLadder, EmpiricalSample, MomentAccumulator,
};
use proptest::prelude::*;

fn normals(seed: u64, stream: u64, n: usize, shift: f64) -> Vec<f64> {
    let mut s = RandomStream::new(seed, stream);
    (0..n).map(|_| s.gaussian() + shift).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levy_and_pitman_maps_are_consistent(
        seed in any::<u64>(),
        dt in 1e-4f64..2e-2,
        bridge in any::<bool>(),
    ) {
        let corr = if bridge { CrossingCorrection::Bridge } else { CrossingCorrection::None };
        let scheme = StepScheme::new(dt).unwrap().with_correction(corr);
        let mut s = RandomStream::new(seed, 0);
        let path = simulate_to_time(&mut s, &scheme, 0.5).unwrap();
        let lv = levy_view(&path, &mut s);
        let pv = pitman_view(&path);
        prop_assert_eq!(lv.signs.len(), lv.excursion_count());
        for i in 0..path.len() {
            prop_assert!(lv.abs_b[i] >= 0.0);
            prop_assert!(lv.signed(i).abs() == lv.abs_b[i]);
            // W = L - |B| and R = |B| + L
            assert_abs_diff_eq!(lv.loc[i] - lv.abs_b[i], path.w[i], epsilon = 1e-12);
            assert_abs_diff_eq!(pv.r[i], lv.abs_b[i] + lv.loc[i], epsilon = 1e-12);
            prop_assert!(pv.r[i] >= pv.j[i]);
            if i > 0 {
                prop_assert!(lv.loc[i] >= lv.loc[i - 1]);
                prop_assert!(path.times[i] > path.times[i - 1]);
                prop_assert!(lv.excursion[i] >= lv.excursion[i - 1]);
            }
        }
        assert_relative_eq!(*path.times.last().unwrap(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn ks_distance_is_symmetric_and_rank_invariant(
        seed in any::<u64>(),
        na in 10usize..300,
        nb in 10usize..300,
        shift in -1.0f64..1.0,
    ) {
        let a = EmpiricalSample::from_values(normals(seed, 1, na, 0.0)).unwrap();
        let b = EmpiricalSample::from_values(normals(seed, 2, nb, shift)).unwrap();
        let ab = ks_two_sample(&a, &b).unwrap();
        let ba = ks_two_sample(&b, &a).unwrap();
        assert_abs_diff_eq!(ab.d, ba.d, epsilon = 1e-15);
        assert_abs_diff_eq!(ab.p_value, ba.p_value, epsilon = 1e-15);
        let ea = a.map_increasing(|x| x.exp()).unwrap();
        let eb = b.map_increasing(|x| x.exp()).unwrap();
        let e = ks_two_sample(&ea, &eb).unwrap();
        assert_abs_diff_eq!(ab.d, e.d, epsilon = 1e-15);
        prop_assert!((0.0..=1.0).contains(&ab.d));
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
    }

    #[test]
    fn kolmogorov_tail_decreases(x in 0.0f64..4.0, dx in 1e-3f64..1.0) {
        let (p, q) = (kolmogorov_sf(x), kolmogorov_sf(x + dx));
        prop_assert!(q <= p);
        prop_assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn merged_accumulators_match_pooled(
        xs in prop::collection::vec(-1e3f64..1e3, 2..200),
        cut in 0usize..200,
    ) {
        let cut = cut.min(xs.len());
        let mut left: MomentAccumulator = xs[..cut].iter().copied().collect();
        let right: MomentAccumulator = xs[cut..].iter().copied().collect();
        left.merge(&right);
        let pooled: MomentAccumulator = xs.iter().copied().collect();
        prop_assert_eq!(left.count(), pooled.count());
        assert_relative_eq!(left.mean(), pooled.mean(), epsilon = 1e-9, max_relative = 1e-12);
        assert_relative_eq!(left.variance(), pooled.variance(), epsilon = 1e-9, max_relative = 1e-12);
    }

    #[test]
    fn richardson_recovers_exact_power_models(
        limit in -5.0f64..5.0,
        coef in -10.0f64..10.0,
        q in 0.25f64..2.0,
        rungs in 2usize..5,
    ) {
        let dts: Vec<f64> = (0..rungs).map(|k| 1e-2 / 4f64.powi(k as i32)).collect();
        let est: Vec<f64> = dts.iter().map(|h| limit + coef * h.powf(q)).collect();
        let ladder = BiasLadder::exact(dts, est).unwrap();
        assert_abs_diff_eq!(richardson(&ladder, q).unwrap(), limit, epsilon = 1e-9);
    }

    #[test]
    fn same_stream_same_draws(seed in any::<u64>(), index in 0u64..1 << 40, n in 1usize..64) {
        let mut a = RandomStream::new(seed, index);
        let mut b = RandomStream::new(seed, index);
        let xa: Vec<u64> = (0..n).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..n).map(|_| b.next_u64()).collect();
        prop_assert_eq!(&xa, &xb);
        let mut c = RandomStream::at(seed, index, a.counter());
        prop_assert_eq!(c.next_u64(), a.next_u64());
        let mut d = RandomStream::new(seed, index + 1);
        let xd: Vec<u64> = (0..n).map(|_| d.next_u64()).collect();
        prop_assert_ne!(xa, xd);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn named_densities_are_nonnegative_with_monotone_cdf(
        which in 0usize..6,
        x in -4.0f64..6.0,
        dx in 1e-3f64..2.0,
    ) {
        let d = match which {
            0 => AnalyticDensity::u(),
            1 => AnalyticDensity::k(),
            2 => AnalyticDensity::l(),
            3 => AnalyticDensity::alpha(),
            4 => AnalyticDensity::r_gamma(),
            _ => AnalyticDensity::z_c(0.5),
        };
        prop_assert!(d.pdf(x).unwrap() >= 0.0);
        let (f0, f1) = (d.cdf(x).unwrap(), d.cdf(x + dx).unwrap());
        prop_assert!(f0 >= -1e-9 && f1 <= 1.0 + 1e-9, "{} {f0} {f1}", d.name());
        prop_assert!(f1 >= f0 - 1e-9, "{} not monotone: {f0} > {f1}", d.name());
    }
}
