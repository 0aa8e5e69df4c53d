//! Recipes comparing simulated triplets and pairs with exact references.

use super::context::{column, Ctx};
use super::{Check, ExperimentError};
use crate::laws::special::{exponential_cdf, half_normal_cdf, normal_cdf, uniform_cdf};
use crate::laws::{
    descb_weighted_integral, h_density, k_density, sample_reference, AnalyticDensity, QuadratureConfig,
    ReferenceKind, Side,
};
use crate::pathkit::{
    sample_cor2, sample_triplet_bessel, sample_triplet_hitting, sample_triplet_pseudo_bridge,
    simulate_to_time, Cor2Variant,
};
use crate::stats::{
    ks_against_density, ks_one_sample, ks_two_sample, moment_report_values, proportion_report,
    rank_independence,
};

type R = Result<(), ExperimentError>;

pub(crate) fn two_sample(ctx: &mut Ctx, id: &str, a: Vec<f64>, b: Vec<f64>) -> R {
    let a = ctx.sample(id, a, true)?;
    let b = ctx.sample(id, b, false)?;
    let r = ks_two_sample(&a, &b)?;
    ctx.push(Check::ks(id, &r));
    Ok(())
}

pub(crate) fn one_sample(ctx: &mut Ctx, id: &str, a: Vec<f64>, cdf: impl Fn(f64) -> f64) -> R {
    let a = ctx.sample(id, a, true)?;
    let r = ks_one_sample(&a, cdf)?;
    ctx.push(Check::ks(id, &r));
    Ok(())
}

pub(crate) fn density_ks(ctx: &mut Ctx, id: &str, a: Vec<f64>, d: &AnalyticDensity) -> R {
    let a = ctx.sample(id, a, true)?;
    let r = ks_against_density(&a, d)?;
    ctx.push(Check::ks(id, &r));
    Ok(())
}

pub(crate) fn independence(ctx: &mut Ctx, id: &str, x: &[f64], y: &[f64]) -> R {
    let r = rank_independence(x, y)?;
    ctx.extend(Check::independence(id, &r));
    Ok(())
}

pub(crate) fn mean_check(ctx: &mut Ctx, id: &str, v: &[f64], order: f64, target: f64) -> R {
    let m = moment_report_values(v, order, Some(target), true)?;
    ctx.push(Check::z(id, &m));
    Ok(())
}

pub(crate) fn positive_share(ctx: &mut Ctx, id: &str, v: &[f64], target: f64) -> R {
    let hits = v.iter().filter(|&&x| x > 0.0).count();
    let m = proportion_report(hits, v.len(), Some(target))?;
    ctx.push(Check::z(id, &m));
    Ok(())
}

/// Marginal and projection KS tests between simulated and reference triplets.
fn compare_triplets(ctx: &mut Ctx, prefix: &str, sim: &[[f64; 3]], reference: &[[f64; 3]]) -> R {
    for (k, axis) in ["x", "y", "z"].iter().enumerate() {
        two_sample(ctx, &format!("{prefix}ks_{axis}"), column(sim, k), column(reference, k))?;
    }
    let projections: [(&str, fn(&[f64; 3]) -> f64); 3] = [
        ("x_times_y", |t| t[0] * t[1]),
        ("x_plus_z", |t| t[0] + t[2]),
        ("y_times_z", |t| t[1] * t[2]),
    ];
    for (name, f) in projections {
        let a = sim.iter().map(f).collect();
        let b = reference.iter().map(f).collect();
        two_sample(ctx, &format!("{prefix}ks_{name}"), a, b)?;
    }
    Ok(())
}

fn reference_triplets(ctx: &Ctx, family: u32, n: usize, kind: ReferenceKind) -> Vec<[f64; 3]> {
    ctx.exact(family, n, |s| sample_reference(kind, s).triplet().expect("triplet kind").coords())
}

pub(crate) fn theorem1(ctx: &mut Ctx) -> R {
    let n = ctx.spec.paths;
    let scheme = *ctx.scheme();
    let sim = ctx.simulate(0, n, |s| sample_triplet_pseudo_bridge(s, &scheme).map(|t| t.coords()))?;
    let reference = reference_triplets(ctx, 1, n, ReferenceKind::Thm1Rhs);
    compare_triplets(ctx, "", &sim, &reference)?;

    let (x, y, z) = (column(&sim, 0), column(&sim, 1), column(&sim, 2));
    independence(ctx, "indep_x_z", &x, &z)?;
    independence(ctx, "indep_y_z", &y, &z)?;
    one_sample(ctx, "z_vs_uniform", z, uniform_cdf)?;
    one_sample(ctx, "y_vs_half_normal", y, |v| half_normal_cdf(v, 1.0))?;
    one_sample(ctx, "x_vs_normal_sd_half", x.clone(), |v| normal_cdf(2.0 * v))?;
    mean_check(ctx, "mean_x", &x, 1.0, 0.0)?;
    mean_check(ctx, "second_moment_x", &x, 2.0, 0.25)?;
    Ok(())
}

pub(crate) fn corollary1(ctx: &mut Ctx) -> R {
    let n = ctx.spec.paths;
    let scheme = *ctx.scheme();

    let hit = ctx.simulate(0, n, |s| sample_triplet_hitting(s, &scheme).map(|t| t.coords()))?;
    let reference = reference_triplets(ctx, 1, n, ReferenceKind::Cor1HittingRhs);
    compare_triplets(ctx, "hitting_", &hit, &reference)?;
    let x = column(&hit, 0);
    independence(ctx, "hitting_indep_y_z", &column(&hit, 1), &column(&hit, 2))?;
    mean_check(ctx, "hitting_mean_x", &x, 1.0, 0.0)?;
    mean_check(ctx, "hitting_second_moment_x", &x, 2.0, 1.0 / 3.0)?;
    positive_share(ctx, "hitting_share_x_positive", &x, 1.0 - 0.5 * 3f64.ln())?;

    let bes = ctx.simulate(2, n, |s| sample_triplet_bessel(s, &scheme).map(|t| t.coords()))?;
    let reference = reference_triplets(ctx, 3, n, ReferenceKind::Cor1BesselRhs);
    compare_triplets(ctx, "bessel_", &bes, &reference)?;
    independence(ctx, "bessel_indep_y_z", &column(&bes, 1), &column(&bes, 2))?;
    mean_check(ctx, "bessel_mean_x", &column(&bes, 0), 1.0, crate::laws::special::SQRT_2_OVER_PI)?;
    // R ≥ J pathwise, i.e. x ≥ y·z
    let violations = bes.iter().filter(|t| t[0] < t[1] * t[2] - 1e-12).count();
    ctx.push(Check::exact("bessel_future_infimum_violations", violations as f64, 0.0, 0.0));
    Ok(())
}

pub(crate) fn corollary2(ctx: &mut Ctx) -> R {
    let n = ctx.spec.paths;
    let scheme = *ctx.scheme();
    let reference = reference_triplets(ctx, 0, n, ReferenceKind::Cor2Rhs);
    let (rx, ry, rz) = (column(&reference, 0), column(&reference, 1), column(&reference, 2));
    independence(ctx, "reference_indep_x_y", &rx, &ry)?;
    independence(ctx, "reference_indep_x_z", &rx, &rz)?;
    independence(ctx, "reference_indep_y_z", &ry, &rz)?;

    let variants = [
        (Cor2Variant::Bridge, "bridge"),
        (Cor2Variant::Hitting, "hitting"),
        (Cor2Variant::Bessel, "bessel"),
    ];
    for (k, (variant, tag)) in variants.into_iter().enumerate() {
        let sim = ctx.simulate(1 + k as u32, n, |s| sample_cor2(s, &scheme, variant).map(|t| t.coords()))?;
        for (axis, name) in ["x", "y", "z"].iter().enumerate() {
            two_sample(ctx, &format!("{tag}_ks_{name}"), column(&sim, axis), column(&reference, axis))?;
        }
        let (x, y, z) = (column(&sim, 0), column(&sim, 1), column(&sim, 2));
        independence(ctx, &format!("{tag}_indep_x_y"), &x, &y)?;
        independence(ctx, &format!("{tag}_indep_x_z"), &x, &z)?;
        independence(ctx, &format!("{tag}_indep_y_z"), &y, &z)?;
    }
    Ok(())
}

pub(crate) fn lemma_exp(ctx: &mut Ctx) -> R {
    let n = ctx.spec.paths;
    let scheme = *ctx.scheme();
    let positive_exp = |s: &mut crate::rng::RandomStream| loop {
        let e = s.exponential();
        if e > 0.0 {
            break e;
        }
    };

    // exact fixed-time factorization at s = 2E
    let exact = ctx.exact(0, ctx.spec.exact_draws, |s| {
        let e = positive_exp(s);
        let (a, l) = sample_reference(ReferenceKind::FixedTimeFactorization { s: 2.0 * e }, s)
            .pair()
            .expect("pair kind");
        [a, l]
    });
    let reference = ctx.exact(1, n, |s| {
        let (a, b) = sample_reference(ReferenceKind::LemmaExpPair, s).pair().expect("pair kind");
        [a, b]
    });
    let (ea, el) = (column(&exact, 0), column(&exact, 1));
    independence(ctx, "factorization_indep", &ea, &el)?;
    one_sample(ctx, "factorization_abs_b_vs_exp", ea, exponential_cdf)?;
    one_sample(ctx, "factorization_local_time_vs_exp", el, exponential_cdf)?;

    // Lévy-coupled path run to the independent time 2E
    let sim = ctx.simulate(2, n, |s| {
        let e = positive_exp(s);
        let p = simulate_to_time(s, &scheme, 2.0 * e)?;
        let i = p.len() - 1;
        Ok([p.m[i] - p.w[i], p.m[i]])
    })?;
    let (sa, sl) = (column(&sim, 0), column(&sim, 1));
    independence(ctx, "path_indep", &sa, &sl)?;
    two_sample(ctx, "path_abs_b_vs_reference", sa.clone(), column(&reference, 0))?;
    two_sample(ctx, "path_local_time_vs_reference", sl.clone(), column(&reference, 1))?;
    one_sample(ctx, "path_abs_b_vs_exp", sa, exponential_cdf)?;
    one_sample(ctx, "path_local_time_vs_exp", sl, exponential_cdf)?;
    Ok(())
}

/// `x` grid avoiding the boundary point 0.
fn desc_b_grid() -> Vec<f64> {
    (0..50).map(|i| -5.0 + 6.0 * (i as f64 + 0.5) / 50.0).collect()
}

pub(crate) fn desc_b(ctx: &mut Ctx) -> R {
    let quad = QuadratureConfig::default();
    let k = AnalyticDensity::k();
    ctx.push(Check::exact("k_mass", k.mass()?, 1.0, 1e-9));
    let neg = k.integrate_weighted(|_| 1.0, f64::NEG_INFINITY, 0.0)?;
    ctx.push(Check::exact("k_negative_mass", neg, 0.5 * 3f64.ln(), 1e-9));

    let mut worst: f64 = 0.0;
    for x in desc_b_grid() {
        let cfg = QuadratureConfig::default().with_tolerances(1e-13, 1e-11);
        let v = crate::laws::integrate(|z| h_density(z, x).unwrap_or(f64::NAN), 0.0, f64::INFINITY, &cfg)?;
        worst = worst.max((v.value - k_density(x)).abs());
    }
    ctx.push(Check::exact("h_marginal_vs_k_max_error", worst, 0.0, 1e-6));

    // exact pairs (1/√T₁, B_{UT₁}) and simulated ones from the hitting path
    let n = ctx.spec.paths;
    let scheme = *ctx.scheme();
    let exact = ctx.exact(0, ctx.spec.exact_draws, |s| {
        let (y, x) = sample_reference(ReferenceKind::ExactJointDescB, s).pair().expect("pair kind");
        [y, x]
    });
    let sim = ctx.simulate(1, n, |s| {
        sample_triplet_hitting(s, &scheme).map(|t| [t.y, t.x / t.y])
    })?;

    let phis: [(&str, fn(f64) -> f64); 2] = [("one", |_| 1.0), ("exp", f64::exp)];
    for p in [0u32, 1, 2] {
        for (phi_name, phi) in phis {
            for (side, side_name) in [(Side::Positive, "pos"), (Side::Negative, "neg")] {
                let target = descb_weighted_integral(p as f64, &phi, side, &quad)?;
                let on_side = |x: f64| match side {
                    Side::Positive => x > 0.0,
                    Side::Negative => x < 0.0,
                };
                let weight = |r: &[f64; 2]| {
                    if on_side(r[1]) {
                        r[0].powi(p as i32) * phi(r[1])
                    } else {
                        0.0
                    }
                };
                let ev: Vec<f64> = exact.iter().map(weight).collect();
                mean_check(ctx, &format!("exact_weighted_p{p}_{phi_name}_{side_name}"), &ev, 1.0, target)?;
                let sv: Vec<f64> = sim.iter().map(weight).collect();
                mean_check(ctx, &format!("path_weighted_p{p}_{phi_name}_{side_name}"), &sv, 1.0, target)?;
            }
        }
    }

    let n_ref = n.min(exact.len());
    two_sample(ctx, "path_vs_exact_ks_inv_sqrt_t1", column(&sim, 0), column(&exact[..n_ref], 0))?;
    two_sample(ctx, "path_vs_exact_ks_b_at_ut1", column(&sim, 1), column(&exact[..n_ref], 1))?;
    let sim_prod = sim.iter().map(|r| r[0] * r[1]).collect();
    let ref_prod = exact[..n_ref].iter().map(|r| r[0] * r[1]).collect();
    two_sample(ctx, "path_vs_exact_ks_product", sim_prod, ref_prod)?;
    density_ks(ctx, "exact_b_at_ut1_vs_k", column(&exact, 1), &k)?;
    density_ks(ctx, "path_b_at_ut1_vs_k", column(&sim, 1), &k)?;
    one_sample(ctx, "path_inv_sqrt_t1_vs_half_normal", column(&sim, 0), |v| half_normal_cdf(v, 1.0))?;
    Ok(())
}
