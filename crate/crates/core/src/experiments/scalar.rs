//! Recipes built on scalar statistics: moments, densities and extrapolation.

use super::context::{column, Ctx};
use super::joint::{density_ks, mean_check, one_sample, positive_share};
use super::{Check, ExperimentError};
use crate::laws::special::{abs_normal_moment, half_normal_cdf, SQRT_2_OVER_PI};
use crate::laws::{
    a_c_density, ac_family, c_p, integrate, mellin_abs_b1_l1, sample_reference, u_density,
    z_c_density, AnalyticDensity, QuadratureConfig, ReferenceKind,
};
use crate::pathkit::{
    sample_functional_hp_family, sample_subordinator_pair, sample_triplet_bessel, sample_triplet_hitting,
    simulate_until_max_hits, HpVariant,
};
use crate::stats::{moment_report_values, proportion_report, richardson_fit, BiasLadder, MomentReport};

type R = Result<(), ExperimentError>;

/// Draws of `(B₁, L₁, Λ)` from the factorization sampler.
fn b1_l1_lambda(ctx: &Ctx, family: u32, n: usize) -> Vec<[f64; 3]> {
    ctx.exact(family, n, |s| {
        let t = sample_reference(ReferenceKind::Thm1Rhs, s).triplet().expect("triplet kind");
        [2.0 * t.x, t.y, t.z]
    })
}

pub(crate) fn mellin(ctx: &mut Ctx) -> R {
    let n = ctx.spec.exact_draws;
    let draws = ctx.exact(0, n, |s| {
        let (a, l) = sample_reference(ReferenceKind::FixedTimeFactorization { s: 1.0 }, s)
            .pair()
            .expect("pair kind");
        [a, l]
    });
    let grid = [0.5, 1.0, 2.0];
    for a in grid {
        for c in grid {
            let v: Vec<f64> = draws.iter().map(|r| r[0].powf(a) * r[1].powf(c)).collect();
            mean_check(ctx, &format!("moment_a{a}_c{c}"), &v, 1.0, mellin_abs_b1_l1(a, c)?)?;
        }
    }
    for p in [0.5, 1.0, 2.0, 3.0] {
        let m = mellin_abs_b1_l1(p, 0.0)?;
        ctx.push(Check::exact(format!("c_p_two_routes_p{p}"), m, c_p(p)?, 1e-12));
        ctx.push(Check::exact(format!("c_p_normal_moment_p{p}"), m, abs_normal_moment(p), 1e-12));
    }
    let t1 = ctx.exact(1, n, |s| sample_reference(ReferenceKind::ExactT1, s).scalar().expect("scalar kind"));
    mean_check(ctx, "exact_t1_mean", &t1, 1.0, SQRT_2_OVER_PI)?;
    let cross: Vec<f64> = b1_l1_lambda(ctx, 2, n).iter().map(|r| r[0] * (r[2] - 0.5)).collect();
    mean_check(ctx, "thm1_rhs_cov_x_z", &cross, 1.0, 0.0)?;
    Ok(())
}

/// Density of `|N| Z` with `Z` of density `z_c_density(·, ½)`.
fn abs_normal_times_z() -> AnalyticDensity {
    let inner = QuadratureConfig::default().with_tolerances(1e-14, 1e-12);
    AnalyticDensity::new(
        "abs_normal_times_z",
        (0.0, f64::INFINITY),
        QuadratureConfig::default().with_tolerances(1e-11, 1e-11),
        move |x| {
            if x <= 0.0 {
                return Ok(0.0);
            }
            let f = |z: f64| {
                if z <= 0.0 {
                    0.0
                } else {
                    let r = x / z;
                    z_c_density(z, 0.5) / z * SQRT_2_OVER_PI * (-0.5 * r * r).exp()
                }
            };
            Ok(integrate(f, 0.0, 1.0, &inner)?.value)
        },
    )
}

struct Rung {
    mean: MomentReport,
    second: MomentReport,
    positive: MomentReport,
}

fn rung(x: &[f64]) -> Result<Rung, ExperimentError> {
    let hits = x.iter().filter(|&&v| v > 0.0).count();
    Ok(Rung {
        mean: moment_report_values(x, 1.0, None, true)?,
        second: moment_report_values(x, 2.0, None, true)?,
        positive: proportion_report(hits, x.len(), None)?,
    })
}

/// Order of the leading discretisation bias assumed for bridge-corrected
/// paths: the hitting time is placed within one step.
const LADDER_ORDER: f64 = 1.0;

/// Relative band for the finest rung before extrapolation.
const BAND: f64 = 0.05;

pub(crate) fn alpha(ctx: &mut Ctx) -> R {
    let n_exact = ctx.spec.exact_draws;
    let p_pos = 1.0 - 0.5 * 3f64.ln();
    let exact: Vec<f64> = ctx.exact(0, n_exact, |s| {
        sample_reference(ReferenceKind::Cor1HittingRhs, s).triplet().expect("triplet kind").x
    });
    mean_check(ctx, "exact_mean", &exact, 1.0, 0.0)?;
    mean_check(ctx, "exact_second_moment", &exact, 2.0, 1.0 / 3.0)?;
    positive_share(ctx, "exact_share_positive", &exact, p_pos)?;
    let alpha = AnalyticDensity::alpha();
    ctx.push(Check::exact("density_mass", alpha.mass()?, 1.0, 1e-6));
    ctx.push(Check::exact(
        "density_negative_mass",
        alpha.integrate_weighted(|_| 1.0, f64::NEG_INFINITY, 0.0)?,
        0.5 * 3f64.ln(),
        1e-6,
    ));
    ctx.push(Check::exact(
        "density_second_moment",
        alpha.integrate_weighted(|x| x * x, f64::NEG_INFINITY, f64::INFINITY)?,
        1.0 / 3.0,
        1e-5,
    ));
    density_ks(ctx, "exact_vs_density", exact.clone(), &alpha)?;
    let pos: Vec<f64> = exact.iter().copied().filter(|&v| v > 0.0).collect();
    density_ks(ctx, "exact_positive_part_vs_abs_normal_times_z", pos, &abs_normal_times_z())?;
    let neg: Vec<f64> = exact.iter().filter(|&&v| v < 0.0).map(|v| -v).collect();
    one_sample(ctx, "exact_negative_part_vs_half_abs_normal", neg, |v| half_normal_cdf(v, 0.5))?;

    // simulated ladder {4 dt, dt}
    let base = *ctx.scheme();
    let dts = [4.0 * base.dt, base.dt];
    let mut rungs = Vec::new();
    let mut finest = Vec::new();
    for (k, &dt) in dts.iter().enumerate() {
        let scheme = base.with_dt(dt);
        let x: Vec<f64> = ctx.simulate(10 + k as u32, ctx.spec.paths, |s| {
            sample_triplet_hitting(s, &scheme).map(|t| t.x)
        })?;
        rungs.push(rung(&x)?);
        finest = x;
    }
    let sd = (1.0f64 / 3.0).sqrt();
    let stats: [(&str, fn(&Rung) -> &MomentReport, f64, f64); 3] = [
        ("mean", |r| &r.mean, 0.0, sd),
        ("second_moment", |r| &r.second, 1.0 / 3.0, 1.0 / 3.0),
        ("share_positive", |r| &r.positive, p_pos, p_pos),
    ];
    for (name, get, target, scale) in stats {
        let fine = get(&rungs[1]);
        ctx.push(Check::exact(format!("path_{name}_band"), fine.estimate, target, BAND * scale));
        let ladder = BiasLadder::new(
            dts.to_vec(),
            rungs.iter().map(|r| get(r).estimate).collect(),
            rungs.iter().map(|r| get(r).std_error).collect(),
        )?;
        let fit = richardson_fit(&ladder, LADDER_ORDER)?;
        let m = MomentReport::new(fine.order, fit.limit, fit.limit_se, Some(target));
        ctx.push(Check::z(format!("path_{name}_extrapolated"), &m));
    }
    density_ks(ctx, "path_vs_density", finest, &alpha)?;
    Ok(())
}

pub(crate) fn centered(ctx: &mut Ctx) -> R {
    let powers = ctx.spec.options.powers.clone();
    let n = (ctx.spec.paths / 2).max(super::MIN_PATHS);
    let scheme = *ctx.scheme();
    for (k, (variant, tag)) in [(HpVariant::H, "h"), (HpVariant::HPrime, "h_prime")].into_iter().enumerate() {
        let rows = ctx.simulate(k as u32, n, |s| sample_functional_hp_family(s, &scheme, &powers, variant))?;
        for (j, p) in powers.iter().enumerate() {
            let v: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            mean_check(ctx, &format!("path_{tag}_p{p}_mean"), &v, 1.0, 0.0)?;
        }
    }
    // reduced form: (p+1)/(2p²) Λ^p L₁^p − ½|B₁| Λ^{p−1} L₁^{p−1}
    let draws = b1_l1_lambda(ctx, 2, ctx.spec.exact_draws);
    for &p in &powers {
        let pf = p as f64;
        let coef = (pf + 1.0) / (2.0 * pf * pf);
        let v: Vec<f64> = draws
            .iter()
            .map(|r| {
                let ll = r[2] * r[1];
                coef * ll.powi(p as i32) - 0.5 * r[0].abs() * ll.powi(p as i32 - 1)
            })
            .collect();
        mean_check(ctx, &format!("exact_reduced_p{p}_mean"), &v, 1.0, 0.0)?;
    }
    Ok(())
}

pub(crate) fn bessel_ratio(ctx: &mut Ctx) -> R {
    let l = AnalyticDensity::l();
    ctx.push(Check::exact("l_mass", l.mass()?, 1.0, 1e-9));
    let r = AnalyticDensity::r_gamma();
    ctx.push(Check::exact("r_gamma_mass", r.mass()?, 1.0, 1e-6));
    let mean = r.integrate_weighted(|x| x, 0.0, f64::INFINITY)?;
    ctx.push(Check::exact("r_gamma_mean", mean, SQRT_2_OVER_PI, 1e-4));

    let n_exact = ctx.spec.exact_draws;
    let a_prime = ctx.exact(0, n_exact, |s| {
        let (lam, u) = (s.uniform(), s.uniform());
        lam * u + 0.5 * (1.0 - u)
    });
    density_ks(ctx, "exact_a_prime_vs_l", a_prime, &l)?;
    let exact_ratio = ctx.exact(1, n_exact, |s| {
        sample_reference(ReferenceKind::Cor1BesselRhs, s).triplet().expect("triplet kind").x
    });
    density_ks(ctx, "exact_ratio_vs_r_gamma", exact_ratio, &r)?;

    let scheme = *ctx.scheme();
    let sim = ctx.simulate(2, ctx.spec.paths, |s| sample_triplet_bessel(s, &scheme).map(|t| t.coords()))?;
    density_ks(ctx, "path_ratio_vs_r_gamma", column(&sim, 0), &r)?;
    // R ≥ J pathwise, i.e. x ≥ y·z
    let below = sim.iter().filter(|t| t[0] < t[1] * t[2] - 1e-12).count();
    ctx.push(Check::exact("path_future_infimum_violations", below as f64, 0.0, 0.0));
    Ok(())
}

pub(crate) fn appendix_a(ctx: &mut Ctx) -> R {
    let levels = ctx.spec.options.levels.clone();
    let lambdas = ctx.spec.options.lambdas.clone();
    let n_exact = ctx.spec.exact_draws;
    for (k, &l) in levels.iter().enumerate() {
        let pairs = ctx.exact(k as u32, n_exact, |s| {
            let p = sample_subordinator_pair(s, l).expect("level validated");
            [p.tau_l, p.tau_1]
        });
        for &lam in &lambdas {
            let v: Vec<f64> = pairs.iter().map(|r| r[0] / r[1] * (-lam * r[1]).exp()).collect();
            let target = l * (-(2.0 * lam).sqrt()).exp();
            mean_check(ctx, &format!("exact_l{l}_lambda{lam}"), &v, 1.0, target)?;
        }
    }
    // Lévy coupling: τ_l is the first passage of the driver's maximum at l
    let scheme = *ctx.scheme();
    let lv = levels.clone();
    let rows = ctx.simulate(16, ctx.spec.paths, |s| {
        let p = simulate_until_max_hits(s, &scheme, 1.0)?;
        let t1 = p.end_time();
        let mut out: Vec<f64> = lv.iter().map(|&l| p.first_passage_time(l).unwrap_or(t1)).collect();
        out.push(t1);
        Ok(out)
    })?;
    for (k, &l) in levels.iter().enumerate() {
        for &lam in &lambdas {
            let v: Vec<f64> = rows
                .iter()
                .map(|r| {
                    let t1 = *r.last().unwrap();
                    r[k] / t1 * (-lam * t1).exp()
                })
                .collect();
            let target = l * (-(2.0 * lam).sqrt()).exp();
            mean_check(ctx, &format!("path_l{l}_lambda{lam}"), &v, 1.0, target)?;
        }
    }
    Ok(())
}

pub(crate) fn appendix_b(ctx: &mut Ctx) -> R {
    let grid = ctx.spec.options.c_grid.clone();
    let n_exact = ctx.spec.exact_draws;
    for (k, &c) in grid.iter().enumerate() {
        let fam = ac_family(c)?;
        let target = 1.0 - c * (1.0 + 1.0 / c).ln();
        ctx.push(Check::exact(format!("c{c}_p_pos_closed_form"), fam.p_pos, target, 1e-15));
        ctx.push(Check::exact(format!("c{c}_z_mass"), fam.z_density.mass()?, 1.0, 1e-9));
        ctx.push(Check::exact(format!("c{c}_a_mass"), fam.a_density.mass()?, 1.0, 1e-9));
        let pos = fam.a_density.integrate_weighted(|_| 1.0, 0.0, 1.0)?;
        ctx.push(Check::exact(format!("c{c}_a_positive_mass"), pos, fam.p_pos, 1e-9));
        ctx.push(Check::exact(
            format!("c{c}_alpha_mass"),
            fam.alpha_density.mass()?,
            1.0,
            1e-6,
        ));

        let a = ctx.exact(2 * k as u32, n_exact, |s| {
            let (lam, u) = (s.uniform(), s.uniform());
            lam * u - c * (1.0 - u)
        });
        positive_share(ctx, &format!("c{c}_a_share_positive"), &a, fam.p_pos)?;
        density_ks(ctx, &format!("c{c}_a_vs_density"), a, &fam.a_density)?;

        let alpha_c: Vec<f64> = b1_l1_lambda(ctx, 2 * k as u32 + 1, n_exact)
            .iter()
            .map(|r| r[2] * r[1] - c * r[0].abs())
            .collect();
        positive_share(ctx, &format!("c{c}_alpha_share_positive"), &alpha_c, fam.p_pos)?;
        density_ks(ctx, &format!("c{c}_alpha_vs_density"), alpha_c, &fam.alpha_density)?;
    }
    // at c = ½ the family is the one behind the sign mass of α
    let half = ac_family(0.5)?;
    ctx.push(Check::exact("half_p_pos", half.p_pos, 1.0 - 0.5 * 3f64.ln(), 1e-15));
    let worst = (0..=300)
        .map(|i| -0.6 + 1.7 * i as f64 / 300.0)
        .map(|x| (a_c_density(x, 0.5) - u_density(x)).abs())
        .fold(0.0, f64::max);
    ctx.push(Check::exact("half_density_equals_u", worst, 0.0, 1e-15));
    Ok(())
}
