//! Acceptance suite: one line per criterion, then a nonzero exit if any
//! criterion failed. Runs the full budget on three master seeds, so expect
//! several minutes per core.

use std::process::ExitCode;
use std::time::Instant;

use bridgelaw::experiments::{
    run_all, run_all_with_workers, Budget, Check, ExperimentName, ExperimentReport, SuiteReport,
    POLICY_QUANTILE,
};
use bridgelaw::pathkit::sample_subordinator_pair;
use bridgelaw::rng::{family_index, RandomStream};
use bridgelaw::stats::{allowed_failures, MomentAccumulator};
use rayon::prelude::*;

const SEEDS: [u64; 3] = [1, 2, 3];
/// Theorem 1 wall-time limit, in seconds.
const THM1_SECS: f64 = 180.0;
/// Exact first-passage sampler wall-time limit, in seconds.
const APPENDIX_A_SECS: f64 = 10.0;

struct Line {
    ok: bool,
    text: String,
}

/// All checks whose id matches `pred`; fails when none match or `expect`
/// is given and the count differs.
fn checks_where(
    r: &ExperimentReport,
    pred: impl Fn(&str) -> bool,
    expect: Option<usize>,
) -> (bool, Vec<&Check>, String) {
    let picked: Vec<&Check> = r.checks.iter().filter(|c| pred(&c.id)).collect();
    let count_ok = !picked.is_empty() && expect.is_none_or(|n| n == picked.len());
    let failed: Vec<&str> = picked.iter().filter(|c| !c.passed()).map(|c| c.id.as_str()).collect();
    let mut note = format!("{} checks", picked.len());
    if !count_ok {
        note += &format!(" (expected {expect:?})");
    }
    if !failed.is_empty() {
        note += &format!(", failed {failed:?}");
    }
    (count_ok && failed.is_empty(), picked, note)
}

fn ids(r: &ExperimentReport, wanted: &[&str]) -> (bool, String) {
    let (ok, _, note) = checks_where(r, |id| wanted.contains(&id), Some(wanted.len()));
    (ok, note)
}

fn min_p(cs: &[&Check]) -> f64 {
    cs.iter().filter_map(|c| c.p_value).fold(1.0, f64::min)
}

fn max_abs_z(cs: &[&Check]) -> f64 {
    cs.iter()
        .filter_map(|c| c.target.map(|t| (c.statistic - t).abs() / (c.tolerance / 3.0)))
        .fold(0.0, f64::max)
}

fn criterion_1(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::Theorem1).unwrap();
    let (ks_ok, ks, note) = checks_where(r, |id| id.starts_with("ks_"), Some(6));
    let (z_ok, _) = ids(r, &["z_vs_uniform"]);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let time_ok = r.wall_time_secs < THM1_SECS;
    Line {
        ok: ks_ok && z_ok && time_ok,
        text: format!(
            "theorem 1 triplet: {note}, min p {:.4}; z uniform {}; {:.1}s on {cores} core(s) (limit {THM1_SECS}s)",
            min_p(&ks),
            if z_ok { "ok" } else { "failed" },
            r.wall_time_secs
        ),
    }
}

fn criterion_2(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::Alpha).unwrap();
    let (ok, note) = ids(
        r,
        &[
            "exact_mean",
            "exact_second_moment",
            "path_mean_band",
            "path_second_moment_band",
            "path_mean_extrapolated",
            "path_second_moment_extrapolated",
        ],
    );
    let m2 = r.check("exact_second_moment").map_or(f64::NAN, |c| c.statistic);
    Line {
        ok,
        text: format!("alpha moments: {note}; exact E[a^2] = {m2:.5} vs 1/3"),
    }
}

fn criterion_3(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::Alpha).unwrap();
    let target = 1.0 - 0.5 * 3f64.ln();
    let (ok, note) = ids(r, &["exact_share_positive", "path_share_positive_extrapolated"]);
    let target_ok = (target - 0.450694).abs() < 5e-7;
    let est = r.check("exact_share_positive").map_or(f64::NAN, |c| c.statistic);
    Line {
        ok: ok && target_ok,
        text: format!("sign mass: {note}; exact {est:.6} vs {target:.6}"),
    }
}

fn criterion_4(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::Mellin).unwrap();
    let (ok, cs, note) = checks_where(r, |id| id.starts_with("moment_a"), Some(9));
    Line {
        ok: ok && r.spec.exact_draws >= 1_000_000,
        text: format!("Mellin grid: {note}, max |z| {:.2}", max_abs_z(&cs)),
    }
}

fn criterion_5(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::DescB).unwrap();
    let (q_ok, q_note) = ids(r, &["k_mass", "k_negative_mass"]);
    let (h_ok, h_note) = ids(r, &["h_marginal_vs_k_max_error"]);
    let (ks_ok, ks_note) = ids(r, &["path_vs_exact_ks_inv_sqrt_t1", "path_vs_exact_ks_b_at_ut1"]);
    let worst = r.check("h_marginal_vs_k_max_error").map_or(f64::NAN, |c| c.statistic);
    Line {
        ok: q_ok && h_ok && ks_ok,
        text: format!("k and h: (i) {q_note}; (ii) {h_note}, max err {worst:.2e}; (iii) {ks_note}"),
    }
}

fn criterion_6(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::Centered).unwrap();
    let (p_ok, cs, note) = checks_where(r, |id| id.starts_with("path_h"), Some(6));
    let (e_ok, _, e_note) = checks_where(r, |id| id.starts_with("exact_reduced"), Some(3));
    Line {
        ok: p_ok && e_ok,
        text: format!("centered functionals: paths {note}, max |z| {:.2}; reduced form {e_note}", max_abs_z(&cs)),
    }
}

/// Re-times the exact first-passage sampler on its own, since the recipe
/// also runs a path cross-check.
fn time_exact_first_passage(draws: usize) -> (f64, f64) {
    let start = Instant::now();
    let mut worst_z = 0.0f64;
    for (k, l) in [0.25, 0.5, 0.75].into_iter().enumerate() {
        let pairs: Vec<[f64; 2]> = (0..draws as u64)
            .into_par_iter()
            .map(|i| {
                let mut s = RandomStream::new(11, family_index(k as u32, i));
                let p = sample_subordinator_pair(&mut s, l).unwrap();
                [p.tau_l, p.tau_1]
            })
            .collect();
        for lam in [0.5f64, 1.0, 2.0] {
            let acc: MomentAccumulator = pairs.iter().map(|r| r[0] / r[1] * (-lam * r[1]).exp()).collect();
            let target = l * (-(2.0 * lam).sqrt()).exp();
            worst_z = worst_z.max((acc.mean() - target).abs() / acc.std_error());
        }
    }
    (start.elapsed().as_secs_f64(), worst_z)
}

fn criterion_7(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::AppendixA).unwrap();
    let (ok, cs, note) = checks_where(r, |id| id.starts_with("exact_l"), Some(9));
    let (secs, z) = time_exact_first_passage(r.spec.exact_draws);
    Line {
        ok: ok && secs < APPENDIX_A_SECS && z < 3.0 && r.spec.exact_draws >= 1_000_000,
        text: format!(
            "first-passage ratio: {note}, max |z| {:.2}; standalone rerun {secs:.2}s, max |z| {z:.2} (limit {APPENDIX_A_SECS}s)",
            max_abs_z(&cs)
        ),
    }
}

fn criterion_8(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::BesselRatio).unwrap();
    let (ok, note) = ids(r, &["l_mass", "r_gamma_mass", "path_ratio_vs_r_gamma"]);
    let p = r.check("path_ratio_vs_r_gamma").and_then(|c| c.p_value).unwrap_or(f64::NAN);
    Line {
        ok,
        text: format!("Bessel ratio: {note}; path KS p {p:.4}"),
    }
}

fn criterion_9(s: &SuiteReport) -> Line {
    let r = s.report(ExperimentName::AppendixB).unwrap();
    let (ks_ok, ks, ks_note) = checks_where(r, |id| id.ends_with("_a_vs_density"), Some(3));
    let (sh_ok, _, sh_note) = checks_where(r, |id| id.ends_with("_a_share_positive"), Some(3));
    let (half_ok, _) = ids(r, &["half_p_pos"]);
    Line {
        ok: ks_ok && sh_ok && half_ok && r.spec.exact_draws >= 1_000_000,
        text: format!(
            "A_c family: KS {ks_note}, min p {:.4}; shares {sh_note}; c = 1/2 constant {}",
            min_p(&ks),
            if half_ok { "ok" } else { "failed" }
        ),
    }
}

fn criterion_10() -> Line {
    let bodies: Vec<String> = [1, 4, 8]
        .iter()
        .map(|&w| run_all_with_workers(SEEDS[0], Budget::Quick, w).unwrap().body_json())
        .collect();
    let ok = bodies.windows(2).all(|w| w[0] == w[1]);
    Line {
        ok,
        text: format!(
            "determinism: quick suite bodies for 1, 4, 8 workers {} ({} bytes)",
            if ok { "identical" } else { "differ" },
            bodies[0].len()
        ),
    }
}

fn criterion_11(suites: &[SuiteReport]) -> Line {
    let checks: Vec<&Check> = suites.iter().flat_map(|s| s.all_checks()).collect();
    let levels: Vec<f64> = checks.iter().filter(|c| c.is_statistical()).map(|c| c.level).collect();
    let stat_fail = checks.iter().filter(|c| c.is_statistical() && !c.passed()).count();
    let exact_fail = checks.iter().filter(|c| !c.is_statistical() && !c.passed()).count();
    let allowed = allowed_failures(&levels, POLICY_QUANTILE);
    Line {
        ok: stat_fail <= allowed && exact_fail == 0,
        text: format!(
            "global policy over seeds {SEEDS:?}: {stat_fail} of {} statistical checks failed (allowed {allowed}), {exact_fail} deterministic failures",
            levels.len()
        ),
    }
}

fn main() -> ExitCode {
    // `cargo test -- --list` and friends probe the binary; answer and leave
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let suites: Vec<SuiteReport> = SEEDS
        .iter()
        .map(|&seed| run_all(seed, Budget::Full).expect("full suite runs"))
        .collect();
    for s in &suites {
        eprintln!("seed {}: {:.1}s", s.seed, s.wall_time_secs);
    }
    let primary = &suites[0];
    let lines = [
        criterion_1(primary),
        criterion_2(primary),
        criterion_3(primary),
        criterion_4(primary),
        criterion_5(primary),
        criterion_6(primary),
        criterion_7(primary),
        criterion_8(primary),
        criterion_9(primary),
        criterion_10(),
        criterion_11(&suites),
    ];
    for (i, l) in lines.iter().enumerate() {
        println!("criterion {:>2}: {} {}", i + 1, if l.ok { "PASS" } else { "FAIL" }, l.text);
    }
    let passed = lines.iter().filter(|l| l.ok).count();
    println!("acceptance: {passed}/{} criteria passed", lines.len());
    if passed == lines.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
