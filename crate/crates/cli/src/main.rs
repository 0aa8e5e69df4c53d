//! `bridgelaw`: run verifications, export density grids and draw samples.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bridgelaw::experiments::{
    run_all_with_workers, run_with_workers, Budget, Check, ExperimentName, ExperimentSpec,
};
use bridgelaw::laws::{sample_reference, AnalyticDensity, ReferenceKind};
use bridgelaw::pathkit::{sample_triplet, CrossingCorrection, StepScheme, TripletKind};
use bridgelaw::rng::{family_index, RandomStream};

#[derive(Parser, Debug)]
#[command(name = "bridgelaw", version, about = "Verify identities in law for Brownian functionals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one named experiment.
    Verify(VerifyArgs),
    /// Run the whole catalog at a budget.
    VerifyAll(VerifyAllArgs),
    /// Export (x, pdf, cdf) on a grid.
    Density(DensityArgs),
    /// Draw samples from an exact or simulated law.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Master seed.
    #[arg(long, env = "BRIDGELAW_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BudgetArg {
    Quick,
    Full,
}

impl From<BudgetArg> for Budget {
    fn from(b: BudgetArg) -> Self {
        match b {
            BudgetArg::Quick => Budget::Quick,
            BudgetArg::Full => Budget::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CorrectionArg {
    Bridge,
    None,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Experiment name, with or without the `verify_` prefix.
    name: String,
    #[arg(long, value_enum, default_value_t = BudgetArg::Full)]
    budget: BudgetArg,
    /// Simulated paths per sample (overrides the budget).
    #[arg(long)]
    paths: Option<usize>,
    /// Finest time step (overrides the budget).
    #[arg(long)]
    dt: Option<f64>,
    /// Exact draws per sample (overrides the budget).
    #[arg(long)]
    exact_draws: Option<usize>,
    #[arg(long, value_enum)]
    correction: Option<CorrectionArg>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyAllArgs {
    #[arg(long, value_enum, default_value_t = BudgetArg::Quick)]
    budget: BudgetArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// One of u, k, l, alpha, r_gamma, z, z_c, a_c, alpha_c.
    name: String,
    /// `lo:hi:step`.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Parameter of the z_c, a_c and alpha_c families.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// A reference law (thm1_rhs, cor1_hitting_rhs, cor1_bessel_rhs, cor2_rhs,
    /// lemma_exp_pair, fixed_time_factorization, exact_t1, exact_joint_descb)
    /// or a simulated triplet (pseudo_bridge, hitting, bessel, cor2_bridge,
    /// cor2_hitting, cor2_bessel).
    kind: String,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Time for fixed_time_factorization.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    common: Common,
}

/// A configuration problem: reported with exit code 2.
#[derive(Debug)]
struct ConfigError(String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        Self(e.to_string())
    }
}

fn workers(w: Option<usize>) -> Result<usize, ConfigError> {
    match w {
        Some(0) => Err(ConfigError("--workers must be >= 1".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), ConfigError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| ConfigError(format!("{}: {e}", p.display()))),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())?;
            s.flush()?;
            Ok(())
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

fn checks_csv<'a>(rows: impl Iterator<Item = (&'a str, &'a Check)>) -> String {
    let mut s = String::from("experiment,id,statistic,target,tolerance,p_value,level,verdict\n");
    for (name, c) in rows {
        let verdict = if c.passed() { "pass" } else { "fail" };
        let _ = writeln!(
            s,
            "{name},{},{:.16e},{},{:.16e},{},{:.16e},{verdict}",
            c.id,
            c.statistic,
            opt(c.target),
            c.tolerance,
            opt(c.p_value),
            c.level
        );
    }
    s
}

fn verify(a: VerifyArgs) -> Result<bool, ConfigError> {
    let name = ExperimentName::from_str(&a.name)?;
    let mut spec = ExperimentSpec::new(name, a.budget.into(), a.common.seed);
    if let Some(p) = a.paths {
        spec.paths = p;
    }
    if let Some(n) = a.exact_draws {
        spec.exact_draws = n;
    }
    if let Some(dt) = a.dt {
        if !(dt > 0.0) {
            return Err(ConfigError(format!("--dt must be > 0, got {dt}")));
        }
        spec.scheme = spec.scheme.with_dt(dt);
    }
    if let Some(c) = a.correction {
        spec.scheme = spec.scheme.with_correction(match c {
            CorrectionArg::Bridge => CrossingCorrection::Bridge,
            CorrectionArg::None => CrossingCorrection::None,
        });
    }
    spec.validate()?;
    let report = run_with_workers(&spec, workers(a.common.workers)?)?;
    let text = match a.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => checks_csv(report.checks.iter().map(|c| (report.name.as_str(), c))),
    };
    emit(&a.common.out, &text)?;
    eprintln!(
        "{}: {} checks, {} statistical failures (allowed {}), {} exact failures: {}",
        report.name,
        report.checks.len(),
        report.policy.statistical_failures,
        report.policy.allowed_failures,
        report.policy.exact_failures,
        if report.overall { "pass" } else { "FAIL" }
    );
    Ok(report.overall)
}

fn verify_all(a: VerifyAllArgs) -> Result<bool, ConfigError> {
    let suite = run_all_with_workers(a.common.seed, a.budget.into(), workers(a.common.workers)?)?;
    let text = match a.format {
        Format::Json => suite.to_json() + "\n",
        Format::Csv => checks_csv(
            suite
                .reports
                .iter()
                .flat_map(|r| r.checks.iter().map(move |c| (r.name.as_str(), c))),
        ),
    };
    emit(&a.common.out, &text)?;
    for r in &suite.reports {
        eprintln!("{:<22} {}", r.name.as_str(), if r.overall { "pass" } else { "FAIL" });
    }
    eprintln!(
        "suite: {} statistical failures (allowed {}), {} exact failures: {}",
        suite.policy.statistical_failures,
        suite.policy.allowed_failures,
        suite.policy.exact_failures,
        if suite.overall { "pass" } else { "FAIL" }
    );
    Ok(suite.overall)
}

/// Parses `lo:hi:step` into grid points; endpoints and singular points of
/// the density are moved inward by half a step.
fn grid_points(spec: &str, density: &AnalyticDensity) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || ConfigError(format!("grid must be lo:hi:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if !(lo.is_finite() && hi.is_finite() && lo < hi && step > 0.0) {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    if count > 10_000_000 {
        return Err(ConfigError("grid has too many points".into()));
    }
    let (s_lo, s_hi) = density.support();
    let eps = 1e-9 * step;
    let mut pts = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let mut x = lo + step * i as f64;
        if (x - s_lo).abs() <= eps {
            x += 0.5 * step;
        } else if (x - s_hi).abs() <= eps || density.singular_points().iter().any(|&s| (x - s).abs() <= eps) {
            x -= 0.5 * step;
        }
        pts.push(x);
    }
    Ok(pts)
}

fn density(a: DensityArgs) -> Result<bool, ConfigError> {
    let d = AnalyticDensity::by_name(&a.name, a.c)?;
    let pts = grid_points(&a.grid, &d)?;
    let table = d.tabulate_at(pts.clone())?;
    let mut rows = Vec::with_capacity(pts.len());
    for &x in &pts {
        rows.push((x, d.pdf(x)?, table.eval(x)?));
    }
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("x,pdf,cdf\n");
            for (x, p, c) in rows {
                let _ = writeln!(s, "{x:.16e},{p:.16e},{c:.16e}");
            }
            s
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(x, p, c)| serde_json::json!({"x": x, "pdf": p, "cdf": c}))
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({"name": d.name(), "points": v}))? + "\n"
        }
    };
    emit(&a.out, &text)?;
    Ok(true)
}

enum SampleKind {
    Reference(ReferenceKind),
    Simulated(TripletKind),
}

fn sample_kind(s: &str, time: f64) -> Result<SampleKind, ConfigError> {
    use ReferenceKind as Rk;
    let norm = s.trim().to_ascii_lowercase().replace('-', "_");
    Ok(match norm.as_str() {
        "thm1_rhs" => SampleKind::Reference(Rk::Thm1Rhs),
        "cor1_hitting_rhs" => SampleKind::Reference(Rk::Cor1HittingRhs),
        "cor1_bessel_rhs" => SampleKind::Reference(Rk::Cor1BesselRhs),
        "cor2_rhs" => SampleKind::Reference(Rk::Cor2Rhs),
        "lemma_exp_pair" => SampleKind::Reference(Rk::LemmaExpPair),
        "fixed_time_factorization" => {
            if !(time > 0.0) {
                return Err(ConfigError(format!("--s must be > 0, got {time}")));
            }
            SampleKind::Reference(Rk::FixedTimeFactorization { s: time })
        }
        "exact_t1" => SampleKind::Reference(Rk::ExactT1),
        "exact_joint_descb" => SampleKind::Reference(Rk::ExactJointDescB),
        "pseudo_bridge" => SampleKind::Simulated(TripletKind::PseudoBridge),
        "hitting" => SampleKind::Simulated(TripletKind::Hitting),
        "bessel" => SampleKind::Simulated(TripletKind::Bessel),
        "cor2_bridge" => SampleKind::Simulated(TripletKind::Cor2Bridge),
        "cor2_hitting" => SampleKind::Simulated(TripletKind::Cor2Hitting),
        "cor2_bessel" => SampleKind::Simulated(TripletKind::Cor2Bessel),
        _ => return Err(ConfigError(format!("unknown sample kind {s:?}"))),
    })
}

fn sample(a: SampleArgs) -> Result<bool, ConfigError> {
    if a.n == 0 {
        return Err(ConfigError("--n must be > 0".into()));
    }
    let kind = sample_kind(&a.kind, a.s)?;
    let seed = a.common.seed;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(a.n);
    let mut failures = 0usize;
    match kind {
        SampleKind::Reference(k) => {
            let mut stream = RandomStream::new(seed, family_index(0, 0));
            for _ in 0..a.n {
                rows.push(sample_reference(k, &mut stream).coords());
            }
        }
        SampleKind::Simulated(k) => {
            let scheme = StepScheme::new(a.dt)?;
            for i in 0..a.n as u64 {
                let mut stream = RandomStream::new(seed, family_index(1, i));
                match sample_triplet(k, &mut stream, &scheme) {
                    Ok(t) => rows.push(t.coords().to_vec()),
                    Err(bridgelaw::pathkit::PathError::HorizonExhausted { .. }) => failures += 1,
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} paths exhausted their horizon and were dropped");
    }
    let cols = ["x", "y", "z"];
    let arity = rows.first().map_or(0, |r| r.len());
    let text = match a.format {
        Format::Csv => {
            let mut s = cols[..arity].join(",") + "\n";
            for r in &rows {
                let line: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => serde_json::to_string(&rows)? + "\n",
    };
    emit(&a.common.out, &text)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::VerifyAll(a) => verify_all(a),
        Command::Density(a) => density(a),
        Command::Sample(a) => sample(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_nudges_singular_points() {
        let l = AnalyticDensity::l();
        let pts = grid_points("0:1:0.25", &l).unwrap();
        assert_eq!(pts, vec![0.125, 0.25, 0.375, 0.75, 0.875]);
        assert!(grid_points("1:0:0.1", &l).is_err());
        assert!(grid_points("0:1", &l).is_err());
    }

    #[test]
    fn cli_parses() {
        Cli::try_parse_from(["bridgelaw", "density", "k", "--grid", "-5:1:0.01"]).unwrap();
        Cli::try_parse_from(["bridgelaw", "verify", "theorem1", "--paths", "20000", "--seed", "3"]).unwrap();
        assert!(Cli::try_parse_from(["bridgelaw", "frobnicate"]).is_err());
    }
}
