use bridgelaw::experiments::{run, Budget, ExperimentName, ExperimentSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let budget: Budget = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(Budget::Quick);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let only: Option<ExperimentName> = args.get(3).map(|s| s.parse().unwrap());
    for name in ExperimentName::ALL {
        if only.is_some_and(|o| o != name) {
            continue;
        }
        let r = run(&ExperimentSpec::new(name, budget, seed)).unwrap();
        println!(
            "{:<22} {:>7.2}s checks={:>3} stat_fail={} allowed={} exact_fail={} overall={}",
            name.as_str(),
            r.wall_time_secs,
            r.checks.len(),
            r.policy.statistical_failures,
            r.policy.allowed_failures,
            r.policy.exact_failures,
            r.overall
        );
        for c in r.failed_checks() {
            println!("    FAIL {} stat={:.6e} target={:?} tol={:.3e} p={:?}", c.id, c.statistic, c.target, c.tolerance, c.p_value);
        }
    }
}
