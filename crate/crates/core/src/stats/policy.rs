/// Distribution of the number of failures among independent checks with the
/// given failure probabilities.
pub fn poisson_binomial_pmf(levels: &[f64]) -> Vec<f64> {
    let mut pmf = vec![1.0];
    for &p in levels {
        let p = p.clamp(0.0, 1.0);
        let mut next = vec![0.0; pmf.len() + 1];
        for (k, &w) in pmf.iter().enumerate() {
            next[k] += w * (1.0 - p);
            next[k + 1] += w * p;
        }
        pmf = next;
    }
    pmf
}

/// Smallest `k` with `P(failures <= k) >= quantile` when every check is a
/// true null failing with its own level.
pub fn allowed_failures(levels: &[f64], quantile: f64) -> usize {
    let pmf = poisson_binomial_pmf(levels);
    let mut acc = 0.0;
    for (k, w) in pmf.iter().enumerate() {
        acc += w;
        if acc >= quantile {
            return k;
        }
    }
    levels.len()
}
