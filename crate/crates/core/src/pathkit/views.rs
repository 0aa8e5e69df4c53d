use super::{DiscretePath, PathPoint};
use crate::rng::RandomStream;

/// `(|B|, L)` read off a driving path through the Lévy coupling.
///
/// Excursion `k` of `|B|` away from zero starts at every grid index where
/// the local time increased (the reflected path touched zero inside the
/// preceding step, or at the index itself on an uncorrected grid).
#[derive(Clone, Debug, Default)]
pub struct ReflectedView {
    pub abs_b: Vec<f64>,
    pub loc: Vec<f64>,
    /// Excursion id for each grid index.
    pub excursion: Vec<u32>,
    /// One fair sign per excursion; empty for an unsigned view.
    pub signs: Vec<f64>,
}

/// `(R, J)` read off a driving path through Pitman's map.
#[derive(Clone, Debug, Default)]
pub struct BesselView {
    pub r: Vec<f64>,
    pub j: Vec<f64>,
}

impl ReflectedView {
    /// `|B| = M - W`, `L = M`, without drawing excursion signs.
    pub fn unsigned(path: &DiscretePath) -> Self {
        assert!(!path.is_empty(), "empty path");
        let abs_b = path.m.iter().zip(&path.w).map(|(m, w)| m - w).collect();
        let loc = path.m.clone();
        let mut excursion = Vec::with_capacity(path.len());
        let mut id = 0u32;
        excursion.push(0);
        for i in 1..path.len() {
            if path.m[i] > path.m[i - 1] {
                id += 1;
            }
            excursion.push(id);
        }
        Self {
            abs_b,
            loc,
            excursion,
            signs: Vec::new(),
        }
    }

    pub fn excursion_count(&self) -> usize {
        self.excursion.last().map_or(0, |&k| k as usize + 1)
    }

    /// Signed Brownian value at grid index `i`.
    pub fn signed(&self, i: usize) -> f64 {
        self.signs[self.excursion[i] as usize] * self.abs_b[i]
    }

    /// Sign of the excursion straddling an off-grid point.
    pub fn sign_at(&self, pt: &PathPoint) -> f64 {
        let i = if pt.new_max && pt.left + 1 < self.excursion.len() {
            pt.left + 1
        } else {
            pt.left
        };
        self.signs[self.excursion[i] as usize]
    }
}

/// Lévy's map with one independent fair sign per excursion.
pub fn levy_view(path: &DiscretePath, stream: &mut RandomStream) -> ReflectedView {
    let mut view = ReflectedView::unsigned(path);
    let n = view.excursion_count();
    let mut signs = Vec::with_capacity(n);
    while signs.len() < n {
        let bits = stream.next_u64();
        for b in 0..64 {
            if signs.len() == n {
                break;
            }
            signs.push(if (bits >> b) & 1 == 0 { 1.0 } else { -1.0 });
        }
    }
    view.signs = signs;
    view
}

/// Pitman's map: `R = 2M - W`, `J = M`.
pub fn pitman_view(path: &DiscretePath) -> BesselView {
    assert!(!path.is_empty(), "empty path");
    BesselView {
        r: path.m.iter().zip(&path.w).map(|(m, w)| 2.0 * m - w).collect(),
        j: path.m.clone(),
    }
}

/// Occupation-density estimate of the local time at zero.
#[derive(Clone, Debug)]
pub struct LocalTimeEstimate {
    pub epsilon: f64,
    /// Estimate at each grid time.
    pub values: Vec<f64>,
    /// False when the finest step is not below `epsilon^2`.
    pub valid_regime: bool,
}

impl LocalTimeEstimate {
    /// Linear interpolation of the estimate at time `t`.
    pub fn at(&self, times: &[f64], t: f64) -> f64 {
        let n = times.len();
        if t <= times[0] {
            return self.values[0];
        }
        if t >= times[n - 1] {
            return self.values[n - 1];
        }
        let i = times.partition_point(|&x| x <= t) - 1;
        let f = (t - times[i]) / (times[i + 1] - times[i]);
        self.values[i] + f * (self.values[i + 1] - self.values[i])
    }
}

/// `(1/2ε) · meas{s <= t : |B_s| < ε}` by the trapezoid rule on the grid.
///
/// Only a cross-check for `ReflectedView::loc`; it needs `dt << ε²`.
pub fn direct_local_time(path: &DiscretePath, view: &ReflectedView, epsilon: f64) -> LocalTimeEstimate {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let n = path.len();
    let mut values = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut min_dt = f64::INFINITY;
    values.push(0.0);
    let inside = |i: usize| -> f64 {
        let v = if view.signs.is_empty() {
            view.abs_b[i]
        } else {
            view.signed(i).abs()
        };
        if v < epsilon {
            1.0
        } else {
            0.0
        }
    };
    for i in 1..n {
        let h = path.times[i] - path.times[i - 1];
        if i + 1 < n || n == 2 {
            min_dt = min_dt.min(h);
        }
        acc += 0.5 * (inside(i - 1) + inside(i)) * h;
        values.push(acc / (2.0 * epsilon));
    }
    let valid_regime = min_dt < epsilon * epsilon;
    if !valid_regime {
        log::warn!(
            "direct local time: dt = {min_dt:.3e} is not below epsilon^2 = {:.3e}",
            epsilon * epsilon
        );
    }
    LocalTimeEstimate {
        epsilon,
        values,
        valid_regime,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathkit::{simulate_to_time, simulate_until_max_hits, CrossingCorrection, StepScheme};
    use crate::rng::make_stream;

    #[test]
    fn levy_algebra_holds_pointwise() {
        let scheme = StepScheme::new(1e-3).unwrap();
        let mut s = make_stream(1, 2);
        let p = simulate_until_max_hits(&mut s, &scheme, 1.0).unwrap();
        let v = levy_view(&p, &mut s);
        for i in 0..p.len() {
            assert!(v.abs_b[i] >= 0.0);
            assert!((v.abs_b[i] + p.w[i] - v.loc[i]).abs() < 1e-12);
            if i > 0 {
                assert!(v.loc[i] >= v.loc[i - 1]);
            }
            assert_eq!(v.signed(i).abs(), v.abs_b[i]);
        }
    }

    #[test]
    fn uncorrected_excursions_split_at_touching_indices() {
        let scheme = StepScheme::new(1e-3)
            .unwrap()
            .with_correction(CrossingCorrection::None);
        let mut s = make_stream(3, 2);
        let p = simulate_until_max_hits(&mut s, &scheme, 1.0).unwrap();
        let v = levy_view(&p, &mut s);
        for i in 1..p.len() {
            if v.loc[i] > v.loc[i - 1] {
                // the grid touches zero exactly where the local time grows
                assert_eq!(v.abs_b[i], 0.0);
                assert_eq!(v.excursion[i], v.excursion[i - 1] + 1);
            } else {
                assert_eq!(v.excursion[i], v.excursion[i - 1]);
            }
        }
    }

    #[test]
    fn pitman_algebra_holds_pointwise() {
        let scheme = StepScheme::new(1e-3).unwrap();
        let mut s = make_stream(8, 2);
        let p = simulate_until_max_hits(&mut s, &scheme, 1.0).unwrap();
        let b = pitman_view(&p);
        let v = ReflectedView::unsigned(&p);
        assert_eq!(b.r[0], 0.0);
        for i in 0..p.len() {
            assert!(b.r[i] >= b.j[i] && b.j[i] >= 0.0);
            assert!((b.r[i] - b.j[i] - v.abs_b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn occupation_estimate_is_monotone_and_bounded() {
        let scheme = StepScheme::new(1e-3).unwrap();
        let mut s = make_stream(8, 9);
        let p = simulate_to_time(&mut s, &scheme, 1.0).unwrap();
        let v = levy_view(&p, &mut s);
        let est = direct_local_time(&p, &v, 0.05);
        assert!(est.values.windows(2).all(|w| w[1] >= w[0]));
        let huge = direct_local_time(&p, &v, 10.0);
        assert!(*huge.values.last().unwrap() <= 1.0 / 20.0 + 1e-12);
        assert!(!direct_local_time(&p, &v, 1e-3).valid_regime);
    }
}
