use super::{CompensatedSum, CrossingCorrection, PathError, StepScheme};
use crate::rng::RandomStream;

/// First passage of the running maximum over a level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HitRecord {
    pub level: f64,
    /// First grid index at or after the crossing; always the last index.
    pub index: usize,
    /// Crossing-time estimate, `<= times[index]`.
    pub t_hit: f64,
}

/// Brownian values and running maximum on a (possibly graded) time grid.
#[derive(Clone, Debug, Default)]
pub struct DiscretePath {
    pub times: Vec<f64>,
    pub w: Vec<f64>,
    pub m: Vec<f64>,
    pub hit: Option<HitRecord>,
    pub correction: Option<CrossingCorrection>,
}

/// Path state at an off-grid time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint {
    pub time: f64,
    pub w: f64,
    pub m: f64,
    /// Grid index at the left end of the step containing `time`.
    pub left: usize,
    /// True when the running maximum rose between `times[left]` and `time`.
    pub new_max: bool,
}

enum Stop {
    MaxHits(f64),
    Time(f64),
}

/// Simulates `W` until its running maximum reaches `level`.
pub fn simulate_until_max_hits(
    stream: &mut RandomStream,
    scheme: &StepScheme,
    level: f64,
) -> Result<DiscretePath, PathError> {
    if !(level > 0.0 && level.is_finite()) {
        return Err(PathError::InvalidParameter(format!("level must be > 0, got {level}")));
    }
    let mut path = DiscretePath::default();
    run(&mut path, stream, scheme, Stop::MaxHits(level))?;
    Ok(path)
}

/// Simulates `W` on `[0, horizon]`, ending exactly at `horizon`.
pub fn simulate_to_time(
    stream: &mut RandomStream,
    scheme: &StepScheme,
    horizon: f64,
) -> Result<DiscretePath, PathError> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(PathError::InvalidParameter(format!("horizon must be > 0, got {horizon}")));
    }
    let mut path = DiscretePath::default();
    run(&mut path, stream, scheme, Stop::Time(horizon))?;
    Ok(path)
}

/// Exact maximum of a Brownian bridge from `x0` to `x1` over a step `h`,
/// given an open uniform `u`.
#[inline]
pub(crate) fn bridge_max(x0: f64, x1: f64, h: f64, u: f64) -> f64 {
    let d = x1 - x0;
    0.5 * (x0 + x1 + (d * d - 2.0 * h * u.ln()).sqrt())
}

/// Probability that a Brownian bridge from `x0` to `x1` over `h` reaches `a`.
#[inline]
pub fn bridge_crossing_probability(x0: f64, x1: f64, h: f64, a: f64) -> f64 {
    if x0 >= a || x1 >= a {
        1.0
    } else {
        (-2.0 * (a - x0) * (a - x1) / h).exp()
    }
}

fn run(
    path: &mut DiscretePath,
    stream: &mut RandomStream,
    scheme: &StepScheme,
    stop: Stop,
) -> Result<(), PathError> {
    scheme.validate()?;
    path.times.clear();
    path.w.clear();
    path.m.clear();
    path.hit = None;
    path.correction = Some(scheme.crossing_correction);

    let limit = scheme.horizon_limit();
    let mut clock = CompensatedSum::default();
    let (mut w, mut m) = (0.0f64, 0.0f64);
    path.times.push(0.0);
    path.w.push(w);
    path.m.push(m);

    loop {
        let t = clock.value();
        let mut h = scheme.step_for_gap(m - w);
        let mut last = false;
        if let Stop::Time(end) = stop {
            if t + h >= end * (1.0 - 1e-15) {
                h = end - t;
                last = true;
            }
        }
        if h <= 0.0 {
            break;
        }
        let w1 = w + h.sqrt() * stream.gaussian();
        let peak = match scheme.crossing_correction {
            CrossingCorrection::Bridge => bridge_max(w, w1, h, stream.open_uniform()),
            CrossingCorrection::None => w1,
        };
        let m1 = m.max(peak);
        clock.add(h);
        let t1 = if last {
            match stop {
                Stop::Time(end) => end,
                Stop::MaxHits(_) => unreachable!(),
            }
        } else {
            clock.value()
        };
        path.times.push(t1);
        path.w.push(w1);
        path.m.push(m1);

        if let Stop::MaxHits(level) = stop {
            if peak >= level {
                let t_hit = match scheme.crossing_correction {
                    CrossingCorrection::Bridge => t + 0.5 * h,
                    CrossingCorrection::None => t + h * (level - w) / (w1 - w),
                };
                path.hit = Some(HitRecord {
                    level,
                    index: path.times.len() - 1,
                    t_hit,
                });
                return Ok(());
            }
            if t1 > limit {
                return Err(PathError::HorizonExhausted {
                    chunks: scheme.max_chunks,
                    horizon: t1,
                });
            }
        }
        if last {
            break;
        }
        w = w1;
        m = m1;
    }
    Ok(())
}

impl DiscretePath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// End of the useful path: the hit time if any, else the last grid time.
    pub fn end_time(&self) -> f64 {
        match self.hit {
            Some(h) => h.t_hit,
            None => *self.times.last().unwrap_or(&0.0),
        }
    }

    /// Estimated first time the running maximum reaches `level`.
    pub fn first_passage_time(&self, level: f64) -> Option<f64> {
        let i = self.m.iter().position(|&m| m >= level)?;
        if i == 0 {
            return Some(0.0);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let est = match self.correction {
            Some(CrossingCorrection::None) => {
                let (w0, w1) = (self.w[i - 1], self.w[i]);
                if w1 > w0 {
                    t0 + (t1 - t0) * ((level - w0) / (w1 - w0)).clamp(0.0, 1.0)
                } else {
                    t1
                }
            }
            _ => 0.5 * (t0 + t1),
        };
        Some(match self.hit {
            Some(h) => est.min(h.t_hit),
            None => est,
        })
    }

    /// Samples `(W, M)` at time `t`.
    ///
    /// Without crossing correction `W` is linearly interpolated and
    /// `M = max(M_left, W)`. With bridge correction `W` is drawn from the
    /// Brownian bridge between the grid values, conditioned to stay below the
    /// running maximum when the step did not raise it. A time in the final
    /// partial step before a hit is clamped to the hit, where `W = M = level`.
    pub fn sample_at(&self, t: f64, stream: &mut RandomStream) -> PathPoint {
        let n = self.times.len();
        assert!(n > 0, "empty path");
        if let Some(hit) = self.hit {
            if t > self.times[hit.index - 1] {
                return PathPoint {
                    time: hit.t_hit,
                    w: hit.level,
                    m: hit.level,
                    left: hit.index - 1,
                    new_max: true,
                };
            }
        }
        if t <= 0.0 {
            return PathPoint { time: 0.0, w: self.w[0], m: self.m[0], left: 0, new_max: false };
        }
        if t >= self.times[n - 1] {
            return PathPoint {
                time: t,
                w: self.w[n - 1],
                m: self.m[n - 1],
                left: n - 1,
                new_max: false,
            };
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (w0, w1) = (self.w[i], self.w[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = t1 - t0;
        let s = t - t0;
        if s <= 0.0 {
            return PathPoint { time: t, w: w0, m: m0, left: i, new_max: false };
        }
        match self.correction {
            Some(CrossingCorrection::Bridge) => {
                let mean = w0 + (s / h) * (w1 - w0);
                let sd = (s * (h - s) / h).max(0.0).sqrt();
                if m1 <= m0 {
                    // The step stayed below m0: rejection from the free bridge.
                    let c = m0;
                    let mut y = mean.min(c);
                    if c > w0 && c > w1 {
                        for _ in 0..512 {
                            let cand = mean + sd * stream.gaussian();
                            if cand >= c {
                                continue;
                            }
                            let keep = (1.0 - (-2.0 * (c - w0) * (c - cand) / s).exp())
                                * (1.0 - (-2.0 * (c - cand) * (c - w1) / (h - s)).exp());
                            if stream.uniform() < keep {
                                y = cand;
                                break;
                            }
                        }
                    }
                    PathPoint { time: t, w: y, m: m0, left: i, new_max: false }
                } else {
                    let mut y = mean + sd * stream.gaussian();
                    let mut tries = 0;
                    while y > m1 && tries < 64 {
                        y = mean + sd * stream.gaussian();
                        tries += 1;
                    }
                    let y = y.min(m1);
                    let peak = bridge_max(w0, y, s, stream.open_uniform());
                    let m = m0.max(peak).min(m1).max(y);
                    PathPoint { time: t, w: y, m, left: i, new_max: m > m0 }
                }
            }
            _ => {
                let y = w0 + (s / h) * (w1 - w0);
                let m = m0.max(y);
                PathPoint { time: t, w: y, m, left: i, new_max: m > m0 }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_stream;

    #[test]
    fn running_max_is_monotone_and_dominates() {
        let scheme = StepScheme::new(1e-3).unwrap();
        for seed in 0..20 {
            let mut s = make_stream(seed, 0);
            let p = simulate_until_max_hits(&mut s, &scheme, 1.0).unwrap();
            assert_eq!(p.w[0], 0.0);
            assert_eq!(p.m[0], 0.0);
            for i in 1..p.len() {
                assert!(p.m[i] >= p.m[i - 1]);
                assert!(p.m[i] >= p.w[i]);
                assert!(p.times[i] > p.times[i - 1]);
            }
            let hit = p.hit.unwrap();
            assert_eq!(hit.index, p.len() - 1);
            assert!(*p.m.last().unwrap() >= 1.0);
            assert!(hit.t_hit <= p.times[hit.index]);
            assert!(hit.t_hit >= p.times[hit.index - 1]);
        }
    }

    #[test]
    fn uncorrected_hit_interpolates_to_level() {
        let scheme = StepScheme::new(1e-3)
            .unwrap()
            .with_correction(CrossingCorrection::None);
        let mut s = make_stream(5, 5);
        let p = simulate_until_max_hits(&mut s, &scheme, 1.0).unwrap();
        let hit = p.hit.unwrap();
        let (i, j) = (hit.index - 1, hit.index);
        let frac = (hit.t_hit - p.times[i]) / (p.times[j] - p.times[i]);
        let w = p.w[i] + frac * (p.w[j] - p.w[i]);
        assert!((w - 1.0).abs() < 1e-12);
        assert!(p.w[j] >= 1.0);
    }

    #[test]
    fn value_at_hit_is_level() {
        let scheme = StepScheme::new(1e-3).unwrap();
        let mut s = make_stream(9, 1);
        let p = simulate_until_max_hits(&mut s, &scheme, 1.0).unwrap();
        let t_hit = p.hit.unwrap().t_hit;
        let pt = p.sample_at(t_hit, &mut s);
        assert_eq!(pt.w, 1.0);
        assert_eq!(pt.m, 1.0);
    }

    #[test]
    fn fixed_horizon_ends_exactly() {
        let scheme = StepScheme::new(1e-3).unwrap();
        let mut s = make_stream(2, 3);
        let p = simulate_to_time(&mut s, &scheme, 1.0).unwrap();
        assert_eq!(*p.times.last().unwrap(), 1.0);
        assert!(p.hit.is_none());
    }

    #[test]
    fn rejects_bad_level() {
        let scheme = StepScheme::new(1e-3).unwrap();
        let mut s = make_stream(2, 3);
        assert!(simulate_until_max_hits(&mut s, &scheme, 0.0).is_err());
        assert!(simulate_until_max_hits(&mut s, &scheme, -1.0).is_err());
    }

    #[test]
    fn horizon_exhaustion_is_reported() {
        // Level 50 is essentially never reached within 2 time units.
        let scheme = StepScheme::new(1e-2).unwrap().with_max_chunks(1);
        let mut s = make_stream(1, 1);
        let err = simulate_until_max_hits(&mut s, &scheme, 50.0).unwrap_err();
        assert!(matches!(err, PathError::HorizonExhausted { chunks: 1, .. }));
    }

    #[test]
    fn bridge_max_inverts_crossing_probability() {
        // P(max >= a) from the sampler agrees with the closed form.
        let (x0, x1, h, a) = (0.0, 0.1, 0.05, 0.2);
        let mut s = make_stream(4, 4);
        let n = 400_000;
        let hits = (0..n)
            .filter(|_| bridge_max(x0, x1, h, s.open_uniform()) >= a)
            .count();
        let p = bridge_crossing_probability(x0, x1, h, a);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!(((hits as f64 / n as f64) - p).abs() < 4.0 * se);
    }

    #[test]
    fn sample_at_stays_below_unraised_max() {
        let scheme = StepScheme::new(1e-3).unwrap();
        let mut s = make_stream(77, 0);
        let p = simulate_until_max_hits(&mut s, &scheme, 1.0).unwrap();
        let t_end = p.hit.unwrap().t_hit;
        for k in 1..500 {
            let t = t_end * k as f64 / 500.0;
            let pt = p.sample_at(t, &mut s);
            assert!(pt.m >= pt.w - 1e-15);
            assert!(pt.m <= 1.0 + 1e-12);
            assert!(pt.m >= p.m[pt.left]);
        }
    }
}
