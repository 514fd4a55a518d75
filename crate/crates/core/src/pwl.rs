//! Piecewise-linear, eventually-affine curves and grid-sampled min-plus
//! operations.
//!
//! A [`PwlCurve`] is a list of segments. Segment `i` starts at `start`, takes
//! the value `value` exactly at `start`, jumps to the right limit `right` and
//! then grows with `slope` until the next segment starts. The last segment
//! extends to infinity, so its slope is the long-run rate of the curve.
//! Values and slopes may be `+inf`; this is how the delay element is encoded.
//!
//! The `grid_*` functions are brute-force reference implementations over a
//! uniform grid. They work for any curve and are used to check the exact
//! algebra in [`crate::algebra`].

use alloc::vec::Vec;

use crate::error::{Error, Result};

const INF: f64 = f64::INFINITY;

/// Relative slack accepted when validating monotonicity of user breakpoints.
const MONO_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    /// Value exactly at `start`.
    pub value: f64,
    /// Right limit at `start`; `value <= right`.
    pub right: f64,
    pub slope: f64,
}

impl Segment {
    pub const fn new(start: f64, value: f64, right: f64, slope: f64) -> Self {
        Self {
            start,
            value,
            right,
            slope,
        }
    }

    /// Continuous segment: no jump at `start`.
    pub const fn continuous(start: f64, value: f64, slope: f64) -> Self {
        Self::new(start, value, value, slope)
    }

    fn interior(&self, t: f64) -> f64 {
        let dt = t - self.start;
        if self.right == INF || self.slope == INF {
            INF
        } else {
            self.right + self.slope * dt
        }
    }
}

/// Nondecreasing piecewise-linear curve with `f(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PwlCurve {
    segments: Vec<Segment>,
}

impl PwlCurve {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or(Error::MalformedCurve("no segments"))?;
        if first.start != 0.0 || first.value != 0.0 {
            return Err(Error::MalformedCurve("curve must start at (0, 0)"));
        }
        for (i, s) in segments.iter().enumerate() {
            if s.start.is_nan() || s.value.is_nan() || s.right.is_nan() || s.slope.is_nan() {
                return Err(Error::MalformedCurve("NaN in segment"));
            }
            if !s.start.is_finite() {
                return Err(Error::MalformedCurve("segment start must be finite"));
            }
            if s.value < 0.0 || s.slope < 0.0 {
                return Err(Error::MalformedCurve("negative value or slope"));
            }
            if s.right < s.value {
                return Err(Error::MalformedCurve("right limit below value"));
            }
            if let Some(next) = segments.get(i + 1) {
                if next.start <= s.start {
                    return Err(Error::MalformedCurve("segment starts must increase"));
                }
                let left = s.interior(next.start);
                if next.value < left - MONO_SLACK * left.abs().max(1.0) {
                    return Err(Error::MalformedCurve("curve decreases at a breakpoint"));
                }
            }
        }
        Ok(Self { segments })
    }

    /// Continuous curve through `points` (first must be `(0, 0)`), linear in
    /// between, extended with `final_slope` after the last point.
    pub fn from_points(points: &[(f64, f64)], final_slope: f64) -> Result<Self> {
        let mut segments = Vec::with_capacity(points.len());
        for (i, &(t, v)) in points.iter().enumerate() {
            let slope = match points.get(i + 1) {
                Some(&(_, v1)) if v1 == INF => INF,
                Some(&(t1, v1)) => (v1 - v) / (t1 - t),
                None => final_slope,
            };
            segments.push(Segment::continuous(t, v, slope));
        }
        Self::new(segments)
    }

    pub fn zero() -> Self {
        Self {
            segments: alloc::vec![Segment::continuous(0.0, 0.0, 0.0)],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Long-run slope (slope of the last segment).
    pub fn final_slope(&self) -> f64 {
        let last = self.segments[self.segments.len() - 1];
        if last.right == INF {
            INF
        } else {
            last.slope
        }
    }

    fn segment_at(&self, t: f64) -> &Segment {
        let idx = self.segments.partition_point(|s| s.start <= t);
        &self.segments[idx.saturating_sub(1)]
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "curves are defined on t >= 0");
        let seg = self.segment_at(t);
        if t == seg.start {
            seg.value
        } else {
            seg.interior(t)
        }
    }

    /// Right limit `f(t+)`.
    pub fn evaluate_right(&self, t: f64) -> f64 {
        let seg = self.segment_at(t);
        if t == seg.start {
            seg.right
        } else {
            seg.interior(t)
        }
    }

    /// Lower pseudo-inverse `inf { t >= 0 : f(t) >= y }`, with the convention
    /// that reaching `y` in a right limit counts. `+inf` if never reached.
    pub fn lower_pseudo_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        for (i, s) in self.segments.iter().enumerate() {
            if s.value >= y || s.right >= y || s.slope == INF {
                return s.start;
            }
            if s.slope > 0.0 {
                let t = s.start + (y - s.right) / s.slope;
                match self.segments.get(i + 1) {
                    Some(next) if t >= next.start => continue,
                    _ => return t,
                }
            }
        }
        INF
    }
}

/// Uniform sampling grid `t_k = k * step`, `k = 0..=n`, with
/// `n = round(horizon / step)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub horizon: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(horizon: f64, step: f64) -> Result<Self> {
        crate::error::check_positive("horizon", horizon)?;
        crate::error::check_positive("step", step)?;
        Ok(Self { horizon, step })
    }

    pub fn len(&self) -> usize {
        libm::round(self.horizon / self.step) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    /// Error allowance for comparing an exact result to a grid result when
    /// the operands' slopes sum to `combined_slope`.
    pub fn tolerance(&self, combined_slope: f64) -> f64 {
        self.step * combined_slope + 1e-9
    }
}

/// A curve sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl Sampled {
    pub fn from_curve(curve: &PwlCurve, grid: GridSpec) -> Self {
        let values = (0..grid.len())
            .map(|k| curve.evaluate(grid.time(k)))
            .collect();
        Self { grid, values }
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.grid.time(k), v))
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

/// `(f ⊗ g)(t_k) = min_j f(t_k - t_j) + g(t_j)` over grid points.
pub fn grid_convolve(f: &PwlCurve, g: &PwlCurve, grid: GridSpec) -> Sampled {
    let n = grid.len();
    let fv: Vec<f64> = (0..n).map(|k| f.evaluate(grid.time(k))).collect();
    let gv: Vec<f64> = (0..n).map(|k| g.evaluate(grid.time(k))).collect();
    let values = (0..n)
        .map(|k| (0..=k).map(|j| fv[k - j] + gv[j]).fold(INF, f64::min))
        .collect();
    Sampled { grid, values }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deconvolution {
    pub samples: Sampled,
    /// The supremum was still increasing at the last `u` of the grid.
    pub truncated: bool,
    /// `f` grows faster than `g` in the long run, so the true result is `+inf`.
    pub unbounded: bool,
}

/// `(f ⊘ g)(t_k) = sup_{u_j <= horizon} f(t_k + u_j) - g(u_j)`.
///
/// Right limits are included as candidates, so a jump of `f` at a sampled
/// point contributes its limit. Terms with `g(u) = +inf` are skipped.
pub fn grid_deconvolve(f: &PwlCurve, g: &PwlCurve, grid: GridSpec) -> Deconvolution {
    let n = grid.len();
    let fv: Vec<f64> = (0..2 * n).map(|k| f.evaluate(grid.time(k))).collect();
    let fr: Vec<f64> = (0..2 * n).map(|k| f.evaluate_right(grid.time(k))).collect();
    let gv: Vec<f64> = (0..n).map(|k| g.evaluate(grid.time(k))).collect();
    let gr: Vec<f64> = (0..n).map(|k| g.evaluate_right(grid.time(k))).collect();

    let diff = |a: f64, b: f64| if b == INF { f64::NEG_INFINITY } else { a - b };

    let mut truncated = false;
    let values = (0..n)
        .map(|k| {
            let mut best = f64::NEG_INFINITY;
            let mut at_last = f64::NEG_INFINITY;
            let mut before_last = f64::NEG_INFINITY;
            for j in 0..n {
                let cand = diff(fv[k + j], gv[j]).max(diff(fr[k + j], gr[j]));
                best = best.max(cand);
                if j + 2 == n {
                    before_last = cand;
                }
                if j + 1 == n {
                    at_last = cand;
                }
            }
            if n >= 2 && at_last > before_last + 1e-12 && at_last >= best {
                truncated = true;
            }
            best
        })
        .collect();

    let (fs, gs) = (f.final_slope(), g.final_slope());
    Deconvolution {
        samples: Sampled { grid, values },
        truncated,
        unbounded: fs > gs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridHdev {
    pub value: f64,
    /// The deviation was still increasing at the horizon.
    pub truncated: bool,
}

/// Largest horizontal distance `sup_s inf { u >= 0 : alpha(s) <= beta(s + u) }`
/// with `s` on the grid (right limits included) and `u` solved exactly
/// through the pseudo-inverse of `beta`.
pub fn grid_hdev(alpha: &PwlCurve, beta: &PwlCurve, grid: GridSpec) -> GridHdev {
    if alpha.final_slope() > beta.final_slope() {
        return GridHdev {
            value: INF,
            truncated: false,
        };
    }
    let n = grid.len();
    let dev_at = |k: usize| {
        let s = grid.time(k);
        let y = alpha.evaluate(s).max(alpha.evaluate_right(s));
        (beta.lower_pseudo_inverse(y) - s).max(0.0)
    };
    let mut best: f64 = 0.0;
    let mut prev = 0.0;
    let mut last = 0.0;
    for k in 0..n {
        let d = dev_at(k);
        best = best.max(d);
        if k + 2 == n {
            prev = d;
        }
        if k + 1 == n {
            last = d;
        }
    }
    GridHdev {
        value: best,
        truncated: n >= 2 && last > prev + 1e-12 && last >= best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn token_bucket(r: f64, b: f64) -> PwlCurve {
        PwlCurve::new(vec![Segment::new(0.0, 0.0, b, r)]).unwrap()
    }

    fn rate_latency(r: f64, t: f64) -> PwlCurve {
        if t == 0.0 {
            PwlCurve::from_points(&[(0.0, 0.0)], r).unwrap()
        } else {
            PwlCurve::from_points(&[(0.0, 0.0), (t, 0.0)], r).unwrap()
        }
    }

    fn delay(w: f64) -> PwlCurve {
        PwlCurve::new(vec![
            Segment::continuous(0.0, 0.0, 0.0),
            Segment::new(w, 0.0, INF, INF),
        ])
        .unwrap()
    }

    #[test]
    fn evaluate_token_bucket() {
        let c = token_bucket(0.1, 0.001);
        assert_eq!(c.evaluate(0.0), 0.0);
        assert!((c.evaluate(1.0) - 0.101).abs() < 1e-15);
        assert_eq!(c.evaluate_right(0.0), 0.001);
    }

    #[test]
    fn evaluate_delay_element() {
        let d = delay(4.0);
        assert_eq!(d.evaluate(5.0), INF);
        assert_eq!(d.evaluate(4.0), 0.0);
        assert_eq!(d.evaluate_right(4.0), INF);
        assert_eq!(d.final_slope(), INF);
    }

    #[test]
    fn rejects_malformed() {
        assert!(PwlCurve::new(vec![]).is_err());
        assert!(PwlCurve::new(vec![Segment::continuous(1.0, 0.0, 1.0)]).is_err());
        assert!(PwlCurve::new(vec![Segment::continuous(0.0, 1.0, 1.0)]).is_err());
        let decreasing = vec![
            Segment::continuous(0.0, 0.0, 1.0),
            Segment::continuous(1.0, 0.5, 1.0),
        ];
        assert!(PwlCurve::new(decreasing).is_err());
        let unordered = vec![
            Segment::continuous(0.0, 0.0, 1.0),
            Segment::continuous(0.0, 0.0, 1.0),
        ];
        assert!(PwlCurve::new(unordered).is_err());
        assert!(GridSpec::new(0.0, 0.1).is_err());
        assert!(GridSpec::new(1.0, -0.1).is_err());
    }

    #[test]
    fn pseudo_inverse() {
        let b = rate_latency(2.0, 1.0);
        assert_eq!(b.lower_pseudo_inverse(0.0), 0.0);
        assert!((b.lower_pseudo_inverse(4.0) - 3.0).abs() < 1e-12);
        let d = delay(4.0);
        assert_eq!(d.lower_pseudo_inverse(123.0), 4.0);
        assert_eq!(PwlCurve::zero().lower_pseudo_inverse(1.0), INF);
    }

    #[test]
    fn convolve_rate_latencies() {
        let grid = GridSpec::new(10.0, 0.01).unwrap();
        let out = grid_convolve(&rate_latency(2.5, 1.0), &rate_latency(4.0, 0.2), grid);
        let expected = rate_latency(2.5, 1.2);
        let tol = grid.tolerance(6.5);
        for (t, v) in out.iter() {
            assert!((v - expected.evaluate(t)).abs() <= tol, "t={t}");
        }
        assert!(out.is_nondecreasing());
    }

    #[test]
    fn convolve_with_zero_curve() {
        let grid = GridSpec::new(5.0, 0.05).unwrap();
        let out = grid_convolve(&token_bucket(1.0, 2.0), &PwlCurve::zero(), grid);
        assert!(out.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn convolve_token_bucket_with_rate_latency_at_ten() {
        // Brute force over s in [0, 10]: gamma(10 - s) + 2.5 s is minimised at
        // s = 0 (1.001); s = 10 gives 25.
        let grid = GridSpec::new(10.0, 0.01).unwrap();
        let out = grid_convolve(&token_bucket(0.1, 0.001), &rate_latency(2.5, 0.0), grid);
        let last = *out.values.last().unwrap();
        assert!((last - 1.001).abs() < 1e-9, "{last}");
    }

    #[test]
    fn deconvolve_identities() {
        let grid = GridSpec::new(10.0, 0.01).unwrap();
        let gamma = token_bucket(0.1, 0.001);

        let out = grid_deconvolve(&gamma, &rate_latency(2.5, 0.0), grid);
        assert!(!out.unbounded && !out.truncated);
        for (t, v) in out.samples.iter() {
            assert!(
                (v - gamma.evaluate_right(t)).abs() <= grid.tolerance(2.6),
                "t={t}"
            );
        }

        let out = grid_deconvolve(&gamma, &delay(4.0), grid);
        let shifted = token_bucket(0.1, 0.401);
        for (t, v) in out.samples.iter() {
            assert!((v - shifted.evaluate_right(t)).abs() < 1e-9, "t={t} v={v}");
        }

        let f = rate_latency(2.5, 1.0);
        let out = grid_deconvolve(&f, &f, grid);
        assert_eq!(out.samples.values[0], 0.0);
    }

    #[test]
    fn deconvolve_flags_unbounded() {
        let grid = GridSpec::new(5.0, 0.05).unwrap();
        let out = grid_deconvolve(&token_bucket(3.0, 1.0), &rate_latency(2.5, 0.0), grid);
        assert!(out.unbounded);
        assert!(out.truncated);
    }

    #[test]
    fn hdev_cases() {
        let grid = GridSpec::new(10.0, 0.01).unwrap();
        let h = grid_hdev(&token_bucket(0.1, 0.001), &rate_latency(2.5, 0.0), grid);
        assert!((h.value - 0.0004).abs() < 1e-12, "{}", h.value);
        assert!(!h.truncated);

        let f = rate_latency(1.0, 0.5);
        assert_eq!(grid_hdev(&f, &f, grid).value, 0.0);

        let h = grid_hdev(&token_bucket(3.0, 1.0), &rate_latency(2.5, 0.0), grid);
        assert_eq!(h.value, INF);
    }
}
