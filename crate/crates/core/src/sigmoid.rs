//! Three-parameter logistic curve `K / (1 + exp(a − b·t))` and its fit to a
//! series by profiling over the asymptote `K`.
//!
//! For a fixed `K` the logit `ln((K − v) / v) = a − b·t` is linear in time, so
//! `a` and `b` come from an OLS line. The remaining one-dimensional problem in
//! `K` is solved by a log-spaced scan followed by golden-section refinement,
//! minimizing the squared error in the original value units.

use crate::dataset::TimeSeries;
use crate::error::{Error, Result};
use crate::regress::ols;
use crate::scalar::Scalar;

/// Logistic value at time `t`.
pub fn logistic<T: Scalar>(k: T, a: T, b: T, t: T) -> T {
    k / (T::one() + (a - b * t).exp())
}

/// `ln((K − v) / v)`; requires `0 < v < K`.
pub fn logit<T: Scalar>(k: T, v: T) -> T {
    ((k - v) / v).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit<T> {
    /// Equilibrium level (upper asymptote).
    pub k: T,
    /// Location constant fixed by the initial conditions.
    pub a: T,
    /// Growth rate per unit time; negative for a declining series.
    pub b: T,
    /// Sum of squared errors in the series' own units.
    pub sse: T,
    /// Time at which the curve crosses `K / 2`, i.e. `a / b`.
    pub inflection_time: T,
    /// False when the search stopped on the upper bound or ran out of iterations.
    pub converged: bool,
    pub evaluations: usize,
}

impl<T: Scalar> LogisticFit<T> {
    pub fn value_at(&self, t: T) -> T {
        logistic(self.k, self.a, self.b, t)
    }

    /// Share of the asymptote reached by `v`.
    pub fn saturation(&self, v: T) -> T {
        v / self.k
    }
}

/// Maps every value `v` to `ln((K − v) / v)`.
pub fn logit_series<T: Scalar>(s: &TimeSeries<T>, k: T) -> Result<Vec<(T, T)>> {
    s.points()
        .map(|(t, v)| {
            if v >= k || v <= T::zero() {
                Err(Error::KTooSmall { k: k.as_f64(), value: v.as_f64() })
            } else {
                Ok((t, logit(k, v)))
            }
        })
        .collect()
}

/// Tuning of the asymptote search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// The lower bound is `max · (1 + lower_margin)`.
    pub lower_margin: f64,
    /// Initial upper bound as a multiple of the largest value.
    pub upper_factor: f64,
    /// When the best scan point sits on the upper bound, the bound grows tenfold
    /// until it reaches this multiple of the largest value.
    pub max_upper_factor: f64,
    /// Log-spaced points per scan segment.
    pub scan_points: usize,
    /// Golden-section iteration cap.
    pub max_iter: usize,
    /// Relative bracket width at which the refinement stops; never below the
    /// scalar type's resolution.
    pub rel_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            lower_margin: 1e-12,
            upper_factor: 10.0,
            max_upper_factor: 1e6,
            scan_points: 64,
            max_iter: 200,
            rel_tol: 1e-12,
        }
    }
}

struct Profile<'a, T> {
    series: &'a TimeSeries<T>,
    evaluations: usize,
}

impl<T: Scalar> Profile<'_, T> {
    /// `(sse, a, b)` at asymptote `k`; `sse` is infinite for an invalid candidate.
    fn eval(&mut self, k: T) -> (T, T, T) {
        self.evaluations += 1;
        let invalid = (T::infinity(), T::nan(), T::nan());
        let Ok(points) = logit_series(self.series, k) else {
            return invalid;
        };
        let (ts, ys): (Vec<T>, Vec<T>) = points.into_iter().unzip();
        let Ok(line) = ols(&ts, &ys) else {
            return invalid;
        };
        let (a, b) = (line.intercept, -line.slope);
        let sse: T = self.series.points().map(|(t, v)| (v - logistic(k, a, b, t)).powi(2)).sum();
        if sse.is_finite() {
            (sse, a, b)
        } else {
            invalid
        }
    }
}

fn log_grid<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / T::of_usize(n - 1);
    (0..n).map(|i| if i + 1 == n { hi } else { (llo + step * T::of_usize(i)).exp() }).collect()
}

pub fn fit_logistic<T: Scalar>(s: &TimeSeries<T>) -> Result<LogisticFit<T>> {
    fit_logistic_with(s, &SearchOptions::default())
}

pub fn fit_logistic_with<T: Scalar>(s: &TimeSeries<T>, opts: &SearchOptions) -> Result<LogisticFit<T>> {
    if s.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: s.len() });
    }
    if s.values().iter().any(|&v| v <= T::zero()) {
        return Err(Error::SearchFailure("values must be positive".into()));
    }
    let max = s.max_value();
    let mut profile = Profile { series: s, evaluations: 0 };

    // Best candidate seen so far: (k, sse).
    let mut best = (T::nan(), T::infinity());
    let consider = |k: T, sse: T, best: &mut (T, T)| {
        if sse < best.1 {
            *best = (k, sse);
        }
    };

    let reference = max * T::of(2.0);
    let (sse_ref, _, _) = profile.eval(reference);
    consider(reference, sse_ref, &mut best);

    let lower = max * T::of(1.0 + opts.lower_margin);
    let cap = max * T::of(opts.max_upper_factor);
    let mut seg_lo = lower;
    let mut seg_hi = max * T::of(opts.upper_factor);
    let mut grid: Vec<(T, T)> = Vec::new();
    loop {
        let ks = log_grid(seg_lo, seg_hi, opts.scan_points.max(3));
        let skip = usize::from(!grid.is_empty());
        for &k in &ks[skip..] {
            let (sse, _, _) = profile.eval(k);
            consider(k, sse, &mut best);
            grid.push((k, sse));
        }
        let at_top = grid.iter().enumerate().min_by(|x, y| x.1 .1.partial_cmp(&y.1 .1).unwrap()).map(|(i, _)| i)
            == Some(grid.len() - 1);
        if !at_top || seg_hi >= cap {
            break;
        }
        seg_lo = seg_hi;
        seg_hi = (seg_hi * T::of(10.0)).min(cap);
    }

    if !best.1.is_finite() {
        return Err(Error::SearchFailure("no asymptote candidate produced a finite fit".into()));
    }

    let i_best = grid
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1.partial_cmp(&y.1 .1).unwrap())
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let on_boundary = i_best + 1 == grid.len() && grid[i_best].0 >= cap;

    // Golden-section refinement on the bracket around the best scan point.
    let mut lo = grid[i_best.saturating_sub(1)].0;
    let mut hi = grid[(i_best + 1).min(grid.len() - 1)].0;
    let inv_phi = T::of((5f64.sqrt() - 1.0) / 2.0);
    let tol = T::of(opts.rel_tol).max(T::of(16.0) * T::epsilon());
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = profile.eval(x1).0;
    let mut f2 = profile.eval(x2).0;
    consider(x1, f1, &mut best);
    consider(x2, f2, &mut best);
    let mut refined = false;
    for _ in 0..opts.max_iter {
        if hi - lo <= tol * (lo + hi) * T::of(0.5) {
            refined = true;
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = profile.eval(x1).0;
            consider(x1, f1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = profile.eval(x2).0;
            consider(x2, f2, &mut best);
        }
    }

    let k = best.0;
    let (sse, a, b) = profile.eval(k);
    Ok(LogisticFit {
        k,
        a,
        b,
        sse,
        inflection_time: a / b,
        converged: refined && !on_boundary,
        evaluations: profile.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(k: f64, a: f64, b: f64, times: impl Iterator<Item = f64>) -> TimeSeries<f64> {
        TimeSeries::new("logistic", "", times.map(|t| (t, logistic(k, a, b, t)))).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        ((x - y) / y).abs()
    }

    #[test]
    fn logit_at_half_and_unit() {
        let s = TimeSeries::new("x", "", [(0.0, 50.0), (1.0, 100.0 / (1.0 + 1f64.exp())), (2.0, 70.0)]).unwrap();
        let l = logit_series(&s, 100.0).unwrap();
        assert_eq!(l[0].1, 0.0);
        assert!((l[1].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn logit_rejects_small_k() {
        let s = TimeSeries::new("x", "", [(0.0, 50.0), (1.0, 60.0), (2.0, 70.0)]).unwrap();
        assert!(matches!(logit_series(&s, 70.0), Err(Error::KTooSmall { .. })));
    }

    #[test]
    fn logit_of_exact_logistic_is_a_line() {
        let s = exact(100.0, 5.0, 0.5, (0..=20).map(f64::from));
        let l = logit_series(&s, 100.0).unwrap();
        for (t, y) in l {
            assert!((y - (5.0 - 0.5 * t)).abs() < 1e-10);
        }
    }

    #[test]
    fn recovers_noiseless_parameters() {
        let s = exact(100.0, 5.0, 0.5, (0..=20).map(f64::from));
        let f = fit_logistic(&s).unwrap();
        assert!(f.converged);
        assert!(rel(f.k, 100.0) < 1e-3, "{f:?}");
        assert!(rel(f.a, 5.0) < 1e-3);
        assert!(rel(f.b, 0.5) < 1e-3);
        assert!(f.k > s.max_value());
        assert!((f.value_at(f.inflection_time) - f.k / 2.0).abs() < 1e-9);
    }

    #[test]
    fn declining_series_gets_negative_rate() {
        // time-reversed exact data: v(t) = logistic(K, a, b, 20 − t) = logistic(K, a − 20b, −b, t)
        let s = exact(100.0, 5.0 - 20.0 * 0.5, -0.5, (0..=20).map(f64::from));
        let f = fit_logistic(&s).unwrap();
        assert!(f.converged);
        assert!(rel(f.b, -0.5) < 1e-3, "{f:?}");
        assert!(rel(f.k, 100.0) < 1e-3);
    }

    #[test]
    fn calendar_years_and_shift() {
        let base = exact(80.0, 2.0, 0.3, (0..25).map(f64::from));
        let shifted = exact(80.0, 2.0 + 0.3 * 1920.0, 0.3, (1920..1945).map(f64::from));
        let (f0, f1) = (fit_logistic(&base).unwrap(), fit_logistic(&shifted).unwrap());
        assert!(rel(f1.k, f0.k) < 1e-6);
        assert!(rel(f1.b, f0.b) < 1e-6);
        assert!((f1.a - (f0.a + f0.b * 1920.0)).abs() < 1e-6 * f1.a.abs());
    }

    #[test]
    fn value_scale_scales_asymptote() {
        let s = exact(100.0, 3.0, 0.4, (0..15).map(f64::from));
        let scaled = TimeSeries::new("x", "", s.points().map(|(t, v)| (t, 7.5 * v))).unwrap();
        let (f0, f1) = (fit_logistic(&s).unwrap(), fit_logistic(&scaled).unwrap());
        assert!(rel(f1.k, 7.5 * f0.k) < 1e-6);
        assert!(rel(f1.a, f0.a) < 1e-6);
        assert!(rel(f1.b, f0.b) < 1e-6);
    }

    #[test]
    fn early_window_pushes_bound_outward() {
        // All values below 5% of K: the asymptote lies beyond ten times the maximum.
        let s = exact(1000.0, 8.0, 0.4, (0..12).map(f64::from));
        assert!(s.max_value() < 50.0);
        let f = fit_logistic(&s).unwrap();
        assert!(rel(f.k, 1000.0) < 1e-3, "{f:?}");
        assert!(rel(f.b, 0.4) < 1e-6);
    }

    #[test]
    fn noisy_fit_beats_reference_candidate() {
        let noise = [0.3, -0.2, 0.5, -0.4, 0.1, 0.0, -0.6, 0.2, 0.4, -0.1, -0.3, 0.6, 0.1, -0.5, 0.2];
        let s = TimeSeries::new("n", "", (0..15).map(|i| (i as f64, logistic(50.0, 4.0, 0.6, i as f64) + noise[i])))
            .unwrap();
        let f = fit_logistic(&s).unwrap();
        let reference = Profile { series: &s, evaluations: 0 }.eval(2.0 * s.max_value()).0;
        assert!(f.sse <= reference);
        assert!(f.k > s.max_value());
    }

    #[test]
    fn exponential_data_does_not_converge() {
        let s = TimeSeries::new("e", "", (0..10).map(|i| (i as f64, (0.3 * i as f64).exp()))).unwrap();
        let f = fit_logistic(&s).unwrap();
        assert!(!f.converged);
        assert!(f.k > 1e5 * s.max_value());
    }

    #[test]
    fn f32_fit() {
        let s: TimeSeries<f32> =
            TimeSeries::new("f", "", (0..=20).map(|i| (i as f32, logistic(100.0f32, 5.0, 0.5, i as f32)))).unwrap();
        let f = fit_logistic(&s).unwrap();
        assert!((f.k - 100.0).abs() < 0.5, "{f:?}");
    }
}
