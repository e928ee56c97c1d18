//! Simple linear regression by ordinary least squares, with the usual
//! inference set: standard errors, t and F statistics, p-values, R² and
//! adjusted R².

mod dist;

pub use dist::{betainc, f_cdf, f_sf, ln_beta, ln_gamma, t_cdf, t_two_sided_p, BETA_MAX_ITER, BETA_TOLERANCE};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fewest observations `ols` accepts; leaves one residual degree of freedom.
pub const MIN_OLS_LEN: usize = 3;

/// Result of regressing `y` on `x` with an intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit<T> {
    pub slope: T,
    pub intercept: T,
    pub se_slope: T,
    pub se_intercept: T,
    /// `slope / se_slope`; infinite for an exact fit with non-zero slope.
    pub t_slope: T,
    /// Two-sided p-value of `t_slope` against t(n − 2).
    pub p_slope: T,
    pub r2: T,
    pub r2_adj: T,
    pub f_stat: T,
    /// Upper-tail p-value of `f_stat` against F(1, n − 2).
    pub p_f: T,
    /// Standard error of the estimate, `sqrt(SSE / (n − 2))`.
    pub resid_se: T,
    pub sse: T,
    pub n: usize,
    pub residuals: Vec<T>,
}

impl<T: Scalar> OlsFit<T> {
    pub fn df_resid(&self) -> u32 {
        (self.n - 2) as u32
    }

    pub fn predict(&self, x: T) -> T {
        self.intercept + self.slope * x
    }

    /// Two-sided p-value for the intercept.
    pub fn p_intercept(&self) -> T {
        p_from_t(self.intercept / self.se_intercept, self.df_resid())
    }
}

fn p_from_t<T: Scalar>(t: T, df: u32) -> T {
    t_two_sided_p(t, df).unwrap_or(T::nan())
}

/// Regresses `y` on `x` with an intercept.
pub fn ols<T: Scalar>(x: &[T], y: &[T]) -> Result<OlsFit<T>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { x: x.len(), y: y.len() });
    }
    let n = x.len();
    if n < MIN_OLS_LEN {
        return Err(Error::InsufficientData { needed: MIN_OLS_LEN, got: n });
    }
    if let Some(i) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i % n));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::ConstantRegressor);
    }

    let nf = T::of_usize(n);
    let x_mean = x.iter().copied().sum::<T>() / nf;
    let y_mean = y.iter().copied().sum::<T>() / nf;
    let (mut sxx, mut sxy, mut sst) = (T::zero(), T::zero(), T::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - x_mean, yi - y_mean);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        sst = sst + dy * dy;
    }
    if sxx <= T::zero() {
        return Err(Error::ConstantRegressor);
    }

    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residuals: Vec<T> = x.iter().zip(y).map(|(&xi, &yi)| yi - (intercept + slope * xi)).collect();
    let sse: T = residuals.iter().map(|&r| r * r).sum();

    let df = n - 2;
    let dff = T::of_usize(df);
    let mse = sse / dff;
    let resid_se = mse.sqrt();
    let se_slope = resid_se / sxx.sqrt();
    let se_intercept = resid_se * (T::one() / nf + x_mean * x_mean / sxx).sqrt();

    let r2 = if sst > T::zero() { (T::one() - sse / sst).max(T::zero()).min(T::one()) } else { T::one() };
    let r2_adj = T::one() - (T::one() - r2) * T::of_usize(n - 1) / dff;

    let t_slope = slope / se_slope;
    let f_stat = (sst - sse).max(T::zero()) / mse;
    let p_f = if f_stat.is_nan() { T::nan() } else { f_sf(f_stat, 1, df as u32).unwrap_or(T::nan()) };

    Ok(OlsFit {
        slope,
        intercept,
        se_slope,
        se_intercept,
        t_slope,
        p_slope: p_from_t(t_slope, df as u32),
        r2,
        r2_adj,
        f_stat,
        p_f,
        resid_se,
        sse,
        n,
        residuals,
    })
}

/// Significance stars: `***` below 0.01, `**` below 0.05, `*` below 0.10.
pub fn significance_stars<T: Scalar>(p: T) -> &'static str {
    match p.as_f64() {
        p if p < 0.01 => "***",
        p if p < 0.05 => "**",
        p if p < 0.10 => "*",
        _ => "",
    }
}
