//! Evolutionary coefficient of growth `B` of a subsystem `P` relative to its
//! host `H`, and the three-grade scale it maps onto.
//!
//! The reduced estimator regresses `ln P` on `ln H`, valid while both series sit
//! far below their asymptotes. The exact estimator fits a logistic to each
//! series and regresses the host logit on the subsystem logit, which is linear
//! for logistic data over any window.

use std::fmt;
use std::str::FromStr;

use crate::dataset::{log_transform, PairedSeries};
use crate::error::{Error, Result};
use crate::regress::{ols, t_two_sided_p, OlsFit};
use crate::scalar::Scalar;
use crate::sigmoid::{fit_logistic_with, logit, LogisticFit, SearchOptions};

/// Standard errors at or below this are treated as an exact fit.
pub const DEGENERATE_SE: f64 = 1e-9;
/// Tolerance on `|B − 1|` when an exact fit forces point classification.
pub const POINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Log-log regression of `P` on `H`.
    Reduced,
    /// Logit-logit regression using fitted asymptotes.
    Exact,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Reduced => "reduced",
            Mode::Exact => "exact",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reduced" => Ok(Mode::Reduced),
            "exact" => Ok(Mode::Exact),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}` (expected reduced|exact)"))),
        }
    }
}

/// Grade on the ordinal scale of technological evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Grade {
    /// `B < 1`
    Low = 1,
    /// `B = 1`
    Average = 2,
    /// `B > 1`
    High = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Underdevelopment,
    Growth,
    Development,
}

impl Grade {
    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            Grade::Low => "Low",
            Grade::Average => "Average",
            Grade::High => "High",
        }
    }

    pub fn stage(self) -> Stage {
        match self {
            Grade::Low => Stage::Underdevelopment,
            Grade::Average => Stage::Growth,
            Grade::High => Stage::Development,
        }
    }

    pub fn evolution_type(self) -> &'static str {
        match self {
            Grade::Low => "Slowed evolution of technology of the whole system",
            Grade::Average => "Proportional evolution of technology",
            Grade::High => "Accelerated evolution of technology",
        }
    }

    pub fn prediction(self) -> &'static str {
        match self {
            Grade::Low => "Technologies improve slowly over the course of time",
            Grade::Average => "Technologies have a steady-state path of evolution",
            Grade::High => "Technologies are likeliest to evolve rapidly",
        }
    }
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Underdevelopment => "Underdevelopment",
            Stage::Growth => "Growth",
            Stage::Development => "Development",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a pair of technologies interacts. A descriptive label only; nothing in
/// the crate infers it from data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InteractionType {
    /// (+, −)
    Parasitism,
    /// (+, 0)
    Commensalism,
    /// (+, +)
    Mutualism,
    /// (++, ++)
    Symbiosis,
}

impl InteractionType {
    pub fn as_str(self) -> &'static str {
        match self {
            InteractionType::Parasitism => "parasitism",
            InteractionType::Commensalism => "commensalism",
            InteractionType::Mutualism => "mutualism",
            InteractionType::Symbiosis => "symbiosis",
        }
    }

    /// Effect signs on (subsystem, host).
    pub fn signs(self) -> (&'static str, &'static str) {
        match self {
            InteractionType::Parasitism => ("+", "-"),
            InteractionType::Commensalism => ("+", "0"),
            InteractionType::Mutualism => ("+", "+"),
            InteractionType::Symbiosis => ("++", "++"),
        }
    }
}

impl FromStr for InteractionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "parasitism" => Ok(InteractionType::Parasitism),
            "commensalism" => Ok(InteractionType::Commensalism),
            "mutualism" => Ok(InteractionType::Mutualism),
            "symbiosis" => Ok(InteractionType::Symbiosis),
            other => Err(Error::InvalidConfig(format!("unknown interaction type `{other}`"))),
        }
    }
}

/// Outcome of testing `B = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification<T> {
    pub grade: Grade,
    pub stage: Stage,
    pub prediction: &'static str,
    /// `(B − 1) / se`; `None` when the standard error is degenerate.
    pub t_unity: Option<T>,
    /// Two-sided p-value of `t_unity` against t(n − 2).
    pub p_unity: Option<T>,
}

fn point_grade<T: Scalar>(b: T) -> Grade {
    let d = b - T::one();
    if d.abs() <= T::of(POINT_TOLERANCE) {
        Grade::Average
    } else if d > T::zero() {
        Grade::High
    } else {
        Grade::Low
    }
}

/// Grades `B` by a two-sided t test of `B = 1` at level `alpha`: rejection with
/// `B > 1` is grade 3, rejection with `B < 1` grade 1, otherwise grade 2.
///
/// A standard error at or below [`DEGENERATE_SE`] (an exact fit) falls back to
/// comparing `B` with 1 under [`POINT_TOLERANCE`].
pub fn classify_grade<T: Scalar>(b: T, se_b: T, n: usize, alpha: T) -> Classification<T> {
    let make = |grade: Grade, t_unity, p_unity| Classification {
        grade,
        stage: grade.stage(),
        prediction: grade.prediction(),
        t_unity,
        p_unity,
    };
    if !(se_b > T::of(DEGENERATE_SE)) || !se_b.is_finite() || n < 3 {
        return make(point_grade(b), None, None);
    }
    let t = (b - T::one()) / se_b;
    match t_two_sided_p(t, (n - 2) as u32) {
        Ok(p) => {
            let grade = if p < alpha {
                if b > T::one() {
                    Grade::High
                } else {
                    Grade::Low
                }
            } else {
                Grade::Average
            };
            make(grade, Some(t), Some(p))
        }
        Err(_) => make(point_grade(b), None, None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionOptions {
    /// Significance level of the `B = 1` test.
    pub alpha: f64,
    /// Share of the fitted asymptote above which the log-log form is flagged.
    pub small_value_threshold: f64,
    pub search: SearchOptions,
}

impl Default for EvolutionOptions {
    fn default() -> Self {
        Self { alpha: 0.05, small_value_threshold: 0.5, search: SearchOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult<T> {
    /// Evolutionary coefficient of growth, always oriented as the growth of the
    /// subsystem relative to the host.
    pub b: T,
    pub se_b: T,
    /// Intercept in the same orientation as `b`.
    pub ln_a: T,
    /// Standard error of `ln_a`; only available in reduced mode.
    pub se_ln_a: Option<T>,
    /// The regression actually run: `ln P` on `ln H` (reduced) or host logit on
    /// subsystem logit (exact).
    pub fit: OlsFit<T>,
    pub classification: Classification<T>,
    pub mode: Mode,
    pub alpha: T,
    /// Set when either series exceeds the small-value share of its asymptote.
    pub small_value_warning: bool,
    pub host_logistic: LogisticFit<T>,
    pub sub_logistic: LogisticFit<T>,
}

impl<T: Scalar> EvolutionResult<T> {
    pub fn grade(&self) -> Grade {
        self.classification.grade
    }

    pub fn stage(&self) -> Stage {
        self.classification.stage
    }

    pub fn prediction(&self) -> &'static str {
        self.classification.prediction
    }
}

fn fit_both<T: Scalar>(p: &PairedSeries<T>, opts: &EvolutionOptions) -> Result<(LogisticFit<T>, LogisticFit<T>)> {
    Ok((fit_logistic_with(p.host(), &opts.search)?, fit_logistic_with(p.sub(), &opts.search)?))
}

fn small_value_flag<T: Scalar>(
    p: &PairedSeries<T>,
    host: &LogisticFit<T>,
    sub: &LogisticFit<T>,
    opts: &EvolutionOptions,
) -> bool {
    let limit = T::of(opts.small_value_threshold);
    host.saturation(p.host().max_value()) > limit || sub.saturation(p.sub().max_value()) > limit
}

/// Dispatches on `mode`.
pub fn estimate<T: Scalar>(p: &PairedSeries<T>, mode: Mode, opts: &EvolutionOptions) -> Result<EvolutionResult<T>> {
    match mode {
        Mode::Reduced => estimate_evolution(p, opts),
        Mode::Exact => estimate_evolution_exact(p, opts),
    }
}

/// Regresses `ln P` on `ln H`; `B` is the slope.
pub fn estimate_evolution<T: Scalar>(p: &PairedSeries<T>, opts: &EvolutionOptions) -> Result<EvolutionResult<T>> {
    let (ln_h, ln_p) = (log_transform(p.host())?, log_transform(p.sub())?);
    let fit = ols(ln_h.values(), ln_p.values())?;
    let (host_logistic, sub_logistic) = fit_both(p, opts)?;
    let alpha = T::of(opts.alpha);
    Ok(EvolutionResult {
        b: fit.slope,
        se_b: fit.se_slope,
        ln_a: fit.intercept,
        se_ln_a: Some(fit.se_intercept),
        classification: classify_grade(fit.slope, fit.se_slope, fit.n, alpha),
        mode: Mode::Reduced,
        alpha,
        small_value_warning: small_value_flag(p, &host_logistic, &sub_logistic, opts),
        fit,
        host_logistic,
        sub_logistic,
    })
}

/// Regresses `ln(H / (K₁ − H))` on `ln(P / (K₂ − P))` with both asymptotes
/// taken from logistic fits. The slope estimates `b_H / b_P`; the reported `B`
/// is its reciprocal, with a delta-method standard error.
pub fn estimate_evolution_exact<T: Scalar>(p: &PairedSeries<T>, opts: &EvolutionOptions) -> Result<EvolutionResult<T>> {
    let (host_logistic, sub_logistic) = fit_both(p, opts)?;
    let odds = |k: T, values: &[T]| -> Result<Vec<T>> {
        values
            .iter()
            .map(|&v| {
                if v > T::zero() && v < k {
                    Ok(-logit(k, v))
                } else {
                    Err(Error::KTooSmall { k: k.as_f64(), value: v.as_f64() })
                }
            })
            .collect()
    };
    let host_odds = odds(host_logistic.k, p.host().values())?;
    let sub_odds = odds(sub_logistic.k, p.sub().values())?;
    let fit = ols(&sub_odds, &host_odds)?;
    if fit.slope == T::zero() {
        return Err(Error::SearchFailure("host logit does not vary with subsystem logit".into()));
    }
    let b = T::one() / fit.slope;
    let se_b = fit.se_slope / (fit.slope * fit.slope);
    let alpha = T::of(opts.alpha);
    Ok(EvolutionResult {
        b,
        se_b,
        ln_a: -fit.intercept / fit.slope,
        se_ln_a: None,
        classification: classify_grade(b, se_b, fit.n, alpha),
        mode: Mode::Exact,
        alpha,
        small_value_warning: small_value_flag(p, &host_logistic, &sub_logistic, opts),
        fit,
        host_logistic,
        sub_logistic,
    })
}
