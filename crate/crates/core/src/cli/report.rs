//! The analysis report. JSON is the canonical form; the Markdown rendering is
//! produced from the same [`Report`] value and never recomputes anything.

use std::fmt::Write as _;
use std::io::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::coevo::CoevolutionIndex;
use crate::dataset::{log_transform, PairedSeries};
use crate::descstats::DescriptiveSummary;
use crate::error::{Error, Result};
use crate::evolution::{EvolutionResult, Mode};
use crate::regress::significance_stars;
use crate::sigmoid::{logit, LogisticFit};

use super::json::to_canonical_string;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool_version: String,
    pub inputs: Inputs,
    pub alignment: Alignment,
    pub descriptives: PerSeries<Descriptives>,
    pub logistic_fits: PerSeries<LogisticSummary>,
    pub regression: Regression,
    pub evolution: Evolution,
    pub coevolution: Option<Coevolution>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerSeries<S> {
    pub host: S,
    pub sub: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub file: String,
    pub time_column: String,
    pub value_column: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub host: InputFile,
    pub sub: InputFile,
    pub mode: String,
    pub alpha: f64,
    pub interaction: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alignment {
    pub n_common: usize,
    pub host_dropped: usize,
    pub sub_dropped: usize,
    pub first_time: f64,
    pub last_time: f64,
}

/// Moments of the log-transformed series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptives {
    pub name: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticSummary {
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub sse: f64,
    pub inflection_time: f64,
    pub converged: bool,
    /// Largest observed value as a share of `k`.
    pub max_saturation: f64,
}

/// The OLS line actually fitted, in its own orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regression {
    pub x: String,
    pub y: String,
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    pub se_slope: f64,
    pub se_intercept: f64,
    pub t_slope: Option<f64>,
    pub p_slope: Option<f64>,
    pub p_intercept: Option<f64>,
    pub r2: f64,
    pub r2_adj: f64,
    pub resid_se: f64,
    pub f_stat: Option<f64>,
    pub p_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evolution {
    pub mode: String,
    pub b: f64,
    pub se_b: f64,
    pub ln_a: f64,
    pub se_ln_a: Option<f64>,
    pub n: usize,
    pub alpha: f64,
    pub t_unity: Option<f64>,
    pub p_unity: Option<f64>,
    pub grade: u8,
    pub grade_label: String,
    pub stage: String,
    pub evolution_type: String,
    pub prediction: String,
    pub small_value_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoevolutionComponent {
    pub tech_name: String,
    pub generations: u64,
    pub duration: f64,
    pub ev: f64,
    pub ev_exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coevolution {
    pub components: Vec<CoevolutionComponent>,
    pub cv: f64,
    pub cv_exact: String,
    /// Product of the indices after rounding each to two decimals.
    pub cv_of_rounded: f64,
    pub threshold: f64,
    pub coevolving: bool,
}

/// Two decimals, switching to scientific notation for very large magnitudes.
fn two_decimals(x: f64) -> String {
    if x.abs() >= 1e6 {
        format!("{x:.2e}")
    } else {
        format!("{x:.2}")
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Coevolution {
    pub fn from_index(idx: &CoevolutionIndex<BigRational>) -> Self {
        Self {
            components: idx
                .components
                .iter()
                .map(|c| CoevolutionComponent {
                    tech_name: c.tech_name.clone(),
                    generations: c.generations,
                    duration: ratio_to_f64(&c.duration),
                    ev: ratio_to_f64(&c.ev),
                    ev_exact: c.ev.to_string(),
                })
                .collect(),
            cv: ratio_to_f64(&idx.cv),
            cv_exact: idx.cv.to_string(),
            cv_of_rounded: idx.cv_of_rounded(),
            threshold: ratio_to_f64(&idx.threshold),
            coevolving: idx.is_coevolving(),
        }
    }
}

impl Descriptives {
    pub fn new(name: &str, d: &DescriptiveSummary<f64>) -> Self {
        Self { name: name.to_string(), n: d.n, mean: d.mean, sd: d.sd, skewness: d.skewness, kurtosis: d.kurtosis }
    }
}

impl LogisticSummary {
    pub fn new(fit: &LogisticFit<f64>, max_value: f64) -> Self {
        Self {
            k: fit.k,
            a: fit.a,
            b: fit.b,
            sse: fit.sse,
            inflection_time: fit.inflection_time,
            converged: fit.converged,
            max_saturation: max_value / fit.k,
        }
    }
}

impl Regression {
    pub fn new(r: &EvolutionResult<f64>) -> Self {
        let f = &r.fit;
        let (x, y) = match r.mode {
            Mode::Reduced => ("ln H", "ln P"),
            Mode::Exact => ("ln(P/(K_sub-P))", "ln(H/(K_host-H))"),
        };
        Self {
            x: x.to_string(),
            y: y.to_string(),
            n: f.n,
            slope: f.slope,
            intercept: f.intercept,
            se_slope: f.se_slope,
            se_intercept: f.se_intercept,
            t_slope: finite(f.t_slope),
            p_slope: finite(f.p_slope),
            p_intercept: finite(f.p_intercept()),
            r2: f.r2,
            r2_adj: f.r2_adj,
            resid_se: f.resid_se,
            f_stat: finite(f.f_stat),
            p_f: finite(f.p_f),
        }
    }
}

impl Evolution {
    pub fn new(r: &EvolutionResult<f64>) -> Self {
        let g = r.grade();
        Self {
            mode: r.mode.to_string(),
            b: r.b,
            se_b: r.se_b,
            ln_a: r.ln_a,
            se_ln_a: r.se_ln_a.and_then(finite),
            n: r.fit.n,
            alpha: r.alpha,
            t_unity: r.classification.t_unity.and_then(finite),
            p_unity: r.classification.p_unity.and_then(finite),
            grade: g.number(),
            grade_label: g.label().to_string(),
            stage: g.stage().to_string(),
            evolution_type: g.evolution_type().to_string(),
            prediction: g.prediction().to_string(),
            small_value_warning: r.small_value_warning,
        }
    }

    /// Fitted `ln P` at the given host value, using only reported numbers.
    pub fn fitted_ln_sub(&self, host: f64, logistic: &PerSeries<LogisticSummary>) -> f64 {
        if self.mode == Mode::Exact.as_str() {
            let host_odds = -logit(logistic.host.k, host);
            let sub_odds = self.ln_a + self.b * host_odds;
            (logistic.sub.k / (1.0 + (-sub_odds).exp())).ln()
        } else {
            self.ln_a + self.b * host.ln()
        }
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        to_canonical_string(&serde_json::to_value(self).expect("report serializes"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("malformed report: {e}")))
    }

    pub fn to_markdown(&self) -> String {
        let mut md = String::new();
        let ev = &self.evolution;
        let reg = &self.regression;
        let _ = writeln!(md, "# Evolution of technology report\n");
        let _ = writeln!(
            md,
            "Host: `{}` ({}), subsystem: `{}` ({}); {} common time points, {} to {}. Mode: {}.\n",
            self.inputs.host.file,
            self.inputs.host.value_column,
            self.inputs.sub.file,
            self.inputs.sub.value_column,
            self.alignment.n_common,
            self.alignment.first_time,
            self.alignment.last_time,
            ev.mode
        );

        let _ = writeln!(md, "## Descriptive statistics (log scale)\n");
        let _ = writeln!(md, "| | {} | {} |", self.descriptives.host.name, self.descriptives.sub.name);
        let _ = writeln!(md, "|---|---:|---:|");
        let (h, s) = (&self.descriptives.host, &self.descriptives.sub);
        let _ = writeln!(md, "| N | {} | {} |", h.n, s.n);
        for (label, a, b) in [
            ("Mean", h.mean, s.mean),
            ("Std. Deviation", h.sd, s.sd),
            ("Skewness", h.skewness, s.skewness),
            ("Kurtosis", h.kurtosis, s.kurtosis),
        ] {
            let _ = writeln!(md, "| {label} | {a:.2} | {b:.2} |");
        }

        let _ = writeln!(md, "\n## Logistic fits\n");
        let _ = writeln!(md, "| Series | K | a | b | Inflection | Max / K | Converged |");
        let _ = writeln!(md, "|---|---:|---:|---:|---:|---:|:---:|");
        for (name, l) in [("Host", &self.logistic_fits.host), ("Subsystem", &self.logistic_fits.sub)] {
            let _ = writeln!(
                md,
                "| {name} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} | {} |",
                l.k,
                l.a,
                l.b,
                l.inflection_time,
                l.max_saturation,
                if l.converged { "yes" } else { "no" }
            );
        }

        let _ = writeln!(md, "\n## Estimated relationship\n");
        let _ = writeln!(md, "Dependent variable: {}; explanatory variable: {}.\n", reg.y, reg.x);
        let _ = writeln!(
            md,
            "| | Constant α (St. Err.) | Evolutionary coefficient β=B (St. Err.) | R² adj. (St. Err. of the Estimate) | F (sign.) |"
        );
        let _ = writeln!(md, "|---|---:|---:|---:|---:|");
        let stars = |p: Option<f64>| p.map_or("", significance_stars);
        let constant = match ev.se_ln_a {
            Some(se) => format!("{:.2}{} ({se:.2})", ev.ln_a, stars(reg.p_intercept)),
            None => format!("{:.2}", ev.ln_a),
        };
        let coef_p = if ev.mode == Mode::Reduced.as_str() { reg.p_slope } else { None };
        let f = match (reg.f_stat, reg.p_f) {
            (Some(f), Some(p)) => format!("{} ({p:.3})", two_decimals(f)),
            _ => "exact fit".to_string(),
        };
        let _ = writeln!(
            md,
            "| {} | {constant} | {:.2}{} ({:.2}) | {:.2} ({:.2}) | {f} |",
            self.descriptives.sub.name,
            ev.b,
            stars(coef_p),
            ev.se_b,
            reg.r2_adj,
            reg.resid_se
        );
        let _ = writeln!(md, "\nSignificance: *** p < 0.01, ** p < 0.05, * p < 0.10.\n");
        let test = match (ev.t_unity, ev.p_unity) {
            (Some(t), Some(p)) => format!("test of B = 1: t = {t:.2}, p = {p:.3} at alpha = {}", ev.alpha),
            _ => "exact fit, B compared with 1 directly".to_string(),
        };
        let _ = writeln!(
            md,
            "**Grade {} ({})**: {}; stage {}. {}. ({test})\n",
            ev.grade, ev.grade_label, ev.evolution_type, ev.stage, ev.prediction
        );
        if let Some(i) = &self.inputs.interaction {
            let _ = writeln!(md, "Declared interaction: {i}.\n");
        }

        if let Some(c) = &self.coevolution {
            let _ = writeln!(md, "## Coevolution\n");
            let _ = writeln!(md, "| Technology | Generations | Years | Ev |");
            let _ = writeln!(md, "|---|---:|---:|---:|");
            for comp in &c.components {
                let _ =
                    writeln!(md, "| {} | {} | {} | {:.2} |", comp.tech_name, comp.generations, comp.duration, comp.ev);
            }
            let _ = writeln!(
                md,
                "\nCV = {:.2}{}; {}.\n",
                c.cv,
                if (c.cv_of_rounded - c.cv).abs() > 0.0 { "¹" } else { "" },
                if c.coevolving { format!("coevolution (CV > {})", c.threshold) } else { "no coevolution".into() }
            );
            if (c.cv_of_rounded - c.cv).abs() > 0.0 {
                let _ = writeln!(
                    md,
                    "¹ Exact product {} = {}; multiplying the two-decimal indices instead gives {:.2}.\n",
                    c.cv_exact, c.cv, c.cv_of_rounded
                );
            }
        }

        if !self.warnings.is_empty() {
            let _ = writeln!(md, "## Warnings\n");
            for w in &self.warnings {
                let _ = writeln!(md, "- {w}");
            }
            md.push('\n');
        }
        let _ = writeln!(md, "_technometrics {}_", self.tool_version);
        md
    }
}

/// Writes `time, lnH, lnP, fitted_lnP` for every aligned time point. The fitted
/// column uses only the values stored in the report.
pub fn write_plot_data<W: Write>(report: &Report, pair: &PairedSeries<f64>, writer: W) -> Result<()> {
    let (ln_h, ln_p) = (log_transform(pair.host())?, log_transform(pair.sub())?);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["time", "lnH", "lnP", "fitted_lnP"])?;
    for (i, &t) in pair.times().iter().enumerate() {
        let fitted = report.evolution.fitted_ln_sub(pair.host().values()[i], &report.logistic_fits);
        w.write_record([
            t.to_string(),
            ln_h.values()[i].to_string(),
            ln_p.values()[i].to_string(),
            fitted.to_string(),
        ])?;
    }
    w.flush().map_err(|source| Error::Io { path: "<plot data>".into(), source })?;
    Ok(())
}
