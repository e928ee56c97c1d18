//! Command-line front end. [`run`] takes the argument list and two writers and
//! returns the process exit code, so it can be driven directly from tests.
//!
//! Exit codes: 0 success, 2 data or usage error, 3 fit failure. Nothing is
//! written to standard output unless the command succeeds.

pub mod json;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coevo::{coevolution_index_with_threshold, default_threshold, evolution_index, round2, EvolutionIndex};
use crate::dataset::{align, log_transform, parse_csv, DEFAULT_TIME_COLUMN, DEFAULT_VALUE_COLUMN};
use crate::descstats::summarize;
use crate::error::{Error, Result};
use crate::evolution::{estimate, EvolutionOptions, InteractionType, Mode};
use crate::synth::{parse_sweep, recovery_sweep, write_recovery_csv};

use report::{
    ratio_to_f64, write_plot_data, Alignment, Coevolution, Descriptives, Evolution, InputFile, Inputs, LogisticSummary,
    PerSeries, Regression, Report, TOOL_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_FIT: i32 = 3;

pub const DEFAULT_REPLICATES: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "technometrics",
    version,
    about = "Measure technological evolution from host and subsystem performance series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a host/subsystem pair and report the evolutionary coefficient B.
    Analyze(AnalyzeArgs),
    /// Compute evolution indices and their product.
    Coevolve(CoevolveArgs),
    /// Run a parameter-recovery sweep on synthetic logistic pairs.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Host technology CSV.
    #[arg(long)]
    host: PathBuf,
    /// Subsystem technology CSV.
    #[arg(long)]
    sub: PathBuf,
    #[arg(long, default_value = DEFAULT_TIME_COLUMN)]
    time_col: String,
    #[arg(long, default_value = DEFAULT_VALUE_COLUMN)]
    host_col: String,
    #[arg(long, default_value = DEFAULT_VALUE_COLUMN)]
    sub_col: String,
    /// reduced (log-log) or exact (logit-logit).
    #[arg(long, default_value = "reduced")]
    mode: String,
    /// Significance level for the test of B = 1.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also write `time,lnH,lnP,fitted_lnP` to this CSV.
    #[arg(long)]
    plotdata: Option<PathBuf>,
    /// Declared interaction type (parasitism, commensalism, mutualism, symbiosis).
    #[arg(long)]
    interaction: Option<String>,
    /// NAME:GENERATIONS:YEARS; give at least two to add a coevolution section.
    #[arg(long = "tech")]
    techs: Vec<String>,
}

#[derive(Debug, Args)]
struct CoevolveArgs {
    /// NAME:GENERATIONS:YEARS, repeated at least twice.
    #[arg(long = "tech", required = true)]
    techs: Vec<String>,
    /// CV above this value counts as coevolution.
    #[arg(long, default_value = "0.1")]
    threshold: String,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// TOML sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// Replicates per configuration (overrides the file; default 20).
    #[arg(long)]
    replicates: Option<usize>,
    /// Estimator to use (overrides the file; default exact).
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DATA } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut warnings = Vec::new();
    let outcome = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, &mut warnings),
        Command::Coevolve(a) => cmd_coevolve(&a, &mut warnings),
        Command::Simulate(a) => cmd_simulate(&a),
    };
    match outcome {
        Ok(text) => {
            for w in &warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return EXIT_DATA;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_fit_failure() {
        EXIT_FIT
    } else {
        EXIT_DATA
    }
}

/// Entry point for the binary.
pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Writes to `out` if given and returns nothing for standard output;
/// otherwise returns the text itself.
fn deliver(out: Option<&Path>, text: String) -> Result<String> {
    match out {
        Some(path) => write_file(path, text.as_bytes()).map(|_| String::new()),
        None => Ok(text),
    }
}

fn push_unique(warnings: &mut Vec<String>, w: String) {
    if !warnings.contains(&w) {
        warnings.push(w);
    }
}

/// Parses a plain decimal such as `9`, `7.5` or `1.25e1` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidConfig(format!("`{s}` is not a decimal number"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(digits);
    let factor = (0..scale.unsigned_abs()).fold(BigRational::one(), |acc, _| acc * ten.clone());
    value = if scale >= 0 { value * factor } else { value / factor };
    Ok(if negative { -value } else { value })
}

/// Parses `NAME:GENERATIONS:YEARS`. The name may itself contain colons.
pub fn parse_tech(flag: &str) -> Result<EvolutionIndex<BigRational>> {
    let bad =
        |why: &str| Error::InvalidConfig(format!("malformed --tech `{flag}`: {why} (expected NAME:GENERATIONS:YEARS)"));
    let mut parts = flag.rsplitn(3, ':');
    let (years, generations, name) = match (parts.next(), parts.next(), parts.next()) {
        (Some(y), Some(g), Some(n)) if !n.is_empty() => (y, g, n),
        _ => return Err(bad("missing field")),
    };
    let generations: u64 = generations.trim().parse().map_err(|_| bad("generations must be a positive integer"))?;
    let years = parse_decimal(years.trim()).map_err(|_| bad("years must be a decimal number"))?;
    if years <= BigRational::zero() {
        return Err(bad("years must be positive"));
    }
    evolution_index(name.trim(), generations, years)
}

fn coevolution_from_flags(
    techs: &[String],
    threshold: BigRational,
) -> Result<crate::coevo::CoevolutionIndex<BigRational>> {
    let components = techs.iter().map(|t| parse_tech(t)).collect::<Result<Vec<_>>>()?;
    coevolution_index_with_threshold(components, threshold)
}

/// What `analyze` was asked to do.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRequest {
    pub host_file: PathBuf,
    pub sub_file: PathBuf,
    pub time_col: String,
    pub host_col: String,
    pub sub_col: String,
    pub mode: Mode,
    pub alpha: f64,
    pub interaction: Option<InteractionType>,
    /// `NAME:GENERATIONS:YEARS` flags for an optional coevolution section.
    pub techs: Vec<String>,
}

/// Builds the full report for a host/subsystem pair. Also returns the aligned
/// pair so callers can emit plot data.
pub fn build_report(req: &AnalysisRequest) -> Result<(Report, crate::dataset::PairedSeries<f64>)> {
    let AnalysisRequest { host_file, sub_file, time_col, host_col, sub_col, mode, alpha, interaction, techs } = req;
    let (mode, alpha) = (*mode, *alpha);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let host = parse_csv::<f64>(host_file, time_col, host_col)?;
    let sub = parse_csv::<f64>(sub_file, time_col, sub_col)?;
    let pair = align(&host, &sub)?;
    let (ln_h, ln_p) = (log_transform(pair.host())?, log_transform(pair.sub())?);
    let (dh, dp) = (summarize(&ln_h)?, summarize(&ln_p)?);
    let opts = EvolutionOptions { alpha, ..EvolutionOptions::default() };
    let result = estimate(&pair, mode, &opts)?;

    let mut warnings = Vec::new();
    if result.small_value_warning {
        push_unique(
            &mut warnings,
            format!(
                "observed values exceed {} of a fitted ceiling; the small-value power law is only approximate here",
                opts.small_value_threshold
            ),
        );
    }
    for (name, fit) in [(pair.host().name(), &result.host_logistic), (pair.sub().name(), &result.sub_logistic)] {
        if !fit.converged {
            push_unique(
                &mut warnings,
                format!("logistic fit for `{name}` did not converge; its ceiling K is poorly identified"),
            );
        }
    }
    let coevolution = if techs.is_empty() {
        None
    } else {
        let idx = coevolution_from_flags(techs, default_threshold())?;
        for w in idx.warnings() {
            push_unique(&mut warnings, w);
        }
        Some(Coevolution::from_index(&idx))
    };

    let input = |file: &Path, col: &str| InputFile {
        file: file.display().to_string(),
        time_column: time_col.to_string(),
        value_column: col.to_string(),
    };
    let report = Report {
        tool_version: TOOL_VERSION.to_string(),
        inputs: Inputs {
            host: input(host_file, host_col),
            sub: input(sub_file, sub_col),
            mode: mode.to_string(),
            alpha,
            interaction: interaction.map(|i| i.as_str().to_string()),
        },
        alignment: Alignment {
            n_common: pair.len(),
            host_dropped: host.len() - pair.len(),
            sub_dropped: sub.len() - pair.len(),
            first_time: pair.times()[0],
            last_time: pair.times()[pair.len() - 1],
        },
        descriptives: PerSeries { host: Descriptives::new(ln_h.name(), &dh), sub: Descriptives::new(ln_p.name(), &dp) },
        logistic_fits: PerSeries {
            host: LogisticSummary::new(&result.host_logistic, pair.host().max_value()),
            sub: LogisticSummary::new(&result.sub_logistic, pair.sub().max_value()),
        },
        regression: Regression::new(&result),
        evolution: Evolution::new(&result),
        coevolution,
        warnings,
    };
    Ok((report, pair))
}

fn cmd_analyze(a: &AnalyzeArgs, warnings: &mut Vec<String>) -> Result<String> {
    let mode: Mode = a.mode.parse()?;
    let interaction = a.interaction.as_deref().map(str::parse::<InteractionType>).transpose()?;
    let (report, pair) = build_report(&AnalysisRequest {
        host_file: a.host.clone(),
        sub_file: a.sub.clone(),
        time_col: a.time_col.clone(),
        host_col: a.host_col.clone(),
        sub_col: a.sub_col.clone(),
        mode,
        alpha: a.alpha,
        interaction,
        techs: a.techs.clone(),
    })?;
    warnings.extend(report.warnings.iter().cloned());
    let text = match a.format {
        Format::Json => report.to_json(),
        Format::Md => report.to_markdown(),
    };
    if let Some(path) = &a.plotdata {
        let mut buf = Vec::new();
        write_plot_data(&report, &pair, &mut buf)?;
        write_file(path, &buf)?;
    }
    deliver(a.out.as_deref(), text)
}

fn cmd_coevolve(a: &CoevolveArgs, warnings: &mut Vec<String>) -> Result<String> {
    let threshold = parse_decimal(&a.threshold)?;
    let idx = coevolution_from_flags(&a.techs, threshold)?;
    warnings.extend(idx.warnings());
    let c = Coevolution::from_index(&idx);
    let mut out = String::new();
    for comp in &c.components {
        out.push_str(&format!(
            "{}: Ev = {:.2} ({} generations / {} years = {})\n",
            comp.tech_name, comp.ev, comp.generations, comp.duration, comp.ev_exact
        ));
    }
    out.push_str(&format!("CV = {:.2} (exact {})\n", c.cv, c.cv_exact));
    if (round2(c.cv) - c.cv_of_rounded).abs() > 1e-12 {
        out.push_str(&format!("product of the rounded indices = {:.2}\n", c.cv_of_rounded));
    }
    out.push_str(&format!(
        "{} (threshold {})\n",
        if c.coevolving { "coevolution" } else { "no coevolution" },
        ratio_to_f64(&idx.threshold)
    ));
    Ok(out)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<String> {
    let text =
        fs::read_to_string(&a.config).map_err(|source| Error::Io { path: a.config.display().to_string(), source })?;
    let sweep = parse_sweep::<f64>(&text)?;
    let replicates = a.replicates.or(sweep.replicates).unwrap_or(DEFAULT_REPLICATES);
    let mode = match &a.mode {
        Some(m) => m.parse()?,
        None => sweep.mode.unwrap_or(Mode::Exact),
    };
    let rows = recovery_sweep(&sweep.configs, replicates, mode, &EvolutionOptions::default())?;
    let mut buf = Vec::new();
    write_recovery_csv(&rows, &mut buf)?;
    deliver(a.out.as_deref(), String::from_utf8(buf).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("9").unwrap(), rat(9, 1));
        assert_eq!(parse_decimal("7.5").unwrap(), rat(15, 2));
        assert_eq!(parse_decimal("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_decimal(".25").unwrap(), rat(1, 4));
        assert_eq!(parse_decimal("1.25e1").unwrap(), rat(25, 2));
        assert_eq!(parse_decimal("5E-1").unwrap(), rat(1, 2));
        assert_eq!(parse_decimal("-2").unwrap(), rat(-2, 1));
        for bad in ["", ".", "x", "1.2.3", "1e", "0x10", "nan"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn tech_flags() {
        let t = parse_tech("iPhone:10:9").unwrap();
        assert_eq!((t.tech_name.as_str(), t.generations), ("iPhone", 10));
        assert_eq!(t.ev, rat(10, 9));
        assert_eq!(parse_tech("a:b:2:4").unwrap().tech_name, "a:b");
        for bad in ["iPhone:10", "iPhone", ":1:1", "x:0:1", "x:1:0", "x:-1:2", "x:1.5:2", "x:1:abc"] {
            assert!(parse_tech(bad).is_err(), "{bad}");
        }
    }

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("technometrics").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn coevolve_command() {
        let (code, out, _) = run_capture(&["coevolve", "--tech", "iPhone:10:9", "--tech", "WhatsApp:14:7"]);
        assert_eq!(code, 0);
        assert!(out.contains("iPhone: Ev = 1.11"), "{out}");
        assert!(out.contains("WhatsApp: Ev = 2.00"), "{out}");
        assert!(out.contains("CV = 2.22 (exact 20/9)"), "{out}");
        assert!(out.contains("\ncoevolution"), "{out}");

        let (code, out, _) = run_capture(&["coevolve", "--tech", "a:1:1", "--tech", "b:2:1", "--tech", "c:3:1"]);
        assert_eq!(code, 0);
        assert!(out.contains("CV = 6.00"), "{out}");
    }

    #[test]
    fn coevolve_errors() {
        let (code, out, err) = run_capture(&["coevolve", "--tech", "iPhone:10:9"]);
        assert_eq!((code, out.as_str()), (EXIT_DATA, ""));
        assert!(err.contains("at least 2"), "{err}");
        let (code, out, _) = run_capture(&["coevolve", "--tech", "iPhone:10", "--tech", "b:1:1"]);
        assert_eq!((code, out.as_str()), (EXIT_DATA, ""));
        let (code, _, _) = run_capture(&["coevolve"]);
        assert_eq!(code, EXIT_DATA);
    }

    #[test]
    fn slow_components_warn_on_stderr() {
        let (code, out, err) = run_capture(&["coevolve", "--tech", "a:1:2", "--tech", "b:1:1"]);
        assert_eq!(code, 0);
        assert!(out.contains("CV = 0.50"));
        assert!(err.contains("Ev < 1"), "{err}");
    }

    #[test]
    fn fit_failures_exit_three() {
        assert_eq!(exit_code(&Error::SearchFailure("x".into())), EXIT_FIT);
        assert_eq!(exit_code(&Error::KTooSmall { k: 1.0, value: 2.0 }), EXIT_FIT);
        assert_eq!(exit_code(&Error::NoConvergence(200)), EXIT_FIT);
        assert_eq!(exit_code(&Error::NonPositiveValue { row: 2, time: 1.0 }), EXIT_DATA);
        assert_eq!(exit_code(&Error::InsufficientOverlap { common: 2 }), EXIT_DATA);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&[]).0, EXIT_DATA);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_DATA);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("analyze"));
    }
}
