//! Synthetic host/subsystem logistic trajectories with known parameters, and a
//! Monte-Carlo harness that measures how well `B` is recovered from them.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Replicate `r` of a configuration uses seed `seed + r`.
//! Noise is additive Gaussian in value units; a draw that would make a value
//! non-positive is redrawn, up to [`MAX_REDRAWS`] times.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::Deserialize;

use crate::dataset::{align, PairedSeries, TimeSeries};
use crate::error::{Error, Result};
use crate::evolution::{estimate, EvolutionOptions, Mode};
use crate::scalar::Scalar;
use crate::sigmoid::logistic;

pub const MAX_REDRAWS: usize = 100;
pub const RNG_ALGORITHM: &str = "chacha8";

/// Parameters of one synthetic host/subsystem pair.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig<T> {
    #[serde(alias = "K_host")]
    pub k_host: T,
    pub a_host: T,
    pub b_host: T,
    #[serde(alias = "K_sub")]
    pub k_sub: T,
    pub a_sub: T,
    pub b_sub: T,
    pub t_start: T,
    pub t_end: T,
    pub t_step: T,
    #[serde(default)]
    pub noise_sd: T,
    #[serde(default)]
    pub seed: u64,
    /// Only `chacha8` is supported; recorded so output can be reproduced elsewhere.
    #[serde(default = "default_rng")]
    pub rng: String,
}

fn default_rng() -> String {
    RNG_ALGORITHM.to_string()
}

impl<T: Scalar> SynthConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.k_host > T::zero() && self.k_sub > T::zero()) {
            return bad("asymptotes must be positive");
        }
        if !(self.t_end > self.t_start) {
            return bad("t_end must exceed t_start");
        }
        if !(self.t_step > T::zero()) {
            return bad("t_step must be positive");
        }
        if !(self.noise_sd >= T::zero()) {
            return bad("noise_sd must be non-negative");
        }
        if self.b_host == T::zero() || !self.b_host.is_finite() {
            return bad("b_host must be finite and non-zero");
        }
        if self.rng != RNG_ALGORITHM {
            return Err(Error::InvalidConfig(format!("unsupported rng `{}` (only {RNG_ALGORITHM})", self.rng)));
        }
        Ok(())
    }

    /// `b_sub / b_host`
    pub fn true_b(&self) -> T {
        self.b_sub / self.b_host
    }

    /// Sampling times `t_start, t_start + t_step, …` up to `t_end`.
    pub fn times(&self) -> Vec<T> {
        let span = (self.t_end - self.t_start) / self.t_step;
        let steps = (span + T::of(1e-9)).floor().to_usize().unwrap_or(0);
        (0..=steps).map(|i| self.t_start + self.t_step * T::of_usize(i)).collect()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Samples `K / (1 + exp(a − b·t))` on `times` with additive Gaussian noise.
pub fn generate_series<T, R>(
    name: &str,
    (k, a, b): (T, T, T),
    times: &[T],
    noise_sd: T,
    rng: &mut R,
) -> Result<TimeSeries<T>>
where
    T: Scalar,
    R: rand::Rng,
    StandardNormal: Distribution<T>,
{
    let noise = if noise_sd > T::zero() {
        Some(Normal::new(T::zero(), noise_sd).map_err(|e| Error::InvalidConfig(e.to_string()))?)
    } else {
        None
    };
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let clean = logistic(k, a, b, t);
        let value = match &noise {
            None => clean,
            Some(dist) => (0..MAX_REDRAWS)
                .map(|_| clean + dist.sample(rng))
                .find(|v| *v > T::zero())
                .ok_or(Error::DegenerateNoise { time: t.as_f64(), attempts: MAX_REDRAWS })?,
        };
        points.push((t, value));
    }
    TimeSeries::new(name, "", points)
}

/// Host and subsystem series from `cfg`; identical seeds give identical output.
pub fn generate_pair<T: Scalar>(cfg: &SynthConfig<T>) -> Result<PairedSeries<T>>
where
    StandardNormal: Distribution<T>,
{
    cfg.validate()?;
    let times = cfg.times();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let host = generate_series("host", (cfg.k_host, cfg.a_host, cfg.b_host), &times, cfg.noise_sd, &mut rng)?;
    let sub = generate_series("sub", (cfg.k_sub, cfg.a_sub, cfg.b_sub), &times, cfg.noise_sd, &mut rng)?;
    align(&host, &sub)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryRow<T> {
    pub true_b: T,
    pub median_b: T,
    pub median_abs_error: T,
    pub replicates: usize,
}

pub fn median<T: Scalar>(values: &mut [T]) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite estimates"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) * T::of(0.5)
    }
}

/// Runs `replicates` seeded draws of every configuration and reports the
/// median estimate of `B` and its median absolute error. Replicates run in
/// parallel; results are combined in replicate order.
pub fn recovery_sweep<T: Scalar>(
    grid: &[SynthConfig<T>],
    replicates: usize,
    mode: Mode,
    opts: &EvolutionOptions,
) -> Result<Vec<RecoveryRow<T>>>
where
    StandardNormal: Distribution<T>,
{
    if replicates < 1 {
        return Err(Error::InvalidConfig("replicates must be at least 1".into()));
    }
    grid.iter()
        .map(|cfg| {
            cfg.validate()?;
            let truth = cfg.true_b();
            let estimates = (0..replicates)
                .into_par_iter()
                .map(|r| {
                    let pair = generate_pair(&cfg.with_seed(cfg.seed.wrapping_add(r as u64)))?;
                    Ok(estimate(&pair, mode, opts)?.b)
                })
                .collect::<Result<Vec<T>>>()?;
            let mut errors: Vec<T> = estimates.iter().map(|&b| (b - truth).abs()).collect();
            let mut estimates = estimates;
            Ok(RecoveryRow {
                true_b: truth,
                median_b: median(&mut estimates),
                median_abs_error: median(&mut errors),
                replicates,
            })
        })
        .collect()
}

pub fn write_recovery_csv<T: Scalar, W: Write>(rows: &[RecoveryRow<T>], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["true_b", "median_b", "median_abs_error", "replicates"])?;
    for r in rows {
        w.write_record([
            r.true_b.to_string(),
            r.median_b.to_string(),
            r.median_abs_error.to_string(),
            r.replicates.to_string(),
        ])?;
    }
    w.flush().map_err(|source| Error::Io { path: "<csv writer>".into(), source })?;
    Ok(())
}

/// A sweep read from a TOML file: either a single configuration as top-level
/// `key = value` pairs, or a list of `[[config]]` tables. Optional top-level
/// `replicates` and `mode` keys apply to the whole sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFile<T> {
    pub configs: Vec<SynthConfig<T>>,
    pub replicates: Option<usize>,
    pub mode: Option<Mode>,
}

pub fn parse_sweep<T>(text: &str) -> Result<SweepFile<T>>
where
    T: Scalar + for<'de> Deserialize<'de>,
{
    let bad = |e: &dyn std::fmt::Display| Error::InvalidConfig(e.to_string());
    let mut table: toml::Table = text.parse().map_err(|e| bad(&e))?;
    let replicates = match table.remove("replicates") {
        None => None,
        Some(v) => Some(
            v.as_integer()
                .and_then(|i| usize::try_from(i).ok())
                .ok_or_else(|| Error::InvalidConfig("replicates must be a non-negative integer".into()))?,
        ),
    };
    let mode = match table.remove("mode") {
        None => None,
        Some(v) => Some(v.as_str().ok_or_else(|| Error::InvalidConfig("mode must be a string".into()))?.parse()?),
    };
    let configs: Vec<SynthConfig<T>> = match table.remove("config") {
        Some(list) => {
            if !table.is_empty() {
                let keys: Vec<_> = table.keys().cloned().collect();
                return Err(Error::InvalidConfig(format!("unexpected top-level keys with [[config]]: {keys:?}")));
            }
            list.try_into().map_err(|e| bad(&e))?
        }
        None => vec![toml::Value::Table(table).try_into().map_err(|e| bad(&e))?],
    };
    if configs.is_empty() {
        return Err(Error::InvalidConfig("no configurations".into()));
    }
    for c in &configs {
        c.validate()?;
    }
    Ok(SweepFile { configs, replicates, mode })
}
