//! Technometrics for host/subsystem technology pairs: logistic growth fits,
//! the evolutionary coefficient `B` from log-log or logit-logit regression,
//! its grade, and coevolution indices.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); coevolution
//! indices also work in exact rationals. The aliases below fix `f64`/`f32`.

pub mod cli;
pub mod coevo;
pub mod dataset;
pub mod descstats;
pub mod error;
pub mod evolution;
pub mod regress;
pub mod scalar;
pub mod sigmoid;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type TimeSeries64 = dataset::TimeSeries<f64>;
pub type TimeSeries32 = dataset::TimeSeries<f32>;
pub type PairedSeries64 = dataset::PairedSeries<f64>;
pub type PairedSeries32 = dataset::PairedSeries<f32>;
pub type DescriptiveSummary64 = descstats::DescriptiveSummary<f64>;
pub type DescriptiveSummary32 = descstats::DescriptiveSummary<f32>;
pub type OlsFit64 = regress::OlsFit<f64>;
pub type OlsFit32 = regress::OlsFit<f32>;
pub type LogisticFit64 = sigmoid::LogisticFit<f64>;
pub type LogisticFit32 = sigmoid::LogisticFit<f32>;
pub type EvolutionResult64 = evolution::EvolutionResult<f64>;
pub type EvolutionResult32 = evolution::EvolutionResult<f32>;
pub type SynthConfig64 = synth::SynthConfig<f64>;
pub type SynthConfig32 = synth::SynthConfig<f32>;
pub type ExactCoevolutionIndex = coevo::CoevolutionIndex<num_rational::BigRational>;
