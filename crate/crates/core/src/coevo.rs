//! Evolution and coevolution indices: generations per unit time for each
//! technology, and their product across interacting technologies.
//!
//! The indices are generic over any numeric type, so they can be carried as
//! exact rationals (`num_rational::BigRational`) and rounded only for display.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

use crate::error::{Error, Result};

/// Numeric types the indices can be computed in.
pub trait Rate: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

impl<T> Rate for T where T: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

/// Emitted when some component evolves at less than one generation per unit
/// time; the product is then no longer bounded below by every component.
pub const SLOW_COMPONENT_WARNING: &str =
    "a component has Ev < 1: the coevolution index may fall below individual component indices";

/// Default coevolution threshold: `CV > 0.1` counts as coevolution.
pub fn default_threshold<T: Rate>() -> T {
    T::one() / T::from_u8(10).expect("10 representable")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionIndex<T> {
    pub tech_name: String,
    pub generations: u64,
    pub duration: T,
    /// `generations / duration`
    pub ev: T,
}

pub fn evolution_index<T: Rate>(name: impl Into<String>, generations: u64, duration: T) -> Result<EvolutionIndex<T>> {
    if generations < 1 {
        return Err(Error::InvalidCount(generations));
    }
    if !(duration > T::zero()) {
        return Err(Error::InvalidDuration);
    }
    let g = T::from_u64(generations).ok_or(Error::InvalidCount(generations))?;
    Ok(EvolutionIndex { tech_name: name.into(), generations, ev: g / duration.clone(), duration })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoevolutionIndex<T> {
    /// The first component is the host technology.
    pub components: Vec<EvolutionIndex<T>>,
    /// Product of every component's `ev`.
    pub cv: T,
    pub threshold: T,
}

impl<T: Rate> CoevolutionIndex<T> {
    pub fn is_coevolving(&self) -> bool {
        self.cv > self.threshold
    }

    pub fn max_ev(&self) -> T {
        self.components
            .iter()
            .map(|c| c.ev.clone())
            .fold(None, |m: Option<T>, e| match m {
                Some(m) if m >= e => Some(m),
                _ => Some(e),
            })
            .expect("at least two components")
    }

    pub fn has_slow_component(&self) -> bool {
        self.components.iter().any(|c| c.ev < T::one())
    }

    pub fn warnings(&self) -> Vec<String> {
        if self.has_slow_component() {
            vec![SLOW_COMPONENT_WARNING.to_string()]
        } else {
            Vec::new()
        }
    }

    /// Product of the components' indices each rounded to two decimals, the
    /// way hand-calculated tables usually report it.
    pub fn cv_of_rounded(&self) -> f64 {
        self.components.iter().map(|c| round2(c.ev.to_f64().unwrap_or(f64::NAN))).product()
    }
}

pub fn coevolution_index<T: Rate>(components: Vec<EvolutionIndex<T>>) -> Result<CoevolutionIndex<T>> {
    coevolution_index_with_threshold(components, default_threshold())
}

pub fn coevolution_index_with_threshold<T: Rate>(
    components: Vec<EvolutionIndex<T>>,
    threshold: T,
) -> Result<CoevolutionIndex<T>> {
    if components.len() < 2 {
        return Err(Error::TooFewComponents(components.len()));
    }
    let cv = components.iter().fold(T::one(), |acc, c| acc * c.ev.clone());
    Ok(CoevolutionIndex { components, cv, threshold })
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}
