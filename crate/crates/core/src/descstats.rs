//! Descriptive moments of a series: N, mean, sample standard deviation and
//! the bias-adjusted skewness and excess kurtosis used by SPSS and Excel.

use crate::dataset::TimeSeries;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The kurtosis estimator divides by `(n − 3)`.
pub const MIN_SUMMARY_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptiveSummary<T> {
    pub n: usize,
    pub mean: T,
    /// Sample standard deviation (n − 1 denominator).
    pub sd: T,
    /// `n / ((n−1)(n−2)) · Σ z³`
    pub skewness: T,
    /// `n(n+1) / ((n−1)(n−2)(n−3)) · Σ z⁴ − 3(n−1)² / ((n−2)(n−3))`
    pub kurtosis: T,
}

pub fn summarize<T: Scalar>(s: &TimeSeries<T>) -> Result<DescriptiveSummary<T>> {
    summarize_values(s.values())
}

pub fn summarize_values<T: Scalar>(xs: &[T]) -> Result<DescriptiveSummary<T>> {
    let n = xs.len();
    if n < MIN_SUMMARY_LEN {
        return Err(Error::InsufficientData { needed: MIN_SUMMARY_LEN, got: n });
    }
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegenerateSample);
    }

    let nf = T::of_usize(n);
    let one = T::one();
    let (two, three) = (T::of(2.0), T::of(3.0));
    let mean = xs.iter().copied().sum::<T>() / nf;
    let m2: T = xs.iter().map(|&x| (x - mean).powi(2)).sum();
    let sd = (m2 / (nf - one)).sqrt();
    if !(sd > T::zero()) {
        return Err(Error::DegenerateSample);
    }

    let (mut s3, mut s4) = (T::zero(), T::zero());
    for &x in xs {
        let z = (x - mean) / sd;
        let z2 = z * z;
        s3 = s3 + z2 * z;
        s4 = s4 + z2 * z2;
    }
    let skewness = nf / ((nf - one) * (nf - two)) * s3;
    let kurtosis = nf * (nf + one) / ((nf - one) * (nf - two) * (nf - three)) * s4
        - three * (nf - one).powi(2) / ((nf - two) * (nf - three));

    Ok(DescriptiveSummary { n, mean, sd, skewness, kurtosis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_to_five() {
        let s = summarize_values(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.n, 5);
        assert_eq!(s.mean, 3.0);
        assert!((s.sd - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((s.sd - 1.58114).abs() < 1e-5);
        assert!(s.skewness.abs() < 1e-12);
        // Σz⁴ = (16+1+0+1+16)/6.25 = 5.44; 30/24·5.44 − 3·16/6 = 6.8 − 8
        assert!((s.kurtosis + 1.2).abs() < 1e-12);
    }

    #[test]
    fn constant_sample_is_degenerate() {
        assert!(matches!(summarize_values(&[0.1; 4]), Err(Error::DegenerateSample)));
    }

    #[test]
    fn too_short() {
        assert!(matches!(summarize_values(&[1.0, 2.0, 3.0]), Err(Error::InsufficientData { needed: 4, got: 3 })));
    }

    #[test]
    fn skewed_sample_matches_direct_formula() {
        // Independent evaluation with raw central moments instead of z-scores.
        let xs = [1.0f64, 1.0, 2.0, 3.0, 8.0, 13.0];
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let c = |k: i32| xs.iter().map(|x| (x - m).powi(k)).sum::<f64>();
        let var = c(2) / (n - 1.0);
        let g1 = n / ((n - 1.0) * (n - 2.0)) * c(3) / var.powf(1.5);
        let g2 = n * (n + 1.0) / ((n - 1.0) * (n - 2.0) * (n - 3.0)) * c(4) / (var * var)
            - 3.0 * (n - 1.0).powi(2) / ((n - 2.0) * (n - 3.0));
        let s = summarize_values(&xs).unwrap();
        assert!((s.skewness - g1).abs() < 1e-12);
        assert!((s.kurtosis - g2).abs() < 1e-12);
        assert!(s.skewness > 0.0);
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-50.0f64..50.0, 4..60).prop_filter("non-constant", |v| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() > 1e-3
        })
    }

    proptest! {
        #[test]
        fn shift_invariance(xs in sample(), k in -1e3f64..1e3) {
            let a = summarize_values(&xs).unwrap();
            let shifted: Vec<f64> = xs.iter().map(|x| x + k).collect();
            let b = summarize_values(&shifted).unwrap();
            prop_assert!((a.sd - b.sd).abs() < 1e-10 * a.sd.max(1.0));
            prop_assert!((a.skewness - b.skewness).abs() < 1e-10);
            prop_assert!((a.kurtosis - b.kurtosis).abs() < 1e-10);
        }

        #[test]
        fn scale_invariance(xs in sample(), k in 0.01f64..100.0) {
            let a = summarize_values(&xs).unwrap();
            let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
            let b = summarize_values(&scaled).unwrap();
            prop_assert!((b.sd - k * a.sd).abs() < 1e-10 * (k * a.sd));
            prop_assert!((a.skewness - b.skewness).abs() < 1e-10);
            prop_assert!((a.kurtosis - b.kurtosis).abs() < 1e-10);
        }

        #[test]
        fn reflection_negates_skewness(xs in sample()) {
            let a = summarize_values(&xs).unwrap();
            let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
            let b = summarize_values(&neg).unwrap();
            prop_assert!((a.skewness + b.skewness).abs() < 1e-12);
            prop_assert!((a.kurtosis - b.kurtosis).abs() < 1e-12);
        }
    }
}
