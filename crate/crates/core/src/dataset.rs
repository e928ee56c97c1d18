//! Time series of technology performance measures: CSV ingestion, validation,
//! alignment of host/subsystem pairs, and the log transform.
//!
//! CSV files carry a header row; the default columns are `year` and `value`.
//! Cells use `.` as the decimal separator and a comma delimiter. Both LF and
//! CRLF line endings are accepted.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_TIME_COLUMN: &str = "year";
pub const DEFAULT_VALUE_COLUMN: &str = "value";

/// Fewest points a series may hold.
pub const MIN_SERIES_LEN: usize = 3;
/// Fewest common times a host/subsystem pair may hold.
pub const MIN_PAIRED_LEN: usize = 4;

/// Whether values are raw measurements or their natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Raw measurements; every value is strictly positive.
    Linear,
    /// Natural logarithms of a linear series; values may take any sign.
    Log,
}

/// One performance measure sampled over time.
///
/// Times are strictly increasing and there are at least three points. On the
/// linear scale every value is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    name: String,
    units: String,
    scale: Scale,
    times: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> TimeSeries<T> {
    /// Builds a linear-scale series from points already in time order.
    pub fn new(
        name: impl Into<String>,
        units: impl Into<String>,
        points: impl IntoIterator<Item = (T, T)>,
    ) -> Result<Self> {
        let (times, values) = points.into_iter().unzip();
        Self::from_parts(name.into(), units.into(), Scale::Linear, times, values)
    }

    /// Builds a linear-scale series from points in any order.
    ///
    /// Points are sorted by time; a repeated time is an error.
    pub fn from_unsorted(
        name: impl Into<String>,
        units: impl Into<String>,
        points: impl IntoIterator<Item = (T, T)>,
    ) -> Result<Self> {
        let mut points: Vec<(T, T)> = points.into_iter().collect();
        if let Some(i) = points.iter().position(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));
        if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateTime(w[0].0.as_f64()));
        }
        Self::new(name, units, points)
    }

    fn from_parts(name: String, units: String, scale: Scale, times: Vec<T>, values: Vec<T>) -> Result<Self> {
        debug_assert_eq!(times.len(), values.len());
        for (i, (t, v)) in times.iter().zip(&values).enumerate() {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if scale == Scale::Linear && *v <= T::zero() {
                return Err(Error::NonPositiveValue { row: i + 1, time: t.as_f64() });
            }
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            if times[i] == times[i + 1] {
                return Err(Error::DuplicateTime(times[i].as_f64()));
            }
            return Err(Error::NonIncreasingTime(i + 1));
        }
        if times.len() < MIN_SERIES_LEN {
            return Err(Error::InsufficientData { needed: MIN_SERIES_LEN, got: times.len() });
        }
        Ok(Self { name, units, scale, times, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Restricts the series to the given indices (ascending).
    fn select(&self, idx: &[usize]) -> Result<Self> {
        Self::from_parts(
            self.name.clone(),
            self.units.clone(),
            self.scale,
            idx.iter().map(|&i| self.times[i]).collect(),
            idx.iter().map(|&i| self.values[i]).collect(),
        )
    }
}

/// Host series `H` and subsystem series `P` sampled on identical times.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries<T> {
    host: TimeSeries<T>,
    sub: TimeSeries<T>,
}

impl<T: Scalar> PairedSeries<T> {
    pub fn host(&self) -> &TimeSeries<T> {
        &self.host
    }

    pub fn sub(&self) -> &TimeSeries<T> {
        &self.sub
    }

    pub fn times(&self) -> &[T] {
        self.host.times()
    }

    pub fn len(&self) -> usize {
        self.host.len()
    }

    pub fn is_empty(&self) -> bool {
        self.host.is_empty()
    }

    /// Applies `f` to the subsystem values, keeping the host untouched.
    pub fn map_sub(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let sub = TimeSeries::from_parts(
            self.sub.name.clone(),
            self.sub.units.clone(),
            self.sub.scale,
            self.sub.times.clone(),
            self.sub.values.iter().map(|&v| f(v)).collect(),
        )?;
        Ok(Self { host: self.host.clone(), sub })
    }
}

/// Pairs two series on the times they share. Times present in only one series
/// are dropped; nothing is interpolated.
pub fn align<T: Scalar>(host: &TimeSeries<T>, sub: &TimeSeries<T>) -> Result<PairedSeries<T>> {
    let (mut i, mut j) = (0, 0);
    let (mut host_idx, mut sub_idx) = (Vec::new(), Vec::new());
    let (ht, st) = (host.times(), sub.times());
    while i < ht.len() && j < st.len() {
        if ht[i] == st[j] {
            host_idx.push(i);
            sub_idx.push(j);
            i += 1;
            j += 1;
        } else if ht[i] < st[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    if host_idx.len() < MIN_PAIRED_LEN {
        return Err(Error::InsufficientOverlap { common: host_idx.len() });
    }
    Ok(PairedSeries { host: host.select(&host_idx)?, sub: sub.select(&sub_idx)? })
}

/// Natural logarithm of every value; the name gains an `LN ` prefix.
pub fn log_transform<T: Scalar>(s: &TimeSeries<T>) -> Result<TimeSeries<T>> {
    let mut values = Vec::with_capacity(s.len());
    for (i, (t, v)) in s.points().enumerate() {
        if v <= T::zero() {
            return Err(Error::NonPositiveValue { row: i + 1, time: t.as_f64() });
        }
        values.push(v.ln());
    }
    TimeSeries::from_parts(format!("LN {}", s.name), s.units.clone(), Scale::Log, s.times.clone(), values)
}

/// Reads a series from a CSV file. The series is named after the file stem.
pub fn parse_csv<T: Scalar>(path: impl AsRef<Path>, time_col: &str, value_col: &str) -> Result<TimeSeries<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_csv(file, name, time_col, value_col)
}

/// Reads a series from CSV text. Row numbers in errors are file line numbers.
pub fn read_csv<T: Scalar, R: Read>(
    reader: R,
    name: impl Into<String>,
    time_col: &str,
    value_col: &str,
) -> Result<TimeSeries<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column =
        |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn(name.to_string()));
    let (ti, vi) = (column(time_col)?, column(value_col)?);

    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(points.len() + 2, |p| p.line() as usize);
        let cell = |idx: usize, col: &str| -> Result<T> {
            let raw = record.get(idx).unwrap_or("");
            raw.parse::<T>().ok().filter(|x| x.is_finite()).ok_or_else(|| Error::NonNumericCell {
                row,
                column: col.to_string(),
                cell: raw.to_string(),
            })
        };
        let (t, v) = (cell(ti, time_col)?, cell(vi, value_col)?);
        if v <= T::zero() {
            return Err(Error::NonPositiveValue { row, time: t.as_f64() });
        }
        points.push((t, v));
    }
    TimeSeries::from_unsorted(name, "", points)
}

/// Writes a series as CSV with the given column names. Values are written in
/// shortest round-trip form so [`read_csv`] recovers them exactly.
pub fn write_csv<T: Scalar, W: Write>(s: &TimeSeries<T>, writer: W, time_col: &str, value_col: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([time_col, value_col])?;
    for (t, v) in s.points() {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush().map_err(|source| Error::Io { path: "<csv writer>".into(), source })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(points: &[(f64, f64)]) -> TimeSeries<f64> {
        TimeSeries::new("s", "u", points.iter().copied()).unwrap()
    }

    fn years(range: impl IntoIterator<Item = i32>) -> TimeSeries<f64> {
        TimeSeries::new("s", "", range.into_iter().map(|y| (y as f64, 1.0 + y as f64))).unwrap()
    }

    fn read(text: &str) -> Result<TimeSeries<f64>> {
        read_csv(text.as_bytes(), "t", DEFAULT_TIME_COLUMN, DEFAULT_VALUE_COLUMN)
    }

    #[test]
    fn two_rows_fail_minimum_length() {
        let err = read("year,value\n1920,2.73\n1921,3.01\n").unwrap_err();
        assert!(matches!(err, Error::InsufficientData { needed: 3, got: 2 }), "{err}");
    }

    #[test]
    fn negative_value_names_the_year() {
        let err = read("year,value\n1920,-1.0\n").unwrap_err();
        match err {
            Error::NonPositiveValue { row, time } => {
                assert_eq!(time, 1920.0);
                assert_eq!(row, 2);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rows_are_resorted() {
        let s = read("year,value\n1920,1.0\n1922,2.0\n1921,1.5\n").unwrap();
        assert_eq!(s.times(), &[1920.0, 1921.0, 1922.0]);
        assert_eq!(s.values(), &[1.0, 1.5, 2.0]);
    }

    #[test]
    fn duplicate_year_rejected() {
        let err = read("year,value\n1920,1.0\n1921,2.0\n1920,1.5\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateTime(t) if t == 1920.0));
    }

    #[test]
    fn missing_and_non_numeric_columns() {
        assert!(matches!(read("yr,value\n1,1\n").unwrap_err(), Error::MissingColumn(c) if c == "year"));
        let err = read("year,value\n1,1\n2,abc\n3,2\n").unwrap_err();
        assert!(matches!(err, Error::NonNumericCell { row: 3, .. }), "{err}");
    }

    #[test]
    fn crlf_and_extra_columns_accepted() {
        let s = read("id,year,value\r\na,1,2.5\r\nb,2,3.5\r\nc,3,4.5\r\n").unwrap();
        assert_eq!(s.values(), &[2.5, 3.5, 4.5]);
    }

    #[test]
    fn align_boundary_overlap_of_three() {
        let err = align(&years(1..=4), &years(2..=5)).unwrap_err();
        assert!(matches!(err, Error::InsufficientOverlap { common: 3 }));
    }

    #[test]
    fn align_identity() {
        let h = years(1..=10);
        let p = align(&h, &h).unwrap();
        assert_eq!(p.host(), &h);
        assert_eq!(p.sub(), &h);
    }

    #[test]
    fn align_intersection() {
        let host = years([1, 2, 3, 4, 5, 7]);
        let sub = years(1..=6);
        let p = align(&host, &sub).unwrap();
        // oracle: plain set intersection
        let expect: Vec<f64> = host.times().iter().filter(|t| sub.times().contains(t)).copied().collect();
        assert_eq!(p.times(), expect.as_slice());
        assert_eq!(p.times(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(p.sub().times(), p.host().times());
    }

    #[test]
    fn log_of_one_and_e() {
        let s = series(&[(0.0, 1.0), (1.0, std::f64::consts::E), (2.0, 2.0)]);
        let l = log_transform(&s).unwrap();
        assert_eq!(l.values()[0], 0.0);
        assert!((l.values()[1] - 1.0).abs() < 1e-12);
        assert_eq!(l.name(), "LN s");
        assert_eq!(l.scale(), Scale::Log);
    }

    #[test]
    fn log_of_powers_of_two_has_equal_steps() {
        let l = log_transform(&series(&[(0.0, 2.0), (1.0, 4.0), (2.0, 8.0)])).unwrap();
        let ln2 = 2f64.ln();
        for (k, v) in l.values().iter().enumerate() {
            assert!((v - (k as f64 + 1.0) * ln2).abs() < 1e-12);
        }
        assert!(((l.values()[1] - l.values()[0]) - (l.values()[2] - l.values()[1])).abs() < 1e-12);
    }

    #[test]
    fn log_series_may_be_negative_but_linear_may_not() {
        let l = log_transform(&series(&[(0.0, 0.5), (1.0, 0.25), (2.0, 2.0)])).unwrap();
        assert!(l.values()[0] < 0.0);
        assert!(TimeSeries::new("x", "", [(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn unsorted_times_rejected_by_new() {
        let err = TimeSeries::new("x", "", [(0.0, 1.0), (2.0, 1.0), (1.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::NonIncreasingTime(2)));
    }

    #[test]
    fn works_for_f32() {
        let s: TimeSeries<f32> = read_csv("year,value\n1,1\n2,2\n3,4\n".as_bytes(), "f", "year", "value").unwrap();
        let l = log_transform(&s).unwrap();
        assert!((l.values()[2] - 4f32.ln()).abs() < 1e-6);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_series() -> impl Strategy<Value = TimeSeries<f64>> {
            proptest::collection::btree_map(-500i32..3000, 1e-6f64..1e9, 3..40)
                .prop_map(|m| TimeSeries::new("p", "", m.into_iter().map(|(t, v)| (t as f64 / 4.0, v))).unwrap())
        }

        proptest! {
            #[test]
            fn align_is_idempotent(h in arb_series(), s in arb_series()) {
                if let Ok(p) = align(&h, &s) {
                    let again = align(p.host(), p.sub()).unwrap();
                    prop_assert_eq!(again, p);
                }
            }

            #[test]
            fn log_then_exp_recovers_values(s in arb_series()) {
                let l = log_transform(&s).unwrap();
                for (v, lv) in s.values().iter().zip(l.values()) {
                    prop_assert!(((lv.exp() - v) / v).abs() < 1e-12);
                }
            }

            #[test]
            fn csv_round_trip(s in arb_series()) {
                let mut buf = Vec::new();
                write_csv(&s, &mut buf, "year", "value").unwrap();
                let back: TimeSeries<f64> = read_csv(buf.as_slice(), "p", "year", "value").unwrap();
                prop_assert_eq!(back.times(), s.times());
                prop_assert_eq!(back.values(), s.values());
            }
        }
    }
}
