//! Finite discrete-time signals and the compact domain they live in.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{convert, Scalar};

/// Per-dimension closed bounds `[lo_j, hi_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain<S> {
    bounds: Vec<(S, S)>,
}

impl<S: Scalar> Domain<S> {
    pub fn new(bounds: Vec<(S, S)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidDomain("at least one dimension is required".into()));
        }
        for (j, (lo, hi)) in bounds.iter().enumerate() {
            if lo > hi {
                return Err(Error::InvalidDomain(format!("dimension x{} has lo > hi", j + 1)));
            }
        }
        Ok(Domain { bounds })
    }

    /// `[0, 1]^dims`.
    pub fn unit(dims: usize) -> Self {
        Domain { bounds: vec![(S::zero(), S::one()); dims.max(1)] }
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(S, S)] {
        &self.bounds
    }

    pub fn lo(&self, dim: usize) -> &S {
        &self.bounds[dim].0
    }

    pub fn hi(&self, dim: usize) -> &S {
        &self.bounds[dim].1
    }

    /// Largest side length, the L∞ diameter of the domain.
    pub fn diameter(&self) -> S {
        self.bounds
            .iter()
            .map(|(lo, hi)| hi.clone() - lo.clone())
            .fold(S::zero(), crate::scalar::smax)
    }

    pub fn contains(&self, dim: usize, value: &S) -> bool {
        let (lo, hi) = &self.bounds[dim];
        lo <= value && value <= hi
    }

    pub fn cast<T: Scalar>(&self) -> Domain<T> {
        Domain { bounds: self.bounds.iter().map(|(lo, hi)| (convert(lo), convert(hi))).collect() }
    }
}

/// Signal prefix `s[0:T]` with values inside a compact domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<S> {
    values: Vec<Vec<S>>,
    domain: Domain<S>,
}

impl<S: Scalar> Trace<S> {
    /// `values[t][j]` is component `x^{j+1}` at time `t`.
    pub fn new(values: Vec<Vec<S>>, domain: Domain<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidTrace("a trace needs at least one sample".into()));
        }
        for (t, row) in values.iter().enumerate() {
            if row.len() != domain.dims() {
                return Err(Error::DimensionMismatch(format!(
                    "sample {t} has {} component(s), domain has {}",
                    row.len(),
                    domain.dims()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !domain.contains(j, v) {
                    return Err(Error::InvalidTrace(format!(
                        "x{}[{t}] = {} lies outside the domain",
                        j + 1,
                        v.to_decimal_string()
                    )));
                }
            }
        }
        Ok(Trace { values, domain })
    }

    /// One-dimensional trace over `[0, 1]`.
    pub fn scalar(values: impl IntoIterator<Item = S>) -> Result<Self> {
        Trace::new(values.into_iter().map(|v| vec![v]).collect(), Domain::unit(1))
    }

    pub fn dims(&self) -> usize {
        self.domain.dims()
    }

    /// Last time index `T`.
    pub fn last_time(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn at(&self, t: usize) -> &[S] {
        &self.values[t]
    }

    pub fn value(&self, t: usize, dim: usize) -> &S {
        &self.values[t][dim]
    }

    pub fn samples(&self) -> &[Vec<S>] {
        &self.values
    }

    pub fn domain(&self) -> &Domain<S> {
        &self.domain
    }

    /// L∞ distance between two traces of equal shape.
    pub fn linf_distance(&self, other: &Trace<S>) -> Result<S> {
        if self.len() != other.len() || self.dims() != other.dims() {
            return Err(Error::DimensionMismatch("traces differ in length or dimension".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x.clone() - y.clone()).abs()))
            .fold(S::zero(), crate::scalar::smax))
    }

    /// Divides every component by its `x_max`; the result lives in `[0, 1]^n`.
    pub fn normalize(&self, x_max: &[S]) -> Result<Trace<S>> {
        if x_max.len() != self.dims() {
            return Err(Error::DimensionMismatch(format!(
                "x_max has {} entries for a {}-dimensional trace",
                x_max.len(),
                self.dims()
            )));
        }
        for (dim, m) in x_max.iter().enumerate() {
            if !m.is_positive() {
                return Err(Error::InvalidConfig(format!("x_max for x{} must be positive", dim + 1)));
            }
            for row in &self.values {
                if row[dim] > *m || row[dim].is_negative() {
                    return Err(Error::NormalizationViolated {
                        dim: dim + 1,
                        value: row[dim].to_decimal_string(),
                        x_max: m.to_decimal_string(),
                    });
                }
            }
        }
        let values = self
            .values
            .iter()
            .map(|row| row.iter().zip(x_max).map(|(v, m)| v.clone() / m.clone()).collect())
            .collect();
        Trace::new(values, Domain::unit(self.dims()))
    }

    pub fn cast<T: Scalar>(&self) -> Trace<T> {
        Trace {
            values: self.values.iter().map(|row| row.iter().map(convert).collect()).collect(),
            domain: self.domain.cast(),
        }
    }

    /// Reads CSV with header `t,x1,...,xn` and rows for `t = 0..T`.
    pub fn read_csv(reader: impl Read, domain: Domain<S>) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = csv.headers()?.clone();
        let expected: Vec<String> =
            std::iter::once("t".to_string()).chain((1..=domain.dims()).map(|j| format!("x{j}"))).collect();
        if header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(Error::InvalidTrace(format!(
                "line 1: header must be '{}', found '{}'",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut values = Vec::new();
        for (row_index, record) in csv.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(row_index + 2, |p| p.line() as usize);
            let bad = |message: String| Error::InvalidTrace(format!("line {line}: {message}"));
            if record.len() != expected.len() {
                return Err(bad(format!("expected {} fields, found {}", expected.len(), record.len())));
            }
            let t: usize = record[0].parse().map_err(|_| bad(format!("bad time '{}'", &record[0])))?;
            if t != row_index {
                return Err(bad(format!("time {t} out of sequence, expected {row_index}")));
            }
            let row = record
                .iter()
                .skip(1)
                .map(|field| S::parse_decimal(field).ok_or_else(|| bad(format!("bad value '{field}'"))))
                .collect::<Result<Vec<S>>>()?;
            values.push(row);
        }
        Trace::new(values, domain)
    }

    pub fn read_csv_file(path: impl AsRef<Path>, domain: Domain<S>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::from(e).in_file(path))?;
        Trace::read_csv(file, domain).map_err(|e| e.in_file(path))
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let header: Vec<String> =
            std::iter::once("t".to_string()).chain((1..=self.dims()).map(|j| format!("x{j}"))).collect();
        csv.write_record(&header)?;
        for (t, row) in self.values.iter().enumerate() {
            let record: Vec<String> =
                std::iter::once(t.to_string()).chain(row.iter().map(Scalar::to_decimal_string)).collect();
            csv.write_record(&record)?;
        }
        csv.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn csv_round_trip_is_exact() {
        let text = "t,x1,x2\n0,0.3,1\n1,0.45,-2.5\n2,0.1,0\n";
        let domain = Domain::new(vec![(Rational::from_ratio(0, 1), Rational::from_ratio(1, 1)), (Rational::from_ratio(-3, 1), Rational::from_ratio(3, 1))]).unwrap();
        let trace = Trace::<Rational>::read_csv(text.as_bytes(), domain.clone()).unwrap();
        assert_eq!(trace.last_time(), 2);
        assert_eq!(*trace.value(1, 1), Rational::from_ratio(-5, 2));
        let mut out = Vec::new();
        trace.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn rejects_malformed_csv() {
        let domain = Domain::<f64>::unit(1);
        for text in ["t,x2\n0,0.1\n", "t,x1\n1,0.1\n", "t,x1\n0,abc\n", "t,x1\n0,1.5\n", "t,x1\n"] {
            assert!(Trace::read_csv(text.as_bytes(), domain.clone()).is_err(), "{text:?}");
        }
    }

    #[test]
    fn normalization_scales_into_unit_box() {
        let domain = Domain::new(vec![(0.0, 320.0)]).unwrap();
        let trace = Trace::new(vec![vec![160.0]; 4], domain).unwrap();
        let unit = trace.normalize(&[320.0]).unwrap();
        assert!(unit.samples().iter().all(|row| row[0] == 0.5));
        assert!(matches!(trace.normalize(&[100.0]), Err(Error::NormalizationViolated { .. })));
        let same = unit.normalize(&[1.0]).unwrap();
        assert_eq!(same, unit);
    }

    #[test]
    fn diameter_is_largest_side() {
        let d = Domain::new(vec![(0.0, 1.0), (-2.0, 2.0)]).unwrap();
        assert_eq!(d.diameter(), 4.0);
        assert!(Domain::new(vec![(1.0, 0.0)]).is_err());
    }
}
