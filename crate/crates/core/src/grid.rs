//! Coordinate axes and the plain-text CSV conventions shared by every emitter.
//!
//! Floats are printed with 17 significant digits in `{:.16e}` form, the
//! decimal separator is always '.', and every row ends with '\n', so equal
//! inputs give byte-identical files.

use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed range `min..=max` sampled every `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl StepRange {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let r = StepRange { min, max, step };
        r.validate()?;
        Ok(r)
    }

    /// A single point.
    pub fn point(v: f64) -> Self {
        StepRange { min: v, max: v, step: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || self.max < self.min {
            return Err(Error::InvalidArgument(format!("bad range [{}, {}]", self.min, self.max)));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidArgument(format!("range step must be positive, got {}", self.step)));
        }
        if self.len() > 10_000_000 {
            return Err(Error::InvalidArgument("range has more than 1e7 points".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Points computed as `min + i * step` so no error accumulates.
    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.min + i as f64 * self.step).collect()
    }
}

impl FromStr for StepRange {
    type Err = Error;

    /// `min:max:step`, or a single value for a one-point range.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("'{t}' is not a number in range '{s}'")))
        };
        match parts.as_slice() {
            [v] => Ok(StepRange::point(num(v)?)),
            [a, b, c] => StepRange::new(num(a)?, num(b)?, num(c)?),
            _ => Err(Error::InvalidArgument(format!("range '{s}' must be min:max:step or a single value"))),
        }
    }
}

/// `count` equally spaced points on the half-open interval [0, period).
pub fn periodic_points(period: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| period * i as f64 / count as f64).collect()
}

/// The canonical float rendering used in every output file.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV field: integers stay integers, reals use [`fmt_f64`].
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Int(i) => i.to_string(),
            Field::Real(v) => fmt_f64(*v),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Real(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<i64> for Field {
    fn from(v: i64) -> Self {
        Field::Int(v)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

/// Writes a header line followed by rows.
pub fn write_csv<W: Write>(out: &mut W, header: &[&str], rows: &[Vec<Field>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(Field::render).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
