//! Training samples: covariates in the unit hypercube and real responses.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A regression sample stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<f64>,
    d: usize,
}

impl Dataset {
    /// Builds a dataset from a row-major covariate buffer.
    ///
    /// Every covariate must lie in `[0, 1]` and `x.len()` must equal
    /// `y.len() * d`.
    pub fn new(x: Vec<f64>, y: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if x.len() != y.len() * d {
            return Err(Error::Dimension { expected: y.len() * d, got: x.len() });
        }
        if let Some(pos) = x.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Data(format!("covariate x[{}][{}] = {} lies outside [0, 1]", pos / d, pos % d, x[pos])));
        }
        if let Some(pos) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("response y[{pos}] is not finite")));
        }
        Ok(Self { x, y, d })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension { expected: d, got: bad.len() });
        }
        Self::new(rows.concat(), y, d)
    }

    pub fn empty(d: usize) -> Self {
        Self { x: Vec::new(), y: Vec::new(), d }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.x.chunks_exact(self.d)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.d + j]
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Same covariates, different responses.
    pub fn with_responses(&self, y: Vec<f64>) -> Result<Self> {
        if y.len() != self.n() {
            return Err(Error::Dimension { expected: self.n(), got: y.len() });
        }
        Self::new(self.x.clone(), y, self.d)
    }

    /// Writes the header `x1,...,xd,y` followed by one row per observation.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.d).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        w.write_record(&header)?;
        for (row, y) in self.rows().zip(&self.y) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(y.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Reads a CSV with columns `x1..xd` and an optional trailing `y`.
    /// Without a `y` column the responses are all zero (query files).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let has_y = header.iter().next_back() == Some("y");
        let d = if has_y { header.len() - 1 } else { header.len() };
        for (j, name) in header.iter().take(d).enumerate() {
            if name != format!("x{}", j + 1) {
                return Err(Error::Data(format!("unexpected column `{name}` at position {}", j + 1)));
            }
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse =
                |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Data(format!("row {}: `{s}`: {e}", line + 1)));
            for field in rec.iter().take(d) {
                x.push(parse(field)?);
            }
            y.push(if has_y { parse(&rec[d])? } else { 0.0 });
        }
        Self::new(x, y, d)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}
