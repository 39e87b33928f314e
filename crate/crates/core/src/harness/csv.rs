//! UTF-8 CSV tables with a single header line.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a file back
//! reproduces every value bit for bit.

use std::fmt::Display;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<V: Display>(&mut self, row: impl IntoIterator<Item = V>) -> Result<()> {
        let row: Vec<String> = row.into_iter().map(|v| v.to_string()).collect();
        if row.len() != self.header.len() {
            return Err(Error::DimensionMismatch {
                expected: self.header.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parses a column as `f64`.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let k = self
            .column_index(name)
            .ok_or_else(|| Error::InvalidParameter(format!("no column named {name:?}")))?;
        self.rows
            .iter()
            .map(|r| {
                r[k].parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("{name}: not a number: {:?}", r[k])))
            })
            .collect()
    }

    pub fn to_writer<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header).map_err(csv_error)?;
        for r in &self.rows {
            out.write_record(r).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_writer(std::fs::File::create(path)?)
    }

    pub fn from_reader<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(csv_error)?.iter().map(String::from).collect();
        let rows = rdr
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
            .collect::<std::result::Result<_, _>>()
            .map_err(csv_error)?;
        Ok(Self { header, rows })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        let vals = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 1e-7 + 1e-23];
        let mut t = Table::new(["i", "v"]);
        for (i, v) in vals.iter().enumerate() {
            t.push([i as f64, *v]).unwrap();
        }
        let mut buf = Vec::new();
        t.to_writer(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next(), Some("i,v"));
        let back = Table::from_reader(&buf[..]).unwrap();
        assert_eq!(back, t);
        let col = back.column("v").unwrap();
        for (a, b) in col.iter().zip(vals) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn row_width_is_checked() {
        let mut t = Table::new(["a", "b"]);
        assert!(t.push([1.0]).is_err());
        assert!(t.column("c").is_err());
    }
}
