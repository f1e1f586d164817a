//! Protocol tables, CSV curves and JSON-lines logs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::ProtocolSequence;
use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRow {
    pub label: String,
    pub duration: f64,
    pub zero_duration: bool,
    pub gauge: bool,
}

/// Generator labels with durations, in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTable {
    pub rows: Vec<ProtocolRow>,
}

impl ProtocolTable {
    /// Rows for a sequence; labels in `gauge_labels` are flagged as gauge terms.
    pub fn from_sequence(seq: &ProtocolSequence, gauge_labels: &[String]) -> Self {
        let rows = seq
            .labels
            .iter()
            .zip(&seq.durations)
            .map(|(l, &d)| ProtocolRow {
                label: l.clone(),
                duration: d,
                zero_duration: d == 0.0,
                gauge: gauge_labels.contains(l),
            })
            .collect();
        Self { rows }
    }

    pub fn to_sequence(&self) -> Result<ProtocolSequence> {
        ProtocolSequence::new(
            self.rows.iter().map(|r| r.label.clone()).collect(),
            self.rows.iter().map(|r| r.duration).collect(),
        )
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| r.duration).sum()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["label", "duration", "zero_duration", "gauge"])?;
        for r in &self.rows {
            w.write_record([r.label.clone(), fmt_f64(r.duration), r.zero_duration.to_string(), r.gauge.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table; only the `label` and `duration` columns are required.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let headers = r.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h.trim() == name);
        let (li, di) = match (col("label"), col("duration")) {
            (Some(l), Some(d)) => (l, d),
            _ => return Err(Error::Config(format!("{} lacks label/duration columns", path.display()))),
        };
        let gi = col("gauge");
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let duration: f64 = rec[di]
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("bad duration '{}': {e}", &rec[di])))?;
            rows.push(ProtocolRow {
                label: rec[li].trim().to_string(),
                duration,
                zero_duration: duration == 0.0,
                gauge: gi.is_some_and(|g| rec[g].trim() == "true"),
            });
        }
        let t = Self { rows };
        t.to_sequence()?;
        Ok(t)
    }
}

/// Writes a CSV file from a header and pre-formatted rows.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::Dimension(format!("row of {} fields under a {}-column header", r.len(), header.len())));
        }
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Appends one JSON object per line, flushing after each.
pub struct JsonlWriter {
    out: BufWriter<File>,
}

impl JsonlWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self { out: BufWriter::new(File::create(path)?) })
    }

    pub fn append(path: &Path) -> Result<Self> {
        Ok(Self { out: BufWriter::new(std::fs::OpenOptions::new().create(true).append(true).open(path)?) })
    }

    pub fn write<T: Serialize>(&mut self, value: &T) -> Result<()> {
        serde_json::to_writer(&mut self.out, value)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_table_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let seq = ProtocolSequence::new(
            vec!["Y".into(), "H1".into(), "X|Y".into()],
            vec![0.1 + 0.2, std::f64::consts::PI / 7.0, 0.0],
        )
        .unwrap();
        let t = ProtocolTable::from_sequence(&seq, &["Y".into(), "X|Y".into()]);
        let p = dir.path().join("p.csv");
        t.write_csv(&p).unwrap();
        let back = ProtocolTable::read_csv(&p).unwrap();
        assert_eq!(back, t);
        assert!(back.rows[2].zero_duration);
    }
}
