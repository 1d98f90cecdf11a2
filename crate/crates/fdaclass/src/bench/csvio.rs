//! Dataset CSV format.
//!
//! UTF-8, comma-separated, LF line endings. The header row is
//! `label,t=<t_1>,...,t=<t_N>` with strictly increasing node values; each
//! data row is a label (`0`, `1`, or `?` for unlabeled queries) followed
//! by N decimal values. Values are written with 17 significant digits so
//! a save/load round trip is lossless.

use std::fmt::Write as _;
use std::path::Path;

use crate::curve::{Curve, Grid, LabeledSample};
use crate::error::{Error, Result};

/// Rows of a dataset file in file order; unlabeled queries carry `None`.
#[derive(Debug, Clone)]
pub struct CsvDataset {
    pub grid: Grid,
    pub rows: Vec<(Option<u8>, Curve)>,
}

impl CsvDataset {
    /// The labeled rows as a training sample (errors when none exist).
    pub fn labeled(&self) -> Result<LabeledSample> {
        let mut curves = Vec::new();
        let mut labels = Vec::new();
        for (label, curve) in &self.rows {
            if let Some(y) = label {
                curves.push(curve.clone());
                labels.push(*y);
            }
        }
        if curves.is_empty() {
            return Err(Error::insufficient(
                "csv: the file contains no labeled rows",
            ));
        }
        LabeledSample::new(self.grid.clone(), curves, labels)
    }

    /// Unlabeled query curves, in file order.
    pub fn queries(&self) -> Vec<Curve> {
        self.rows
            .iter()
            .filter(|(l, _)| l.is_none())
            .map(|(_, c)| c.clone())
            .collect()
    }

    /// Every curve in file order, labeled or not.
    pub fn all_curves(&self) -> Vec<Curve> {
        self.rows.iter().map(|(_, c)| c.clone()).collect()
    }
}

/// Parse a dataset file.
pub fn load_csv(path: impl AsRef<Path>) -> Result<CsvDataset> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text)
}

pub(crate) fn parse_csv(text: &str) -> Result<CsvDataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty file"))?;
    let fields: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    if fields.is_empty() || fields[0] != "label" {
        return Err(Error::parse(1, "header must start with 'label'"));
    }
    if fields.len() < 3 {
        return Err(Error::parse(1, "header needs at least two t=<node> columns"));
    }
    let mut nodes = Vec::with_capacity(fields.len() - 1);
    for f in &fields[1..] {
        let value = f
            .strip_prefix("t=")
            .ok_or_else(|| Error::parse(1, format!("expected 't=<node>' column, got '{f}'")))?;
        let t: f64 = value
            .parse()
            .map_err(|_| Error::parse(1, format!("invalid node value '{value}'")))?;
        nodes.push(t);
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::parse(1, "non-increasing grid"));
    }
    let grid = Grid::new(nodes).map_err(|e| Error::parse(1, e.to_string()))?;
    let n = grid.len();

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n + 1 {
            return Err(Error::parse(
                line_no,
                format!("expected {} fields, got {}", n + 1, fields.len()),
            ));
        }
        let label = match fields[0] {
            "0" => Some(0u8),
            "1" => Some(1u8),
            "?" => None,
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("label must be 0, 1 or ?, got '{other}'"),
                ))
            }
        };
        let mut values = Vec::with_capacity(n);
        for f in &fields[1..] {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid value '{f}'")))?;
            values.push(v);
        }
        let curve = Curve::new(values).map_err(|e| Error::parse(line_no, e.to_string()))?;
        rows.push((label, curve));
    }
    Ok(CsvDataset { grid, rows })
}

fn write_rows(grid: &Grid, rows: &[(Option<u8>, &Curve)]) -> String {
    let mut out = String::from("label");
    for t in grid.nodes() {
        let _ = write!(out, ",t={t:?}");
    }
    out.push('\n');
    for (label, curve) in rows {
        match label {
            Some(y) => {
                let _ = write!(out, "{y}");
            }
            None => out.push('?'),
        }
        for v in curve.values() {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Write a labeled sample.
pub fn save_csv(s: &LabeledSample, path: impl AsRef<Path>) -> Result<()> {
    let rows: Vec<(Option<u8>, &Curve)> = s
        .curves()
        .iter()
        .zip(s.labels())
        .map(|(c, &y)| (Some(y), c))
        .collect();
    std::fs::write(path, write_rows(s.grid(), &rows))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn sample() -> LabeledSample {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g = Grid::new(vec![0.0, 0.13, 0.5, 0.75, 1.0]).unwrap();
        let curves: Vec<Curve> = (0..6)
            .map(|_| {
                Curve::new(
                    (0..5)
                        .map(|_| rng.sample::<f64, _>(StandardNormal) * 1e3)
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        LabeledSample::new(g, curves, vec![0, 1, 0, 1, 1, 0]).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        save_csv(&s, &path).unwrap();
        let loaded = load_csv(&path).unwrap();
        assert_eq!(loaded.grid, *s.grid());
        let back = loaded.labeled().unwrap();
        assert_eq!(back.labels(), s.labels());
        for (a, b) in back.curves().iter().zip(s.curves()) {
            assert_eq!(a.values(), b.values());
        }
        // writing again reproduces the identical file
        let path2 = dir.path().join("data2.csv");
        save_csv(&back, &path2).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            std::fs::read_to_string(&path2).unwrap()
        );
    }

    #[test]
    fn queries_split_from_labeled_rows() {
        let text = "label,t=0,t=0.5,t=1\n1,1.0,2.0,3.0\n?,4.0,5.0,6.0\n0,0.5,0.5,0.5\n";
        let ds = parse_csv(text).unwrap();
        assert_eq!(ds.rows.len(), 3);
        assert_eq!(ds.queries().len(), 1);
        let labeled = ds.labeled().unwrap();
        assert_eq!(labeled.n(), 2);
        assert_eq!(labeled.labels(), &[1, 0]);
    }

    #[test]
    fn wrong_field_count_names_line() {
        let text = "label,t=0,t=0.5,t=1\n1,1.0,2.0,3.0\n0,1.0,2.0\n";
        match parse_csv(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("expected 4 fields"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_increasing_header_rejected() {
        let text = "label,t=0,t=0.5,t=0.25\n1,1.0,2.0,3.0\n";
        match parse_csv(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("non-increasing grid"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_labels_and_values_are_rejected() {
        assert!(parse_csv("label,t=0,t=1\n2,1.0,2.0\n").is_err());
        assert!(parse_csv("label,t=0,t=1\n1,abc,2.0\n").is_err());
        assert!(parse_csv("label,t=0,t=1\n1,nan,2.0\n").is_err());
        assert!(parse_csv("value,t=0,t=1\n").is_err());
    }
}
