//! File formats: data CSV, constraint CSV, label files, co-association export.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::harness::LabeledDataset;
use crate::types::{CoAssociationMatrix, ConstraintSet, DataMatrix};

/// Which column of a data CSV carries the class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    None,
    Last,
    Index(usize),
}

impl std::str::FromStr for LabelColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "last" => Ok(Self::Last),
            other => other
                .parse::<usize>()
                .map(Self::Index)
                .map_err(|_| Error::InvalidConfig(format!("bad label column {other:?}"))),
        }
    }
}

/// Loads a rectangular CSV of numeric features with an optional label column
/// (labels may be arbitrary strings, mapped to integers by first
/// appearance). A header row is detected when any feature cell of the first
/// row fails to parse as a number.
pub fn load_csv(path: &Path, label_col: LabelColumn) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        rows.push(record.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "empty file".into(),
        });
    }
    let width = rows[0].len();
    for (idx, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("ragged row: {} fields, expected {width}", row.len()),
            });
        }
    }
    let label_idx = match label_col {
        LabelColumn::None => None,
        LabelColumn::Last => Some(width - 1),
        LabelColumn::Index(i) => {
            if i >= width {
                return Err(Error::InvalidConfig(format!(
                    "label column {i} out of range for {width} columns"
                )));
            }
            Some(i)
        }
    };
    let feature_cols: Vec<usize> = (0..width).filter(|c| Some(*c) != label_idx).collect();
    if feature_cols.is_empty() {
        return Err(Error::InvalidData("no feature columns left".into()));
    }

    let has_header = feature_cols
        .iter()
        .any(|&c| rows[0][c].parse::<f64>().is_err());
    let names = has_header.then(|| rows[0].clone());
    let data_rows = &rows[usize::from(has_header)..];
    if data_rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no data rows after header".into(),
        });
    }

    let n = data_rows.len();
    let mut values = Array2::zeros((n, feature_cols.len()));
    for (i, row) in data_rows.iter().enumerate() {
        let line = i + 1 + usize::from(has_header);
        for (j, &c) in feature_cols.iter().enumerate() {
            let v: f64 = row[c].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("non-numeric feature cell {:?} in column {c}", row[c]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-finite feature value {v} in column {c}"),
                });
            }
            values[(i, j)] = v;
        }
    }

    let labels = label_idx.map(|c| {
        let mut seen: Vec<String> = Vec::new();
        data_rows
            .iter()
            .map(|row| match seen.iter().position(|s| s == &row[c]) {
                Some(id) => id,
                None => {
                    seen.push(row[c].clone());
                    seen.len() - 1
                }
            })
            .collect::<Vec<usize>>()
    });

    let feature_names = names.map(|row| {
        feature_cols
            .iter()
            .map(|&c| row[c].clone())
            .collect::<Vec<String>>()
    });
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let data = DataMatrix::with_names(values, feature_names)?;
    LabeledDataset::new(data, labels, name)
}

/// One predicted label per line.
pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = String::new();
    for l in labels {
        writeln!(out, "{l}").expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads one label per line; arbitrary strings map to integers by first
/// appearance.
pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)?;
    let mut seen: Vec<String> = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let id = match seen.iter().position(|s| s == trimmed) {
            Some(id) => id,
            None => {
                seen.push(trimmed.to_owned());
                seen.len() - 1
            }
        };
        labels.push(id);
        let _ = idx;
    }
    if labels.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no labels in file".into(),
        });
    }
    Ok(labels)
}

/// Header-less rows `i,j,must|cannot`, zero-based.
pub fn write_constraints(path: &Path, cs: &ConstraintSet) -> Result<()> {
    let mut out = String::new();
    for &(i, j) in cs.must() {
        writeln!(out, "{i},{j},must").expect("string write");
    }
    for &(i, j) in cs.cannot() {
        writeln!(out, "{i},{j},cannot").expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parses rows `i,j,must|cannot` and validates them against `n` instances.
pub fn read_constraints(path: &Path, n: usize) -> Result<ConstraintSet> {
    let text = fs::read_to_string(path)?;
    let mut must = Vec::new();
    let mut cannot = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected i,j,type; got {trimmed:?}"),
            });
        }
        let i: usize = parts[0].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("bad index {:?}", parts[0]),
        })?;
        let j: usize = parts[1].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("bad index {:?}", parts[1]),
        })?;
        match parts[2] {
            "must" => must.push((i, j)),
            "cannot" => cannot.push((i, j)),
            other => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("unknown constraint type {other:?}"),
                })
            }
        }
    }
    ConstraintSet::new(must, cannot, n)
}

/// Dense CSV, row-major, full matrix, 17 significant digits (round-trips
/// f64 exactly).
pub fn write_coassociation(path: &Path, pi: &CoAssociationMatrix) -> Result<()> {
    let mut file = fs::File::create(path)?;
    let n = pi.n_instances();
    let entries = pi.entries();
    let mut line = String::new();
    for i in 0..n {
        line.clear();
        for j in 0..n {
            if j > 0 {
                line.push(',');
            }
            write!(line, "{:.16e}", entries[(i, j)]).expect("string write");
        }
        line.push('\n');
        file.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Reads a dense square CSV back into a co-association matrix.
pub fn read_coassociation(path: &Path) -> Result<CoAssociationMatrix> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad matrix cell {cell:?}"),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse {
            line: 0,
            msg: "empty matrix file".into(),
        });
    }
    let mut entries = Array2::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("matrix row has {} cells, expected {n}", row.len()),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            entries[(i, j)] = v;
        }
    }
    CoAssociationMatrix::new(entries, 0)
}

/// Per-partition diagnostics table: slot, clusterer, target clusters, raw
/// uniformity, consensus weight.
pub fn write_uniformity_table(
    path: &Path,
    kinds: &[String],
    k_targets: &[usize],
    raws: &[f64],
    weights: &[f64],
) -> Result<()> {
    let mut out = String::from("partition,kind,k_t,uniformity_raw,weight\n");
    for i in 0..raws.len() {
        writeln!(
            out,
            "{i},{},{},{:.16e},{:.16e}",
            kinds.get(i).map_or("?", |s| s.as_str()),
            k_targets.get(i).copied().unwrap_or(0),
            raws[i],
            weights[i]
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}
