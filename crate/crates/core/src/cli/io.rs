//! CSV ingestion and export.

use std::collections::HashMap;
use std::path::Path as FsPath;

use serde::Serialize;

use crate::cost::DataMatrix;
use crate::counts::GroupAssignment;
use crate::error::{Error, Result};
use crate::inference::WeightMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct InputDataset {
    pub matrix: DataMatrix,
    pub groups: GroupAssignment,
    /// Original label of each dense group id.
    pub labels: Vec<String>,
    pub features: Vec<String>,
    pub group_column: Option<String>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSummary {
    pub source: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub group_column: Option<String>,
    pub labels: Vec<GroupLabel>,
}

/// `id` is the 1-based group number used on the command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupLabel {
    pub id: usize,
    pub label: String,
    pub size: usize,
}

impl InputDataset {
    pub fn summary(&self) -> InputSummary {
        InputSummary {
            source: self.source.clone(),
            n: self.matrix.n_rows(),
            d: self.matrix.n_cols(),
            k: self.groups.k(),
            group_column: self.group_column.clone(),
            labels: self
                .labels
                .iter()
                .zip(self.groups.sizes())
                .enumerate()
                .map(|(g, (label, &size))| GroupLabel { id: g + 1, label: label.clone(), size })
                .collect(),
        }
    }
}

fn parse_err(source: &str, msg: String) -> Error {
    Error::Parse(format!("{source}: {msg}"))
}

/// Reads a headed CSV. Every column other than `group_column` must be
/// numeric. Labels become dense ids in order of first appearance. Without a
/// group column all rows fall in one group.
pub fn ingest_csv(path: impl AsRef<FsPath>, group_column: Option<&str>) -> Result<InputDataset> {
    let path = path.as_ref();
    let source = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(&source, e.to_string()))?;
    let header: Vec<String> =
        reader.headers().map_err(|e| parse_err(&source, e.to_string()))?.iter().map(str::to_string).collect();
    if header.is_empty() {
        return Err(parse_err(&source, "empty header row".into()));
    }
    let group_idx = match group_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| parse_err(&source, format!("no column named '{name}' in header")))?,
        ),
        None => None,
    };
    let features: Vec<String> =
        header.iter().enumerate().filter(|&(c, _)| Some(c) != group_idx).map(|(_, h)| h.clone()).collect();
    if features.is_empty() {
        return Err(parse_err(&source, "no feature columns".into()));
    }

    let mut values = Vec::new();
    let mut ids = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut lookup: HashMap<String, usize> = HashMap::new();
    let mut n = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| parse_err(&source, format!("row {row}: {e}")))?;
        if record.len() != header.len() {
            return Err(parse_err(
                &source,
                format!("row {row}: expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        for (c, field) in record.iter().enumerate() {
            if Some(c) == group_idx {
                if field.is_empty() {
                    return Err(parse_err(&source, format!("row {row}: missing group label")));
                }
                let next = labels.len();
                let id = *lookup.entry(field.to_string()).or_insert_with(|| {
                    labels.push(field.to_string());
                    next
                });
                ids.push(id);
            } else {
                let v: f64 = field.parse().map_err(|_| {
                    parse_err(&source, format!("row {row}, column '{}': '{field}' is not a number", header[c]))
                })?;
                if !v.is_finite() {
                    return Err(parse_err(&source, format!("row {row}, column '{}': non-finite value", header[c])));
                }
                values.push(v);
            }
        }
        n += 1;
    }
    if n == 0 {
        return Err(parse_err(&source, "no data rows".into()));
    }
    if group_idx.is_none() {
        ids = vec![0; n];
        labels = vec!["all".into()];
    }
    Ok(InputDataset {
        matrix: DataMatrix::new(n, features.len(), values)?,
        groups: GroupAssignment::new(ids)?,
        labels,
        features,
        group_column: group_column.map(str::to_string),
        source,
    })
}

/// Writes features followed by a label column named `group_column`.
/// Values use the shortest round-trip representation.
pub fn write_csv(
    path: impl AsRef<FsPath>,
    data: &DataMatrix,
    groups: &GroupAssignment,
    labels: &[String],
    group_column: &str,
) -> Result<()> {
    if data.n_rows() != groups.n() || labels.len() != groups.k() {
        return Err(Error::Shape("data, groups and labels disagree in size".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
    let mut header: Vec<String> = (1..=data.n_cols()).map(|j| format!("x{j}")).collect();
    header.push(group_column.to_string());
    w.write_record(&header).map_err(|e| Error::Parse(e.to_string()))?;
    for (t, row) in data.rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(labels[groups.label(t)].clone());
        w.write_record(&rec).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// A headerless `k x k` numeric grid.
pub fn read_weights(path: impl AsRef<FsPath>) -> Result<WeightMatrix> {
    let path = path.as_ref();
    let source = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| parse_err(&source, e.to_string()))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(&source, format!("row {}: {e}", i + 1)))?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(&source, format!("row {}: '{f}' is not a number", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    WeightMatrix::from_rows(&rows)
}
