//! Relevance scores: standardized between-sample edge counts.
//!
//! A strongly negative score means two samples (or unions of samples) share
//! far fewer path edges than chance, i.e. they differ; a positive score means
//! they mix more than chance.

use serde::Serialize;

use crate::counts::{check_disjoint_subsets, count_edges, EdgeCountTable, GroupAssignment};
use crate::error::{param, Error, Result};
use crate::moments::{mean_between, var_between, MomentContext};
use crate::shp::Path;

fn standardize(count: u64, n1: usize, n2: usize, total: usize) -> Result<f64> {
    let mean = mean_between(n1, n2, total)?;
    let var = var_between(n1, n2, total)?;
    if var <= 0.0 {
        return Err(Error::Degenerate(format!(
            "count between groups of sizes {n1} and {n2} (N = {total}) has zero null variance"
        )));
    }
    Ok((count as f64 - mean) / var.sqrt())
}

pub fn z_score(m: usize, l: usize, table: &EdgeCountTable, ctx: &MomentContext) -> Result<f64> {
    if m == l {
        return param(format!("z-score needs two distinct groups, got ({m}, {l})"));
    }
    if table.k() != ctx.k() {
        return Err(Error::Shape(format!("count table k = {}, sizes k = {}", table.k(), ctx.k())));
    }
    standardize(table.get(m, l), ctx.size(m)?, ctx.size(l)?, ctx.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedZ {
    pub signed: f64,
    pub absolute: f64,
}

/// z-score between the unions `∪a1` and `∪a2`, computed by merging each
/// union into one pseudo-group and standardizing with the merged sizes.
pub fn combined_z_score(
    a1: &[usize],
    a2: &[usize],
    path: &Path,
    groups: &GroupAssignment,
) -> Result<CombinedZ> {
    check_disjoint_subsets(a1, a2, groups.k())?;
    let merged = groups.merged(a1, a2)?;
    let table = count_edges(path, &merged)?;
    let sizes = merged.sizes();
    let signed = standardize(table.get(0, 1), sizes[0], sizes[1], groups.n())?;
    Ok(CombinedZ { signed, absolute: signed.abs() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedEntry {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub count: u64,
    pub z: f64,
    pub abs_z: f64,
}

/// Pairwise z grid (diagonal `None`) plus requested union comparisons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceReport {
    pub k: usize,
    pub sizes: Vec<usize>,
    pub counts: Vec<Vec<u64>>,
    pub z: Vec<Vec<Option<f64>>>,
    pub combined: Vec<CombinedEntry>,
}

impl RelevanceReport {
    pub fn get(&self, m: usize, l: usize) -> Option<f64> {
        self.z.get(m).and_then(|row| row.get(l)).copied().flatten()
    }

    /// Tab-separated grid with a header row; `names` label rows and columns.
    pub fn to_tsv(&self, names: &[String]) -> String {
        let mut out = String::new();
        out.push_str("group");
        for n in names {
            out.push('\t');
            out.push_str(n);
        }
        out.push('\n');
        for (m, row) in self.z.iter().enumerate() {
            out.push_str(&names[m]);
            for v in row {
                out.push('\t');
                if let Some(v) = v {
                    out.push_str(&format!("{v:.4}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn relevance_report(
    path: &Path,
    groups: &GroupAssignment,
    combined: &[(Vec<usize>, Vec<usize>)],
) -> Result<RelevanceReport> {
    let k = groups.k();
    if k < 2 {
        return param("relevance analysis needs at least 2 groups");
    }
    let ctx = MomentContext::new(groups.sizes().to_vec())?;
    let table = count_edges(path, groups)?;
    let mut z = vec![vec![None; k]; k];
    for m in 0..k {
        for l in (m + 1)..k {
            let v = z_score(m, l, &table, &ctx)?;
            z[m][l] = Some(v);
            z[l][m] = Some(v);
        }
    }
    let combined = combined
        .iter()
        .map(|(a1, a2)| {
            let cz = combined_z_score(a1, a2, path, groups)?;
            let merged = groups.merged(a1, a2)?;
            Ok(CombinedEntry {
                first: a1.clone(),
                second: a2.clone(),
                count: count_edges(path, &merged)?.get(0, 1),
                z: cz.signed,
                abs_z: cz.absolute,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelevanceReport { k, sizes: groups.sizes().to_vec(), counts: table.rows(), z, combined })
}
