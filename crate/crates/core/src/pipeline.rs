//! Data to counted path in one call.

use serde::Serialize;

use crate::cost::{CostKind, CostMatrix, DataMatrix};
use crate::counts::{count_edges, EdgeCountTable, GroupAssignment};
use crate::error::{Error, Result};
use crate::shp::{approximate_shp, path_cost, Path};

#[derive(Debug, Clone, Serialize)]
pub struct PathAnalysis {
    pub path: Path,
    pub total_cost: f64,
    pub edge_costs: Vec<f64>,
    pub table: EdgeCountTable,
}

/// Cost matrix, approximate shortest Hamiltonian path and edge-count table.
pub fn analyze(data: &DataMatrix, groups: &GroupAssignment, cost: CostKind) -> Result<PathAnalysis> {
    if data.n_rows() != groups.n() {
        return Err(Error::Shape(format!(
            "{} observations but {} group labels",
            data.n_rows(),
            groups.n()
        )));
    }
    analyze_costs(&cost.compute(data)?, groups)
}

/// As [`analyze`], starting from a precomputed cost matrix.
pub fn analyze_costs(costs: &CostMatrix, groups: &GroupAssignment) -> Result<PathAnalysis> {
    if costs.n() != groups.n() {
        return Err(Error::Shape(format!("{} nodes but {} group labels", costs.n(), groups.n())));
    }
    let path = approximate_shp(costs)?;
    let edge_costs = path.edges().map(|(a, b)| costs.get(a, b)).collect();
    let total_cost = path_cost(&path, costs)?;
    let table = count_edges(&path, groups)?;
    Ok(PathAnalysis { path, total_cost, edge_costs, table })
}
