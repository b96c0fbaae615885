use serde::Serialize;

use super::io::{InputDataset, InputSummary};
use super::{RunConfig, TestSelector, WeightMode};
use crate::cost::{validate_assumptions, CostKind, CostMatrix, DataMatrix, DiagnosticReport};
use crate::error::{param, Result};
use crate::inference::{
    permutation_pvalue, weighted_sum_test, MinimumTest, PairIndexer, StatisticKind, TestResult,
    WeightMatrix,
};
use crate::moments::MomentContext;
use crate::pipeline::{analyze_costs, PathAnalysis};
use crate::relevance::relevance_report;
use crate::sim::{estimate_power, SimCase};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub cost: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_mode: Option<String>,
    /// 1-based.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub zero_pairs: Vec<[usize; 2]>,
    pub standardize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSummary {
    pub order: Vec<usize>,
    pub total_cost: f64,
    pub mean_edge_cost: f64,
}

/// Null means of every count and variances of the between-group counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub mean: Vec<Vec<f64>>,
    pub variance: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationEntry {
    pub statistic: StatisticKind,
    pub replicates: usize,
    pub seed: u64,
    pub p_value: f64,
    pub asymptotic_p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub config: ConfigEcho,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_diagnostics: Option<DiagnosticReport>,
    pub path: PathSummary,
    pub counts: Vec<Vec<u64>>,
    pub moments: MomentTable,
    pub weights: Vec<Vec<f64>>,
    /// 1-based pairs with positive weight.
    pub active_pairs: Vec<[usize; 2]>,
    pub results: Vec<TestResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub permutation: Vec<PermutationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedReportEntry {
    /// 1-based ids.
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub count: u64,
    pub z: f64,
    pub abs_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceReportOut {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub config: ConfigEcho,
    pub warnings: Vec<String>,
    pub counts: Vec<Vec<u64>>,
    pub z: Vec<Vec<Option<f64>>>,
    pub combined: Vec<CombinedReportEntry>,
    #[serde(skip)]
    pub tsv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerEntry {
    pub statistic: StatisticKind,
    pub trials: usize,
    pub rejections: usize,
    pub power: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_id: Option<u32>,
    pub case: SimCase,
    pub cost: String,
    pub alpha: f64,
    pub seed: u64,
    pub results: Vec<PowerEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShpReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub config: ConfigEcho,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_diagnostics: Option<DiagnosticReport>,
    pub order: Vec<usize>,
    pub edge_costs: Vec<f64>,
    pub total_cost: f64,
}

struct Prepared {
    costs: CostMatrix,
    warnings: Vec<String>,
    diagnostics: Option<DiagnosticReport>,
}

fn prepare(data: &InputDataset, config: &RunConfig) -> Result<Prepared> {
    config.validate()?;
    let matrix: DataMatrix = if config.standardize { data.matrix.standardized() } else { data.matrix.clone() };
    let costs = config.cost.compute(&matrix)?;
    let mut warnings = Vec::new();
    let (n, d) = (matrix.n_rows(), matrix.n_cols());
    if (n as f64) > (d as f64).sqrt() {
        warnings.push(format!(
            "N = {n} exceeds sqrt(d) = {:.2}; the asymptotic theory assumes N grows slower than sqrt(d)",
            (d as f64).sqrt()
        ));
    }
    let diagnostics = config.check_costs.then(|| validate_assumptions(&costs));
    if let Some(report) = &diagnostics {
        warnings.extend(report.messages());
    }
    Ok(Prepared { costs, warnings, diagnostics })
}

fn require_groups(data: &InputDataset) -> Result<()> {
    if data.groups.k() < 2 {
        return param(format!(
            "found a single group ('{}'); this command needs at least 2",
            data.labels.first().map(String::as_str).unwrap_or("")
        ));
    }
    Ok(())
}

fn path_summary(a: &PathAnalysis) -> PathSummary {
    let edges = a.edge_costs.len().max(1) as f64;
    PathSummary { order: a.path.order().to_vec(), total_cost: a.total_cost, mean_edge_cost: a.total_cost / edges }
}

fn moment_table(ctx: &MomentContext) -> Result<MomentTable> {
    let k = ctx.k();
    let mut mean = vec![vec![0.0; k]; k];
    let mut variance = vec![vec![None; k]; k];
    for m in 0..k {
        for l in 0..k {
            mean[m][l] = ctx.mean(m, l)?;
            if m != l {
                variance[m][l] = Some(ctx.var(m, l)?);
            }
        }
    }
    Ok(MomentTable { mean, variance })
}

fn build_weights(config: &RunConfig, ctx: &MomentContext) -> Result<WeightMatrix> {
    let base = match &config.weights {
        WeightMode::InverseSd => WeightMatrix::inverse_sd(ctx)?,
        WeightMode::Unit => WeightMatrix::unit(ctx.k())?,
        WeightMode::Explicit { matrix, .. } => {
            if matrix.k() != ctx.k() {
                return param(format!("weight file is {0}x{0} but the data have k = {1}", matrix.k(), ctx.k()));
            }
            matrix.clone()
        }
    };
    if config.zero_pairs.is_empty() {
        Ok(base)
    } else {
        base.with_zeroed(&config.zero_pairs)
    }
}

fn one_based(pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<[usize; 2]> {
    pairs.into_iter().map(|(a, b)| [a + 1, b + 1]).collect()
}

pub fn cmd_test(data: &InputDataset, config: &RunConfig) -> Result<TestReport> {
    require_groups(data)?;
    let prepared = prepare(data, config)?;
    let analysis = analyze_costs(&prepared.costs, &data.groups)?;
    let ctx = MomentContext::new(data.groups.sizes().to_vec())?;
    let weights = build_weights(config, &ctx)?;

    let (run_ws, run_min) = match config.test {
        TestSelector::WeightedSum => (true, false),
        TestSelector::Minimum => (false, true),
        TestSelector::Both | TestSelector::Permutation(_) => (true, true),
    };
    let mut results = Vec::new();
    let mut permutation = Vec::new();
    if run_ws {
        results.push(weighted_sum_test(&analysis.table, &weights, &ctx, config.alpha)?);
    }
    if run_min {
        results.push(MinimumTest::new(&weights, &ctx, config.alpha)?.evaluate(&analysis.table)?);
    }
    if let TestSelector::Permutation(b) = config.test {
        for (kind, asymptotic) in [StatisticKind::WeightedSum, StatisticKind::Minimum].into_iter().zip(&results) {
            permutation.push(PermutationEntry {
                statistic: kind,
                replicates: b,
                seed: config.seed,
                p_value: permutation_pvalue(&analysis.path, &data.groups, kind, &weights, b, config.seed)?,
                asymptotic_p_value: asymptotic.p_value,
            });
        }
    }
    let indexer = PairIndexer::new(ctx.k())?;
    let active = indexer.pairs().filter(|&(m, l)| weights.get(m, l) > 0.0);
    Ok(TestReport {
        schema_version: SCHEMA_VERSION,
        command: "test",
        input: data.summary(),
        config: ConfigEcho {
            cost: config.cost.to_string(),
            test: Some(config.test.to_string()),
            alpha: Some(config.alpha),
            seed: Some(config.seed),
            weight_mode: Some(config.weights.describe()),
            zero_pairs: one_based(config.zero_pairs.iter().copied()),
            standardize: config.standardize,
        },
        warnings: prepared.warnings,
        cost_diagnostics: prepared.diagnostics,
        path: path_summary(&analysis),
        counts: analysis.table.rows(),
        moments: moment_table(&ctx)?,
        weights: weights.rows(),
        active_pairs: one_based(active),
        results,
        permutation,
    })
}

/// `combine` holds 0-based id lists.
pub fn cmd_relevance(
    data: &InputDataset,
    config: &RunConfig,
    combine: &[(Vec<usize>, Vec<usize>)],
) -> Result<RelevanceReportOut> {
    require_groups(data)?;
    let prepared = prepare(data, config)?;
    let analysis = analyze_costs(&prepared.costs, &data.groups)?;
    let report = relevance_report(&analysis.path, &data.groups, combine)?;
    let shift = |ids: &[usize]| ids.iter().map(|g| g + 1).collect::<Vec<_>>();
    let combined = report
        .combined
        .iter()
        .map(|e| CombinedReportEntry {
            first: shift(&e.first),
            second: shift(&e.second),
            count: e.count,
            z: e.z,
            abs_z: e.abs_z,
        })
        .collect();
    Ok(RelevanceReportOut {
        schema_version: SCHEMA_VERSION,
        command: "relevance",
        input: data.summary(),
        config: ConfigEcho {
            cost: config.cost.to_string(),
            test: None,
            alpha: None,
            seed: None,
            weight_mode: None,
            zero_pairs: Vec::new(),
            standardize: config.standardize,
        },
        warnings: prepared.warnings,
        tsv: report.to_tsv(&data.labels),
        counts: report.counts,
        z: report.z,
        combined,
    })
}

pub fn cmd_simulate(
    case: &SimCase,
    case_id: Option<u32>,
    cost: CostKind,
    test: TestSelector,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<SimulateReport> {
    let kinds: &[StatisticKind] = match test {
        TestSelector::WeightedSum => &[StatisticKind::WeightedSum],
        TestSelector::Minimum => &[StatisticKind::Minimum],
        TestSelector::Both => &[StatisticKind::WeightedSum, StatisticKind::Minimum],
        TestSelector::Permutation(_) => return param("simulate supports ws, min or both"),
    };
    let results = kinds
        .iter()
        .map(|&kind| {
            let p = estimate_power(case, cost, kind, alpha, trials, seed)?;
            Ok(PowerEntry {
                statistic: kind,
                trials: p.trials,
                rejections: p.rejections,
                power: p.power,
                std_error: p.std_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulateReport {
        schema_version: SCHEMA_VERSION,
        command: "simulate",
        case_id,
        case: case.clone(),
        cost: cost.to_string(),
        alpha,
        seed,
        results,
    })
}

pub fn cmd_shp(data: &InputDataset, config: &RunConfig) -> Result<ShpReport> {
    let prepared = prepare(data, config)?;
    let analysis = analyze_costs(&prepared.costs, &data.groups)?;
    Ok(ShpReport {
        schema_version: SCHEMA_VERSION,
        command: "shp",
        input: data.summary(),
        config: ConfigEcho {
            cost: config.cost.to_string(),
            test: None,
            alpha: None,
            seed: None,
            weight_mode: None,
            zero_pairs: Vec::new(),
            standardize: config.standardize,
        },
        warnings: prepared.warnings,
        cost_diagnostics: prepared.diagnostics,
        order: analysis.path.order().to_vec(),
        edge_costs: analysis.edge_costs,
        total_cost: analysis.total_cost,
    })
}
