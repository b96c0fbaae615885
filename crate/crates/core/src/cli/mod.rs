//! Command-line surface: `test`, `relevance`, `simulate` and `shp`.
//!
//! Input is a headed CSV with one label column; every other column is a
//! numeric feature. Reports are JSON documents conforming to
//! `schema/report.schema.json`. Group ids on the command line are 1-based
//! and follow the label mapping echoed in each report.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_relevance, cmd_shp, cmd_simulate, cmd_test, CombinedReportEntry, ConfigEcho, MomentTable,
    PathSummary, PermutationEntry, PowerEntry, RelevanceReportOut, ShpReport, SimulateReport,
    TestReport, SCHEMA_VERSION,
};
pub use io::{ingest_csv, read_weights, write_csv, GroupLabel, InputDataset, InputSummary};

use crate::cost::CostKind;
use crate::error::{param, Error, Result};
use crate::inference::WeightMatrix;
use crate::sim::{preset_case, SimCase};

/// Which tests `test` runs. `Permutation(B)` runs both asymptotic tests and
/// adds permutation p-values from `B` label shuffles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestSelector {
    WeightedSum,
    Minimum,
    Both,
    Permutation(usize),
}

impl FromStr for TestSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ws" | "weighted-sum" => Ok(TestSelector::WeightedSum),
            "min" | "minimum" => Ok(TestSelector::Minimum),
            "both" => Ok(TestSelector::Both),
            other => {
                let b = other
                    .strip_prefix("perm:")
                    .or_else(|| other.strip_prefix("permutation:"))
                    .ok_or_else(|| Error::Parameter(format!("unknown test '{other}'; expected ws, min, both or perm:B")))?;
                let b: usize =
                    b.parse().map_err(|_| Error::Parameter(format!("invalid permutation count '{b}'")))?;
                Ok(TestSelector::Permutation(b))
            }
        }
    }
}

impl std::fmt::Display for TestSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestSelector::WeightedSum => write!(f, "ws"),
            TestSelector::Minimum => write!(f, "min"),
            TestSelector::Both => write!(f, "both"),
            TestSelector::Permutation(b) => write!(f, "perm:{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseWeights {
    InverseSd,
    Unit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightMode {
    InverseSd,
    Unit,
    Explicit { matrix: WeightMatrix, source: String },
}

impl WeightMode {
    fn describe(&self) -> String {
        match self {
            WeightMode::InverseSd => "inverse-sd".into(),
            WeightMode::Unit => "unit".into(),
            WeightMode::Explicit { source, .. } => format!("file:{source}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cost: CostKind,
    pub weights: WeightMode,
    /// 0-based pairs whose weights are set to zero.
    pub zero_pairs: Vec<(usize, usize)>,
    pub test: TestSelector,
    pub alpha: f64,
    pub seed: u64,
    pub standardize: bool,
    pub check_costs: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cost: CostKind::Gamma(2.0),
            weights: WeightMode::InverseSd,
            zero_pairs: Vec::new(),
            test: TestSelector::Both,
            alpha: 0.05,
            seed: 0,
            standardize: false,
            check_costs: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return param(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if let TestSelector::Permutation(b) = self.test {
            if b < 100 {
                return param(format!("need at least 100 permutations, got {b}"));
            }
        }
        Ok(())
    }
}

fn group_id(token: &str, k: usize) -> Result<usize> {
    let id: usize = token
        .trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("'{token}' is not a group id")))?;
    if id == 0 || id > k {
        return param(format!("group id {id} out of range 1..={k}"));
    }
    Ok(id - 1)
}

/// `"1-2,1-4"` to 0-based pairs.
pub fn parse_zero_pairs(list: &str, k: usize) -> Result<Vec<(usize, usize)>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (a, b) = item
                .split_once('-')
                .ok_or_else(|| Error::Parameter(format!("pair '{item}' must look like 1-2")))?;
            let (a, b) = (group_id(a, k)?, group_id(b, k)?);
            if a == b {
                return param(format!("pair '{item}' repeats a group"));
            }
            Ok((a.min(b), a.max(b)))
        })
        .collect()
}

/// `"1,2;3,4"` to two 0-based id lists.
pub fn parse_combine(text: &str, k: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let (left, right) = text
        .split_once(';')
        .ok_or_else(|| Error::Parameter(format!("combine '{text}' must look like 1,2;3,4")))?;
    let side = |s: &str| s.split(',').map(|t| group_id(t, k)).collect::<Result<Vec<_>>>();
    Ok((side(left)?, side(right)?))
}

#[derive(Debug, Parser)]
#[command(name = "relevance-kit", version, about = "Edge-count k-sample tests and relevance scores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weighted-sum, minimum or permutation test of equal distributions.
    Test(TestArgs),
    /// Pairwise and combined relevance z-scores.
    Relevance(RelevanceArgs),
    /// Monte-Carlo power of a preset or custom Gaussian design.
    Simulate(SimulateArgs),
    /// Export the approximate shortest Hamiltonian path.
    Shp(ShpArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the label column.
    #[arg(long = "group-col")]
    pub group_col: Option<String>,
    /// gamma:G, average or diff.
    #[arg(long, default_value = "gamma:2")]
    pub cost: CostKind,
    /// Z-scale each feature before computing costs.
    #[arg(long)]
    pub standardize: bool,
    /// Report violations of positivity, symmetry and the triangle inequality.
    #[arg(long = "check-costs")]
    pub check_costs: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// ws, min, both or perm:B.
    #[arg(long, default_value = "both")]
    pub test: TestSelector,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Headerless k x k weight grid; overrides --weight-mode.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long = "weight-mode", value_enum, default_value = "inverse-sd")]
    pub weight_mode: BaseWeights,
    /// Pairs to exclude, e.g. "1-2,1-4".
    #[arg(long = "zero-pairs")]
    pub zero_pairs: Option<String>,
}

#[derive(Debug, Args)]
pub struct RelevanceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Union comparison such as "1,2;3,4"; repeatable.
    #[arg(long)]
    pub combine: Vec<String>,
    /// Also write the z grid as TSV.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Preset design 0..=6.
    #[arg(long, conflicts_with = "case_file", required_unless_present = "case_file")]
    pub case: Option<u32>,
    /// JSON description of a custom design.
    #[arg(long = "case-file")]
    pub case_file: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value = "gamma:2")]
    pub cost: CostKind,
    /// ws, min or both.
    #[arg(long, default_value = "both")]
    pub test: TestSelector,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShpArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("RELEVANCE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Parameter(format!("RELEVANCE_THREADS must be a positive integer, got '{raw}'")))?;
    // A pool may already exist when called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn base_config(input: &InputArgs) -> RunConfig {
    RunConfig {
        cost: input.cost,
        standardize: input.standardize,
        check_costs: input.check_costs,
        ..RunConfig::default()
    }
}

fn load(input: &InputArgs, need_groups: bool) -> Result<InputDataset> {
    if need_groups && input.group_col.is_none() {
        return param("--group-col is required for this command");
    }
    ingest_csv(&input.input, input.group_col.as_deref())
}

fn emit<T: serde::Serialize>(report: &T, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Test(args) => {
            let data = load(&args.input, true)?;
            let weights = match &args.weights {
                Some(path) => WeightMode::Explicit {
                    matrix: read_weights(path)?,
                    source: path.display().to_string(),
                },
                None => match args.weight_mode {
                    BaseWeights::InverseSd => WeightMode::InverseSd,
                    BaseWeights::Unit => WeightMode::Unit,
                },
            };
            let zero_pairs = match &args.zero_pairs {
                Some(list) => parse_zero_pairs(list, data.groups.k())?,
                None => Vec::new(),
            };
            let config = RunConfig {
                weights,
                zero_pairs,
                test: args.test,
                alpha: args.alpha,
                seed: args.seed,
                ..base_config(&args.input)
            };
            let report = cmd_test(&data, &config)?;
            print_warnings(&report.warnings);
            emit(&report, args.input.out.as_ref())
        }
        Command::Relevance(args) => {
            let data = load(&args.input, true)?;
            let combine = args
                .combine
                .iter()
                .map(|c| parse_combine(c, data.groups.k()))
                .collect::<Result<Vec<_>>>()?;
            let report = cmd_relevance(&data, &base_config(&args.input), &combine)?;
            print_warnings(&report.warnings);
            if let Some(path) = &args.tsv {
                std::fs::write(path, report.tsv.clone())?;
            }
            emit(&report, args.input.out.as_ref())
        }
        Command::Simulate(args) => {
            let mut case: SimCase = match (&args.case, &args.case_file) {
                (Some(id), _) => preset_case(*id, args.d.unwrap_or(200))?,
                (None, Some(path)) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                (None, None) => return param("either --case or --case-file is required"),
            };
            if let Some(d) = args.d {
                case.d = d;
            }
            let report = cmd_simulate(&case, args.case, args.cost, args.test, args.alpha, args.trials, args.seed)?;
            emit(&report, args.out.as_ref())
        }
        Command::Shp(args) => {
            let data = load(&args.input, false)?;
            let report = cmd_shp(&data, &base_config(&args.input))?;
            print_warnings(&report.warnings);
            emit(&report, args.input.out.as_ref())
        }
    }
}

/// Parses process arguments, runs, and maps errors to exit status 1.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors() {
        assert_eq!("ws".parse::<TestSelector>().unwrap(), TestSelector::WeightedSum);
        assert_eq!("minimum".parse::<TestSelector>().unwrap(), TestSelector::Minimum);
        assert_eq!("perm:2000".parse::<TestSelector>().unwrap(), TestSelector::Permutation(2000));
        assert_eq!(TestSelector::Permutation(5).to_string(), "perm:5");
        assert!("perm:x".parse::<TestSelector>().is_err());
        assert!("fisher".parse::<TestSelector>().is_err());
    }

    #[test]
    fn pair_lists() {
        assert_eq!(parse_zero_pairs("1-2, 4-1,2-3,3-4", 4).unwrap(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!(parse_zero_pairs("1-1", 4).is_err());
        assert!(parse_zero_pairs("1-5", 4).is_err());
        assert!(parse_zero_pairs("12", 4).is_err());
        assert_eq!(parse_combine("1,2;3,4", 4).unwrap(), (vec![0, 1], vec![2, 3]));
        assert!(parse_combine("1,2", 4).is_err());
        assert!(parse_combine("0;1", 4).is_err());
    }

    #[test]
    fn config_guards() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.alpha = 1.0;
        assert!(c.validate().is_err());
        c.alpha = 0.05;
        c.test = TestSelector::Permutation(10);
        assert!(c.validate().is_err());
    }

    #[test]
    fn clap_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
