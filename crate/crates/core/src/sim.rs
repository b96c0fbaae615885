//! Gaussian data generators and the power-study harness.
//!
//! Every group is drawn from `N_d(μ·1, Σ)` where `Σ` is either stationary
//! AR(1), `Σ_ij = σ² ρ^|i−j|`, or a scaled identity. AR(1) rows are produced
//! by the stationary recursion, which is exact and `O(d)` per row.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostKind, DataMatrix};
use crate::counts::GroupAssignment;
use crate::error::{param, Result};
use crate::inference::{weighted_sum_test, MinimumTest, StatisticKind, WeightMatrix};
use crate::moments::MomentContext;
use crate::pipeline::analyze;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceSpec {
    Ar1 { rho: f64, variance: f64 },
    ScaledIdentity { scale: f64 },
}

impl CovarianceSpec {
    pub fn ar1(rho: f64) -> Self {
        CovarianceSpec::Ar1 { rho, variance: 1.0 }
    }

    pub fn identity(scale: f64) -> Self {
        CovarianceSpec::ScaledIdentity { scale }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            CovarianceSpec::Ar1 { rho, variance } => {
                if !(rho > -1.0 && rho < 1.0) {
                    return param(format!("AR(1) coefficient must lie in (-1, 1), got {rho}"));
                }
                if variance.is_nan() || variance <= 0.0 {
                    return param(format!("AR(1) variance must be positive, got {variance}"));
                }
            }
            CovarianceSpec::ScaledIdentity { scale } => {
                if scale.is_nan() || scale <= 0.0 {
                    return param(format!("identity scale must be positive, got {scale}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub size: usize,
    /// Common mean of every coordinate.
    pub mean: f64,
    pub covariance: CovarianceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCase {
    pub d: usize,
    pub groups: Vec<GroupSpec>,
    #[serde(default)]
    pub seed: u64,
}

impl SimCase {
    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.size).collect()
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return param("dimension must be at least 1");
        }
        if self.groups.is_empty() {
            return param("a simulation case needs at least one group");
        }
        for g in &self.groups {
            if g.size < 1 {
                return param("group sizes must be positive");
            }
            if !g.mean.is_finite() {
                return param("group means must be finite");
            }
            g.covariance.validate()?;
        }
        if self.groups.iter().map(|g| g.size).sum::<usize>() < 2 {
            return param("need at least 2 observations");
        }
        Ok(())
    }
}

fn group(size: usize, mean: f64, covariance: CovarianceSpec) -> GroupSpec {
    GroupSpec { size, mean, covariance }
}

/// Preset designs. `0` is a two-sample null with IID standard normal
/// coordinates; `1..=3` are two-sample alternatives with sizes (20, 40), and
/// `4..=6` three-sample alternatives with sizes (20, 30, 40).
pub fn preset_case(id: u32, d: usize) -> Result<SimCase> {
    let ar = CovarianceSpec::ar1;
    let groups = match id {
        0 => vec![group(20, 0.0, CovarianceSpec::identity(1.0)), group(40, 0.0, CovarianceSpec::identity(1.0))],
        1 => vec![group(20, 0.0, ar(0.2)), group(40, 0.1, ar(0.2))],
        2 => vec![group(20, 0.0, ar(0.2)), group(40, 0.0, ar(0.4))],
        3 => vec![group(20, 0.0, ar(0.2)), group(40, 0.1, ar(0.4))],
        4 => vec![group(20, 0.0, ar(0.2)), group(30, 0.0, ar(0.2)), group(40, 0.1, ar(0.4))],
        5 => vec![group(20, 0.0, ar(0.2)), group(30, 0.0, ar(0.4)), group(40, 0.1, ar(0.6))],
        6 => vec![group(20, 0.0, ar(0.2)), group(30, -0.1, ar(0.4)), group(40, 0.1, ar(0.6))],
        other => return param(format!("unknown simulation case {other}; expected 0..=6")),
    };
    Ok(SimCase { d, groups, seed: 0 })
}

/// Four samples where the first and last, and the middle two, share a law:
/// sizes (20, 24, 26, 28) with `N(0, I)`, `N(0.01, 1.1 I)`, `N(0.01, 1.1 I)`,
/// `N(0, I)`.
pub fn relevance_case(d: usize) -> SimCase {
    let id = CovarianceSpec::identity;
    SimCase {
        d,
        groups: vec![
            group(20, 0.0, id(1.0)),
            group(24, 0.01, id(1.1)),
            group(26, 0.01, id(1.1)),
            group(28, 0.0, id(1.0)),
        ],
        seed: 0,
    }
}

/// ChaCha stream `stream` of `seed`; distinct streams are independent.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gen_gaussian(case: &SimCase) -> Result<(DataMatrix, GroupAssignment)> {
    gen_gaussian_with(case, &mut stream_rng(case.seed, 0))
}

/// Rows are emitted group by group in the order of `case.groups`.
pub fn gen_gaussian_with<R: Rng + ?Sized>(case: &SimCase, rng: &mut R) -> Result<(DataMatrix, GroupAssignment)> {
    case.validate()?;
    let d = case.d;
    let n: usize = case.sizes().iter().sum();
    let mut values = Vec::with_capacity(n * d);
    for g in &case.groups {
        for _ in 0..g.size {
            match g.covariance {
                CovarianceSpec::Ar1 { rho, variance } => {
                    let sd = variance.sqrt();
                    let innov = sd * (1.0 - rho * rho).sqrt();
                    let mut dev = sd * rng.sample::<f64, _>(StandardNormal);
                    values.push(g.mean + dev);
                    for _ in 1..d {
                        dev = rho * dev + innov * rng.sample::<f64, _>(StandardNormal);
                        values.push(g.mean + dev);
                    }
                }
                CovarianceSpec::ScaledIdentity { scale } => {
                    let sd = scale.sqrt();
                    values.extend((0..d).map(|_| g.mean + sd * rng.sample::<f64, _>(StandardNormal)));
                }
            }
        }
    }
    let data = DataMatrix::new(n, d, values)?;
    let groups = GroupAssignment::from_sizes(&case.sizes())?;
    Ok((data, groups))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerEstimate {
    pub trials: usize,
    pub rejections: usize,
    pub power: f64,
    pub std_error: f64,
}

/// Rejection rate over `trials` independent data sets, each run through
/// cost, path, counts and the selected test with inverse-sd weights.
///
/// Trial `t` draws from stream `t` of `seed`, so results do not depend on
/// parallelism and the same seed gives paired data across cost or test
/// choices.
pub fn estimate_power(
    case: &SimCase,
    cost: CostKind,
    test: StatisticKind,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<PowerEstimate> {
    if trials < 50 {
        return param(format!("need at least 50 trials, got {trials}"));
    }
    case.validate()?;
    let ctx = MomentContext::new(case.sizes())?;
    let weights = WeightMatrix::inverse_sd(&ctx)?;
    let minimum = match test {
        StatisticKind::Minimum => Some(MinimumTest::new(&weights, &ctx, alpha)?),
        StatisticKind::WeightedSum => None,
    };
    let rejections = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<usize> {
            let (data, groups) = gen_gaussian_with(case, &mut stream_rng(seed, t as u64))?;
            let analysis = analyze(&data, &groups, cost)?;
            let result = match &minimum {
                Some(m) => m.evaluate(&analysis.table)?,
                None => weighted_sum_test(&analysis.table, &weights, &ctx, alpha)?,
            };
            Ok(usize::from(result.reject))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let power = rejections as f64 / trials as f64;
    Ok(PowerEstimate {
        trials,
        rejections,
        power,
        std_error: (power * (1.0 - power) / trials as f64).sqrt(),
    })
}
