//! The weighted-sum and minimum edge-count tests.
//!
//! Both tests reject for small values: samples drawn from different
//! distributions share fewer path edges than chance predicts.

pub mod mvn;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counts::{count_edges, EdgeCountTable, GroupAssignment};
use crate::error::{param, Error, Result};
use crate::moments::{cov_counts, MomentContext};
use crate::shp::Path;
use mvn::{norm_cdf, norm_quantile, Covariance, MvnIntegrator};

/// Bijection between unordered group pairs `i < j` and `0..k(k−1)/2`, in the
/// order `(0,1), (0,2), …, (0,k−1), (1,2), …`.
///
/// This is the 1-based `L(i, j) = j − i + (2k − i)(i − 1)/2` shifted to 0-based
/// groups and indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairIndexer {
    k: usize,
}

impl PairIndexer {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return param(format!("pair indexing needs k ≥ 2, got {k}"));
        }
        Ok(Self { k })
    }

    pub fn len(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> Result<usize> {
        if !(i < j && j < self.k) {
            return param(format!("pair ({i}, {j}) invalid for k = {}", self.k));
        }
        let (i1, j1) = (i + 1, j + 1);
        Ok(j1 - i1 + (2 * self.k - i1) * (i1 - 1) / 2 - 1)
    }

    pub fn pair(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.len() {
            return param(format!("pair index {index} out of range for k = {}", self.k));
        }
        let mut rest = index;
        for i in 0..self.k - 1 {
            let row = self.k - 1 - i;
            if rest < row {
                return Ok((i, i + 1 + rest));
            }
            rest -= row;
        }
        unreachable!()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.k).flat_map(move |i| ((i + 1)..self.k).map(move |j| (i, j)))
    }
}

/// Nonnegative symmetric weights on between-group pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMatrix {
    k: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    /// From a full `k x k` grid; the diagonal is ignored.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if k < 2 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::Shape("weights must form a k x k grid with k ≥ 2".into()));
        }
        let mut w = vec![0.0; k * k];
        for m in 0..k {
            for l in 0..k {
                if m == l {
                    continue;
                }
                let v = rows[m][l];
                if !(v.is_finite() && v >= 0.0) {
                    return param(format!("weight ({m}, {l}) = {v} is not a finite nonnegative value"));
                }
                if (v - rows[l][m]).abs() > 1e-12 * (1.0 + v.abs()) {
                    return param(format!("weights are not symmetric at ({m}, {l})"));
                }
                w[m * k + l] = v;
            }
        }
        let out = Self { k, w };
        out.check_positive()?;
        Ok(out)
    }

    pub fn unit(k: usize) -> Result<Self> {
        Self::from_rows(&vec![vec![1.0; k]; k])
    }

    /// `w[m][l] = Var(S(G_m, G_l))^(−1/2)` under the permutation null.
    pub fn inverse_sd(ctx: &MomentContext) -> Result<Self> {
        let k = ctx.k();
        if k < 2 {
            return param("weights need at least 2 groups");
        }
        let mut w = vec![0.0; k * k];
        for m in 0..k {
            for l in (m + 1)..k {
                let var = ctx.var(m, l)?;
                if var <= 0.0 {
                    return Err(Error::Degenerate(format!(
                        "count between groups {m} and {l} has zero null variance"
                    )));
                }
                w[m * k + l] = var.powf(-0.5);
                w[l * k + m] = w[m * k + l];
            }
        }
        Ok(Self { k, w })
    }

    /// Copy with the listed pairs set to zero.
    pub fn with_zeroed(&self, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut out = self.clone();
        for &(m, l) in pairs {
            if m == l || m >= self.k || l >= self.k {
                return param(format!("cannot zero pair ({m}, {l}) for k = {}", self.k));
            }
            out.w[m * self.k + l] = 0.0;
            out.w[l * self.k + m] = 0.0;
        }
        out.check_positive()?;
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return param("weight scale must be positive");
        }
        Ok(Self { k: self.k, w: self.w.iter().map(|v| v * c).collect() })
    }

    fn check_positive(&self) -> Result<()> {
        if self.w.iter().all(|&v| v <= 0.0) {
            return param("at least one weight must be positive");
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, m: usize, l: usize) -> f64 {
        self.w[m * self.k + l]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.w.chunks(self.k).map(<[f64]>::to_vec).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    WeightedSum,
    Minimum,
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub method: TestMethod,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_sd: Option<f64>,
    pub p_value: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return param(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

fn check_dims(table: &EdgeCountTable, w: &WeightMatrix, ctx: &MomentContext) -> Result<()> {
    if table.k() != w.k() || table.k() != ctx.k() {
        return Err(Error::Shape(format!(
            "count table has k = {}, weights k = {}, sizes k = {}",
            table.k(),
            w.k(),
            ctx.k()
        )));
    }
    Ok(())
}

/// `Σ_{m<l} w[m][l] · S(G_m, G_l)`.
pub fn weighted_sum_statistic(table: &EdgeCountTable, w: &WeightMatrix) -> Result<f64> {
    if table.k() != w.k() {
        return Err(Error::Shape(format!("count table k = {}, weights k = {}", table.k(), w.k())));
    }
    let k = w.k();
    Ok((0..k)
        .flat_map(|m| ((m + 1)..k).map(move |l| (m, l)))
        .map(|(m, l)| w.get(m, l) * table.get(m, l) as f64)
        .sum())
}

/// Null mean and variance of the weighted-sum statistic.
pub fn weighted_sum_null(w: &WeightMatrix, ctx: &MomentContext) -> Result<(f64, f64)> {
    let pairs: Vec<(usize, usize)> = PairIndexer::new(ctx.k())?.pairs().collect();
    let mut mean = 0.0;
    let mut var = 0.0;
    for &p in &pairs {
        let wp = w.get(p.0, p.1);
        if wp == 0.0 {
            continue;
        }
        mean += wp * ctx.mean(p.0, p.1)?;
        for &q in &pairs {
            let wq = w.get(q.0, q.1);
            if wq != 0.0 {
                var += wp * wq * cov_counts(p, q, ctx)?;
            }
        }
    }
    Ok((mean, var))
}

pub fn weighted_sum_test(
    table: &EdgeCountTable,
    w: &WeightMatrix,
    ctx: &MomentContext,
    alpha: f64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_dims(table, w, ctx)?;
    let statistic = weighted_sum_statistic(table, w)?;
    let (mean, var) = weighted_sum_null(w, ctx)?;
    if var.is_nan() || var <= 1e-12 * mean.abs().max(1.0) {
        return Err(Error::Degenerate(format!("weighted sum has null variance {var}")));
    }
    let sd = var.sqrt();
    let critical_value = mean + norm_quantile(alpha) * sd;
    Ok(TestResult {
        method: TestMethod::WeightedSum,
        statistic,
        null_mean: Some(mean),
        null_sd: Some(sd),
        p_value: norm_cdf((statistic - mean) / sd),
        critical_value,
        alpha,
        reject: statistic < critical_value,
    })
}

/// Minimum over positively weighted pairs of `w[m][l] · (S(G_m,G_l) − E S)`.
/// Zero-weight pairs are left out of the minimum.
pub fn minimum_statistic(table: &EdgeCountTable, w: &WeightMatrix, ctx: &MomentContext) -> Result<f64> {
    check_dims(table, w, ctx)?;
    let mut best = f64::INFINITY;
    for (m, l) in PairIndexer::new(ctx.k())?.pairs() {
        let wl = w.get(m, l);
        if wl > 0.0 {
            best = best.min(wl * (table.get(m, l) as f64 - ctx.mean(m, l)?));
        }
    }
    if best == f64::INFINITY {
        return param("all weights are zero");
    }
    Ok(best)
}

/// Full covariance of the between-group counts, indexed by [`PairIndexer`].
pub fn build_sigma(ctx: &MomentContext) -> Result<Covariance> {
    let idx = PairIndexer::new(ctx.k())?;
    let pairs: Vec<_> = idx.pairs().collect();
    let dim = pairs.len();
    let mut values = vec![0.0; dim * dim];
    for a in 0..dim {
        for b in a..dim {
            let c = cov_counts(pairs[a], pairs[b], ctx)?;
            values[a * dim + b] = c;
            values[b * dim + a] = c;
        }
    }
    Covariance::new(dim, values)
}

const BISECTION_TOL: f64 = 1e-6;
const BISECTION_MAX_ITER: usize = 200;

/// Null model of the minimum statistic for fixed weights and group sizes,
/// including its critical value. Reusable across data sets that share sizes.
///
/// `P(min ≤ x) = 1 − P(S_l − E S_l > x / w_l for every active pair l)`, an
/// orthant probability of the reduced count covariance.
#[derive(Debug, Clone)]
pub struct MinimumTest {
    ctx: MomentContext,
    weights: WeightMatrix,
    active: Vec<(usize, usize)>,
    active_weights: Vec<f64>,
    sigma: Covariance,
    alpha: f64,
    critical_value: f64,
    integrator: MvnIntegrator,
}

impl MinimumTest {
    pub fn new(w: &WeightMatrix, ctx: &MomentContext, alpha: f64) -> Result<Self> {
        Self::with_integrator(w, ctx, alpha, MvnIntegrator::default())
    }

    pub fn with_integrator(
        w: &WeightMatrix,
        ctx: &MomentContext,
        alpha: f64,
        integrator: MvnIntegrator,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        if w.k() != ctx.k() {
            return Err(Error::Shape(format!("weights k = {}, sizes k = {}", w.k(), ctx.k())));
        }
        let idx = PairIndexer::new(ctx.k())?;
        let full = build_sigma(ctx)?;
        let mut keep = Vec::new();
        let mut active = Vec::new();
        let mut active_weights = Vec::new();
        for (pos, (m, l)) in idx.pairs().enumerate() {
            if w.get(m, l) > 0.0 {
                keep.push(pos);
                active.push((m, l));
                active_weights.push(w.get(m, l));
            }
        }
        if active.is_empty() {
            return param("all weights are zero");
        }
        let sigma = full.submatrix(&keep);
        if let Some(i) = (0..sigma.dim()).find(|&i| sigma.get(i, i) <= 0.0) {
            return Err(Error::Degenerate(format!(
                "count for pair {:?} has zero null variance",
                active[i]
            )));
        }
        let mut test = Self {
            ctx: ctx.clone(),
            weights: w.clone(),
            active,
            active_weights,
            sigma,
            alpha,
            critical_value: f64::NAN,
            integrator,
        };
        test.critical_value = test.solve_critical_value()?;
        Ok(test)
    }

    /// `P(min ≤ x)` under the asymptotic null.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let thresholds: Vec<f64> = self.active_weights.iter().map(|w| x / w).collect();
        let tail = self.integrator.upper_tail(&self.sigma, &thresholds)?;
        Ok((1.0 - tail.probability).clamp(0.0, 1.0))
    }

    fn solve_critical_value(&self) -> Result<f64> {
        let spread = (0..self.sigma.dim())
            .map(|i| self.active_weights[i] * self.sigma.get(i, i).sqrt())
            .fold(0.0f64, f64::max);
        let g = |z: f64| -> Result<f64> { Ok(self.cdf(z)? - self.alpha) };
        let mut lo = -20.0 * spread;
        let mut hi = 0.0;
        let mut widen = 0;
        while g(lo)? > 0.0 || g(hi)? < 0.0 {
            widen += 1;
            if widen > 20 {
                return Err(Error::Numeric("could not bracket the critical value".into()));
            }
            if g(lo)? > 0.0 {
                lo *= 2.0;
            }
            if g(hi)? < 0.0 {
                hi = if hi == 0.0 { spread } else { hi * 2.0 };
            }
        }
        for _ in 0..BISECTION_MAX_ITER {
            if hi - lo <= BISECTION_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if g(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn critical_value(&self) -> f64 {
        self.critical_value
    }

    /// Pairs entering the minimum, in pair-index order.
    pub fn active_pairs(&self) -> &[(usize, usize)] {
        &self.active
    }

    pub fn sigma(&self) -> &Covariance {
        &self.sigma
    }

    pub fn evaluate(&self, table: &EdgeCountTable) -> Result<TestResult> {
        let statistic = minimum_statistic(table, &self.weights, &self.ctx)?;
        Ok(TestResult {
            method: TestMethod::Minimum,
            statistic,
            null_mean: None,
            null_sd: None,
            p_value: self.cdf(statistic)?,
            critical_value: self.critical_value,
            alpha: self.alpha,
            reject: statistic <= self.critical_value,
        })
    }
}

pub fn minimum_test(
    table: &EdgeCountTable,
    w: &WeightMatrix,
    ctx: &MomentContext,
    alpha: f64,
) -> Result<TestResult> {
    check_dims(table, w, ctx)?;
    MinimumTest::new(w, ctx, alpha)?.evaluate(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    WeightedSum,
    Minimum,
}

/// Monte-Carlo permutation p-value with the path held fixed.
///
/// Replicate `b` shuffles the labels with a ChaCha stream keyed by
/// `(seed, b)`, so the result does not depend on thread count. Returns
/// `(1 + #{replicates ≤ observed}) / (B + 1)`.
pub fn permutation_pvalue(
    path: &Path,
    groups: &GroupAssignment,
    statistic: StatisticKind,
    w: &WeightMatrix,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    if replicates < 100 {
        return param(format!("need at least 100 permutation replicates, got {replicates}"));
    }
    let ctx = MomentContext::new(groups.sizes().to_vec())?;
    let stat = |table: &EdgeCountTable| -> Result<f64> {
        match statistic {
            StatisticKind::WeightedSum => weighted_sum_statistic(table, w),
            StatisticKind::Minimum => minimum_statistic(table, w, &ctx),
        }
    };
    let observed = stat(&count_edges(path, groups)?)?;
    let k = groups.k();
    let along_path: Vec<usize> = path.order().iter().map(|&v| groups.label(v)).collect();
    let hits = (0..replicates)
        .into_par_iter()
        .map(|b| -> Result<usize> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut labels = along_path.clone();
            labels.shuffle(&mut rng);
            let table = EdgeCountTable::from_label_sequence(k, labels);
            Ok(usize::from(stat(&table)? <= observed))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok((1 + hits) as f64 / (replicates + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::enumerate_statistic;

    #[test]
    fn pair_index_formula() {
        let k3 = PairIndexer::new(3).unwrap();
        assert_eq!(k3.index(0, 1).unwrap() + 1, 1);
        assert_eq!(k3.index(0, 2).unwrap() + 1, 2);
        assert_eq!(k3.index(1, 2).unwrap() + 1, 3);
        let k4 = PairIndexer::new(4).unwrap();
        assert_eq!(k4.index(0, 3).unwrap() + 1, 3);
        assert_eq!(k4.index(1, 2).unwrap() + 1, 4);
        assert!(k4.index(2, 2).is_err());
        assert!(k4.index(2, 4).is_err());
        assert!(k4.pair(6).is_err());
    }

    #[test]
    fn pair_index_round_trip() {
        for k in 2..=10 {
            let idx = PairIndexer::new(k).unwrap();
            for (pos, (i, j)) in idx.pairs().enumerate() {
                assert_eq!(idx.index(i, j).unwrap(), pos);
                assert_eq!(idx.pair(pos).unwrap(), (i, j));
            }
            assert_eq!(idx.pairs().count(), k * (k - 1) / 2);
        }
    }

    fn table_2x2(s: u64) -> EdgeCountTable {
        // N = 4 with two groups of 2: path labels chosen to give S(0,1) = s
        let seq: &[usize] = match s {
            1 => &[0, 0, 1, 1],
            2 => &[0, 1, 1, 0],
            3 => &[0, 1, 0, 1],
            _ => unreachable!(),
        };
        EdgeCountTable::from_label_sequence(2, seq.iter().copied())
    }

    #[test]
    fn weighted_sum_small_case() {
        let ctx = MomentContext::new(vec![2, 2]).unwrap();
        let w = WeightMatrix::unit(2).unwrap();
        let r = weighted_sum_test(&table_2x2(1), &w, &ctx, 0.05).unwrap();
        // moments from the six-arrangement enumeration: mean 2, variance 2/3
        let (mean, var) = enumerate_statistic(&[2, 2], |t| t.get(0, 1) as f64).unwrap();
        assert!((r.null_mean.unwrap() - mean).abs() < 1e-12);
        assert!((r.null_sd.unwrap().powi(2) - var).abs() < 1e-12);
        let z = (1.0 - 2.0) / (2.0f64 / 3.0).sqrt();
        assert!((z + 1.224744871391589).abs() < 1e-12);
        assert!((r.p_value - norm_cdf(z)).abs() < 1e-12);
        assert!((r.p_value - 0.1103).abs() < 1e-4);
        assert_eq!(r.statistic, 1.0);
        let at_mean = weighted_sum_test(&table_2x2(2), &w, &ctx, 0.05).unwrap();
        assert!((at_mean.p_value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_weight_statistic() {
        let t = EdgeCountTable::from_label_sequence(3, [0, 1, 2, 1, 0, 2, 2]);
        let w = WeightMatrix::from_rows(&[
            vec![0.0, 0.0, 2.5],
            vec![0.0, 0.0, 0.0],
            vec![2.5, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(weighted_sum_statistic(&t, &w).unwrap(), 2.5 * t.get(0, 2) as f64);
    }

    #[test]
    fn invalid_weights() {
        assert!(WeightMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(WeightMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        let w = WeightMatrix::unit(2).unwrap();
        assert!(w.with_zeroed(&[(0, 1)]).is_err());
        let forced = MomentContext::new(vec![1, 1]).unwrap();
        assert!(matches!(WeightMatrix::inverse_sd(&forced), Err(Error::Degenerate(_))));
    }

    #[test]
    fn degenerate_variance_rejected() {
        let ctx = MomentContext::new(vec![1, 1]).unwrap();
        let t = EdgeCountTable::from_label_sequence(2, [0, 1]);
        let w = WeightMatrix::unit(2).unwrap();
        assert!(matches!(weighted_sum_test(&t, &w, &ctx, 0.05), Err(Error::Degenerate(_))));
        assert!(matches!(minimum_test(&t, &w, &ctx, 0.05), Err(Error::Degenerate(_))));
    }

    #[test]
    fn minimum_statistic_direct_scan() {
        let ctx = MomentContext::new(vec![3, 2, 3]).unwrap();
        let t = EdgeCountTable::from_label_sequence(3, [0, 0, 1, 2, 2, 1, 0, 2]);
        let w = WeightMatrix::inverse_sd(&ctx).unwrap();
        let direct = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(m, l)| w.get(m, l) * (t.get(m, l) as f64 - ctx.mean(m, l).unwrap()))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(minimum_statistic(&t, &w, &ctx).unwrap(), direct);
    }

    #[test]
    fn minimum_at_null_means_is_zero() {
        // sizes (2, 2): mean count 2 and S = 2 for arrangement 0110
        let ctx = MomentContext::new(vec![2, 2]).unwrap();
        let w = WeightMatrix::unit(2).unwrap();
        assert_eq!(minimum_statistic(&table_2x2(2), &w, &ctx).unwrap(), 0.0);
    }

    #[test]
    fn sigma_small_cases() {
        let ctx = MomentContext::new(vec![3, 5]).unwrap();
        let s = build_sigma(&ctx).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.get(0, 0), ctx.var(0, 1).unwrap());
        let ctx = MomentContext::new(vec![1, 1, 1]).unwrap();
        let s = build_sigma(&ctx).unwrap();
        let e = crate::moments::enumerate_null_moments(&[1, 1, 1]).unwrap();
        let pairs = [(0, 1), (0, 2), (1, 2)];
        for a in 0..3 {
            for b in 0..3 {
                assert!((s.get(a, b) - e.covariance(pairs[a], pairs[b])).abs() < 1e-12);
                assert_eq!(s.get(a, b), s.get(b, a));
            }
        }
    }

    #[test]
    fn two_group_tests_agree() {
        let ctx = MomentContext::new(vec![12, 18]).unwrap();
        let w = WeightMatrix::inverse_sd(&ctx).unwrap();
        let minimum = MinimumTest::new(&w, &ctx, 0.05).unwrap();
        let mut labels: Vec<usize> = (0..30).map(|t| usize::from(t >= 12)).collect();
        for s in 0..20 {
            labels.rotate_left(s % 7 + 1);
            labels.swap(s % 30, (s * 11 + 3) % 30);
            let t = EdgeCountTable::from_label_sequence(2, labels.iter().copied());
            let a = weighted_sum_test(&t, &w, &ctx, 0.05).unwrap();
            let b = minimum.evaluate(&t).unwrap();
            assert!((a.p_value - b.p_value).abs() < 1e-3, "{a:?} {b:?}");
            assert_eq!(a.reject, b.reject);
        }
    }

    #[test]
    fn zero_weight_pairs_drop_out() {
        let ctx = MomentContext::new(vec![10, 12, 14]).unwrap();
        let full = WeightMatrix::inverse_sd(&ctx).unwrap();
        let w = full.with_zeroed(&[(0, 1)]).unwrap();
        let test = MinimumTest::new(&w, &ctx, 0.05).unwrap();
        assert_eq!(test.active_pairs(), &[(0, 2), (1, 2)]);
        let sigma = build_sigma(&ctx).unwrap().submatrix(&[1, 2]);
        assert_eq!(test.sigma(), &sigma);
        let mut labels: Vec<usize> = (0..36).map(|t| t % 3).collect();
        labels.sort_unstable();
        labels.swap(3, 20);
        let t = EdgeCountTable::from_label_sequence(3, labels.iter().copied());
        let r = test.evaluate(&t).unwrap();
        let x = r.statistic;
        let thresholds = [x / w.get(0, 2), x / w.get(1, 2)];
        let direct = 1.0 - mvn::mvn_upper_tail(&sigma, &thresholds).unwrap().probability;
        assert!((r.p_value - direct).abs() < 1e-12);
    }

    #[test]
    fn weighted_sum_pvalue_monotone() {
        let ctx = MomentContext::new(vec![5, 6, 7]).unwrap();
        let w = WeightMatrix::inverse_sd(&ctx).unwrap();
        let (mean, var) = weighted_sum_null(&w, &ctx).unwrap();
        let mut last = 0.0;
        for step in 0..50 {
            let x = mean + (step as f64 - 25.0) * 0.2 * var.sqrt();
            let p = norm_cdf((x - mean) / var.sqrt());
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn permutation_extremes() {
        let groups = GroupAssignment::from_sizes(&[10, 10]).unwrap();
        let w = WeightMatrix::unit(2).unwrap();
        let sorted = Path::new((0..20).collect()).unwrap();
        // one between edge: below almost every rearrangement
        let p = permutation_pvalue(&sorted, &groups, StatisticKind::WeightedSum, &w, 500, 3)
            .unwrap();
        assert!(p < 0.01);
        let alternating: Vec<usize> = (0..10).flat_map(|i| [i, i + 10]).collect();
        let p = permutation_pvalue(
            &Path::new(alternating).unwrap(),
            &groups,
            StatisticKind::WeightedSum,
            &w,
            500,
            3,
        )
        .unwrap();
        assert_eq!(p, 1.0);
        assert!(permutation_pvalue(&sorted, &groups, StatisticKind::Minimum, &w, 99, 3).is_err());
    }

    #[test]
    fn permutation_reproducible() {
        let groups = GroupAssignment::new((0..24).map(|t| t % 3).collect()).unwrap();
        let ctx = MomentContext::new(groups.sizes().to_vec()).unwrap();
        let w = WeightMatrix::inverse_sd(&ctx).unwrap();
        let path = Path::new((0..24).rev().collect()).unwrap();
        let a = permutation_pvalue(&path, &groups, StatisticKind::Minimum, &w, 300, 9).unwrap();
        let b = permutation_pvalue(&path, &groups, StatisticKind::Minimum, &w, 300, 9).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0 && a <= 1.0);
    }
}
