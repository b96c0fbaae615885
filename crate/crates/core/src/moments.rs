//! Exact permutation-null moments of path edge counts.
//!
//! Under the permutation null every arrangement of the sample labels along a
//! fixed path is equally likely. The closed forms below give first and second
//! moments of between- and within-group counts for groups of sizes `n1, n2,
//! ...` among `N` nodes, evaluated in factored form so large `N` does not
//! overflow. [`enumerate_null_moments`] computes the same quantities by brute
//! force over all distinct label arrangements.

use serde::Serialize;

use crate::counts::EdgeCountTable;
use crate::error::{param, Error, Result};

/// Group sizes `n_1..n_k` and their total `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentContext {
    sizes: Vec<usize>,
    total: usize,
}

impl MomentContext {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.contains(&0) {
            return param("group sizes must be positive");
        }
        let total: usize = sizes.iter().sum();
        if total < 2 {
            return param(format!("need at least 2 nodes, got {total}"));
        }
        Ok(Self { sizes, total })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, g: usize) -> Result<usize> {
        self.sizes
            .get(g)
            .copied()
            .ok_or_else(|| Error::Parameter(format!("group {g} out of range for k = {}", self.k())))
    }

    pub fn mean(&self, m: usize, l: usize) -> Result<f64> {
        if m == l {
            mean_within(self.size(m)?, self.total)
        } else {
            mean_between(self.size(m)?, self.size(l)?, self.total)
        }
    }

    pub fn var(&self, m: usize, l: usize) -> Result<f64> {
        var_between(self.size(m)?, self.size(l)?, self.total)
    }
}

fn check_one(n1: usize, total: usize) -> Result<()> {
    if n1 == 0 || n1 > total || total < 2 {
        return param(format!("invalid group size {n1} for N = {total}"));
    }
    Ok(())
}

fn check_sizes(sizes: &[usize], total: usize) -> Result<()> {
    let sum: usize = sizes.iter().sum();
    if total < 2 || sizes.contains(&0) || sum > total {
        return param(format!("invalid group sizes {sizes:?} for N = {total}"));
    }
    Ok(())
}

fn f(x: usize) -> f64 {
    x as f64
}

/// `E S(G1, G2) = 2 n1 n2 / N`.
pub fn mean_between(n1: usize, n2: usize, total: usize) -> Result<f64> {
    check_sizes(&[n1, n2], total)?;
    Ok(2.0 * f(n1) * f(n2) / f(total))
}

/// `E S(G1, G1) = n1 (n1 − 1) / N`.
pub fn mean_within(n1: usize, total: usize) -> Result<f64> {
    check_one(n1, total)?;
    Ok(f(n1) * (f(n1) - 1.0) / f(total))
}

pub fn second_moment_between(n1: usize, n2: usize, total: usize) -> Result<f64> {
    check_sizes(&[n1, n2], total)?;
    let (a, b, n) = (f(n1), f(n2), f(total));
    let nn = n * (n - 1.0);
    Ok(2.0 * a * b / n
        + 2.0 * a * b * (a + b - 2.0) / nn
        + 4.0 * a * (a - 1.0) * b * (b - 1.0) / nn)
}

pub fn second_moment_within(n1: usize, total: usize) -> Result<f64> {
    check_one(n1, total)?;
    let (a, n) = (f(n1), f(total));
    let nn = n * (n - 1.0);
    let falling2 = a * (a - 1.0);
    Ok(falling2 / n
        + 2.0 * falling2 * (a - 2.0) / nn
        + falling2 * (a - 2.0) * (a - 3.0) / nn)
}

/// `E{S(G1,G2) S(G3,G4)}` for four distinct groups.
pub fn cross_moment_disjoint(n1: usize, n2: usize, n3: usize, n4: usize, total: usize) -> Result<f64> {
    check_sizes(&[n1, n2, n3, n4], total)?;
    let n = f(total);
    Ok(4.0 * f(n1) * f(n2) * f(n3) * f(n4) / (n * (n - 1.0)))
}

/// `E{S(G1,G2) S(G2,G3)}`; the shared group is the middle argument.
pub fn cross_moment_shared(n1: usize, n2: usize, n3: usize, total: usize) -> Result<f64> {
    check_sizes(&[n1, n2, n3], total)?;
    let n = f(total);
    Ok(2.0 * f(n1) * f(n3) * f(n2) * (2.0 * f(n2) - 1.0) / (n * (n - 1.0)))
}

/// `E{S(G1,G1) S(G2,G2)}`.
pub fn cross_moment_within_pairs(n1: usize, n2: usize, total: usize) -> Result<f64> {
    check_sizes(&[n1, n2], total)?;
    let n = f(total);
    Ok(f(n1) * (f(n1) - 1.0) * f(n2) * (f(n2) - 1.0) / (n * (n - 1.0)))
}

pub fn var_between(n1: usize, n2: usize, total: usize) -> Result<f64> {
    let mean = mean_between(n1, n2, total)?;
    Ok(second_moment_between(n1, n2, total)? - mean * mean)
}

/// Null covariance of `S(G_m1, G_l1)` and `S(G_m2, G_l2)` for between-group
/// pairs. Pair order within and between arguments does not matter.
pub fn cov_counts(pair1: (usize, usize), pair2: (usize, usize), ctx: &MomentContext) -> Result<f64> {
    let canon = |(a, b): (usize, usize)| -> Result<(usize, usize)> {
        if a == b {
            return param(format!("pair ({a}, {b}) is not a between-group pair"));
        }
        ctx.size(a)?;
        ctx.size(b)?;
        Ok((a.min(b), a.max(b)))
    };
    let (p, q) = (canon(pair1)?, canon(pair2)?);
    let n = ctx.total();
    if p == q {
        return var_between(ctx.size(p.0)?, ctx.size(p.1)?, n);
    }
    let product = ctx.mean(p.0, p.1)? * ctx.mean(q.0, q.1)?;
    let shared = [p.0, p.1].into_iter().find(|g| *g == q.0 || *g == q.1);
    let joint = match shared {
        Some(s) => {
            let a = if p.0 == s { p.1 } else { p.0 };
            let b = if q.0 == s { q.1 } else { q.0 };
            cross_moment_shared(ctx.size(a)?, ctx.size(s)?, ctx.size(b)?, n)?
        }
        None => cross_moment_disjoint(
            ctx.size(p.0)?,
            ctx.size(p.1)?,
            ctx.size(q.0)?,
            ctx.size(q.1)?,
            n,
        )?,
    };
    Ok(joint - product)
}

const ENUMERATION_MAX: usize = 8;

/// Exact null moments of every count `S(G_m, G_l)`, `m ≤ l`, obtained by
/// enumerating all distinct label arrangements along a path.
#[derive(Debug, Clone)]
pub struct NullMoments {
    k: usize,
    arrangements: usize,
    pairs: Vec<(usize, usize)>,
    means: Vec<f64>,
    products: Vec<f64>,
}

impl NullMoments {
    pub fn arrangements(&self) -> usize {
        self.arrangements
    }

    fn index(&self, m: usize, l: usize) -> usize {
        let (m, l) = (m.min(l), m.max(l));
        self.pairs.iter().position(|&p| p == (m, l)).expect("group out of range")
    }

    pub fn mean(&self, m: usize, l: usize) -> f64 {
        self.means[self.index(m, l)]
    }

    /// `E{S(a) S(b)}` for two (possibly within-group) pairs.
    pub fn product(&self, a: (usize, usize), b: (usize, usize)) -> f64 {
        let p = self.pairs.len();
        self.products[self.index(a.0, a.1) * p + self.index(b.0, b.1)]
    }

    pub fn covariance(&self, a: (usize, usize), b: (usize, usize)) -> f64 {
        self.product(a, b) - self.mean(a.0, a.1) * self.mean(b.0, b.1)
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

fn next_multiset_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Calls `visit` with the count table of every distinct label arrangement of
/// the given group sizes, for `N ≤ 8`. Returns the number of arrangements.
pub fn for_each_arrangement(sizes: &[usize], mut visit: impl FnMut(&EdgeCountTable)) -> Result<usize> {
    let total: usize = sizes.iter().sum();
    if total > ENUMERATION_MAX {
        return Err(Error::Size(format!("enumeration is limited to N ≤ {ENUMERATION_MAX}, got {total}")));
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return param("group sizes must be positive");
    }
    let k = sizes.len();
    let mut labels: Vec<usize> =
        sizes.iter().enumerate().flat_map(|(g, &n)| std::iter::repeat_n(g, n)).collect();
    let mut count = 0;
    loop {
        visit(&EdgeCountTable::from_label_sequence(k, labels.iter().copied()));
        count += 1;
        if !next_multiset_permutation(&mut labels) {
            break;
        }
    }
    Ok(count)
}

pub fn enumerate_null_moments(sizes: &[usize]) -> Result<NullMoments> {
    let k = sizes.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|m| (m..k).map(move |l| (m, l))).collect();
    let p = pairs.len();
    let mut means = vec![0.0; p];
    let mut products = vec![0.0; p * p];
    let arrangements = for_each_arrangement(sizes, |t| {
        for (a, &(m1, l1)) in pairs.iter().enumerate() {
            let s1 = t.get(m1, l1) as f64;
            means[a] += s1;
            for (b, &(m2, l2)) in pairs.iter().enumerate() {
                products[a * p + b] += s1 * t.get(m2, l2) as f64;
            }
        }
    })?;
    let denom = arrangements as f64;
    means.iter_mut().chain(products.iter_mut()).for_each(|v| *v /= denom);
    Ok(NullMoments { k, arrangements, pairs, means, products })
}

/// Exact null mean and variance of an arbitrary statistic of the count table.
pub fn enumerate_statistic(sizes: &[usize], stat: impl Fn(&EdgeCountTable) -> f64) -> Result<(f64, f64)> {
    let mut values = Vec::new();
    for_each_arrangement(sizes, |t| values.push(stat(t)))?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < TOL
    }

    #[test]
    fn two_by_two_by_hand() {
        assert!(close(mean_between(2, 2, 4).unwrap(), 2.0));
        assert!(close(second_moment_between(2, 2, 4).unwrap(), 14.0 / 3.0));
        assert!(close(var_between(2, 2, 4).unwrap(), 2.0 / 3.0));
        let e = enumerate_null_moments(&[2, 2]).unwrap();
        assert_eq!(e.arrangements(), 6);
        assert!(close(e.mean(0, 1), 2.0));
        assert!(close(e.product((0, 1), (0, 1)), 14.0 / 3.0));
        assert!(close(mean_within(2, 4).unwrap(), 0.5));
        assert!(close(e.mean(0, 0), 0.5));
    }

    #[test]
    fn forced_cases() {
        assert!(close(mean_between(1, 1, 2).unwrap(), 1.0));
        assert!(close(second_moment_between(1, 1, 2).unwrap(), 1.0));
        assert_eq!(var_between(1, 1, 2).unwrap(), 0.0);
        assert!(close(mean_within(5, 5).unwrap(), 4.0));
        assert_eq!(mean_within(1, 5).unwrap(), 0.0);
        assert_eq!(second_moment_within(1, 6).unwrap(), 0.0);
        assert!(close(second_moment_within(7, 7).unwrap(), 36.0));
        assert_eq!(cross_moment_within_pairs(1, 3, 5).unwrap(), 0.0);
    }

    #[test]
    fn small_cross_moments() {
        assert!(close(cross_moment_disjoint(1, 1, 1, 1, 4).unwrap(), 1.0 / 3.0));
        assert!(close(cross_moment_shared(1, 1, 1, 3).unwrap(), 1.0 / 3.0));
        assert!(close(cross_moment_within_pairs(2, 2, 4).unwrap(), 1.0 / 3.0));
        let ctx = MomentContext::new(vec![1, 1, 1, 1]).unwrap();
        assert!(close(cov_counts((0, 1), (2, 3), &ctx).unwrap(), 1.0 / 12.0));
    }

    #[test]
    fn invalid_sizes_rejected() {
        assert!(mean_between(0, 2, 4).is_err());
        assert!(mean_between(3, 2, 4).is_err());
        assert!(mean_within(5, 4).is_err());
        assert!(cross_moment_disjoint(1, 1, 0, 1, 4).is_err());
        assert!(MomentContext::new(vec![1]).is_err());
        assert!(MomentContext::new(vec![2, 0]).is_err());
        let ctx = MomentContext::new(vec![2, 2]).unwrap();
        assert!(cov_counts((0, 0), (0, 1), &ctx).is_err());
        assert!(cov_counts((0, 2), (0, 1), &ctx).is_err());
        assert!(matches!(enumerate_null_moments(&[5, 4]), Err(Error::Size(_))));
    }

    #[test]
    fn shared_identity() {
        for (a, s, b, n) in [(2, 3, 2, 7), (1, 4, 2, 9), (5, 2, 3, 12)] {
            let lhs = 2.0 * cross_moment_shared(a, s, b, n).unwrap();
            let rhs = second_moment_between(a + b, s, n).unwrap()
                - second_moment_between(a, s, n).unwrap()
                - second_moment_between(b, s, n).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn single_group_enumeration() {
        let e = enumerate_null_moments(&[6]).unwrap();
        assert_eq!(e.arrangements(), 1);
        assert!(close(e.mean(0, 0), 5.0));
        assert!(close(e.covariance((0, 0), (0, 0)), 0.0));
        let e = enumerate_null_moments(&[1, 4]).unwrap();
        assert!(close(e.mean(0, 1), 1.6));
    }

    #[test]
    fn cov_counts_symmetric_and_canonical() {
        let ctx = MomentContext::new(vec![3, 2, 4, 1]).unwrap();
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for &p in &pairs {
            for &q in &pairs {
                let a = cov_counts(p, q, &ctx).unwrap();
                assert_eq!(a, cov_counts(q, p, &ctx).unwrap());
                assert_eq!(a, cov_counts((p.1, p.0), (q.1, q.0), &ctx).unwrap());
            }
        }
    }

    #[test]
    fn variance_nonnegative_up_to_large_n() {
        let n = 10_000;
        for n1 in (1..n).step_by(97).chain([1, 2, n / 2, n - 1]) {
            for n2 in [1, 2, 3, 50, 999, n - n1].into_iter().filter(|&b| b >= 1 && n1 + b <= n) {
                let v = var_between(n1, n2, n).unwrap();
                assert!(v >= 0.0 && v.is_finite(), "n1={n1} n2={n2} v={v}");
            }
        }
    }
}
