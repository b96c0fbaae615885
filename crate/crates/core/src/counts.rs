//! Classification of path edges by the sample labels of their endpoints.
//!
//! Group ids are dense and 0-based throughout the library: `labels[t]` is in
//! `0..k` for every node `t`.

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::shp::Path;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAssignment {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl GroupAssignment {
    /// Every id in `0..k` must occur at least once, where `k` is one more
    /// than the largest label.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0; k];
        for &g in &labels {
            sizes[g] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Data(format!("group {empty} has no members")));
        }
        if labels.is_empty() {
            return Err(Error::Data("no observations".into()));
        }
        Ok(Self { labels, sizes })
    }

    /// Consecutive blocks: the first `sizes[0]` nodes form group 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(g, &n)| std::iter::repeat_n(g, n))
            .collect();
        if sizes.contains(&0) {
            return param("group sizes must be positive");
        }
        Self::new(labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, t: usize) -> usize {
        self.labels[t]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Relabels into two pseudo-groups, `∪a1 → 0` and `∪a2 → 1`; any group in
    /// neither set goes to a third pseudo-group `2`.
    pub fn merged(&self, a1: &[usize], a2: &[usize]) -> Result<Self> {
        check_disjoint_subsets(a1, a2, self.k())?;
        let map: Vec<usize> = (0..self.k())
            .map(|g| {
                if a1.contains(&g) {
                    0
                } else if a2.contains(&g) {
                    1
                } else {
                    2
                }
            })
            .collect();
        Self::new(self.labels.iter().map(|&g| map[g]).collect())
    }
}

pub(crate) fn check_disjoint_subsets(a1: &[usize], a2: &[usize], k: usize) -> Result<()> {
    if a1.is_empty() || a2.is_empty() {
        return param("group subsets must be nonempty");
    }
    if let Some(&g) = a1.iter().chain(a2).find(|&&g| g >= k) {
        return param(format!("group {g} out of range for k = {k}"));
    }
    if let Some(&g) = a1.iter().find(|g| a2.contains(g)) {
        return param(format!("group {g} appears in both subsets"));
    }
    Ok(())
}

/// Symmetric `k x k` table of edge counts; the diagonal holds within-group
/// counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCountTable {
    k: usize,
    counts: Vec<u64>,
}

impl EdgeCountTable {
    pub fn new(k: usize) -> Self {
        Self { k, counts: vec![0; k * k] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, m: usize, l: usize) -> u64 {
        self.counts[m * self.k + l]
    }

    fn bump(&mut self, m: usize, l: usize) {
        self.counts[m * self.k + l] += 1;
        if m != l {
            self.counts[l * self.k + m] += 1;
        }
    }

    /// Sum over unordered pairs `m ≤ l`; equals `N − 1` for a counted path.
    pub fn total(&self) -> u64 {
        (0..self.k).flat_map(|m| (m..self.k).map(move |l| (m, l))).map(|(m, l)| self.get(m, l)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.k).map(<[u64]>::to_vec).collect()
    }

    /// Count table from a label sequence read along a path.
    pub(crate) fn from_label_sequence(k: usize, seq: impl IntoIterator<Item = usize>) -> Self {
        let mut table = Self::new(k);
        let mut prev = None;
        for g in seq {
            if let Some(p) = prev {
                table.bump(p, g);
            }
            prev = Some(g);
        }
        table
    }
}

pub fn count_edges(path: &Path, groups: &GroupAssignment) -> Result<EdgeCountTable> {
    if path.len() != groups.n() {
        return Err(Error::Shape(format!(
            "path over {} nodes, groups over {}",
            path.len(),
            groups.n()
        )));
    }
    Ok(EdgeCountTable::from_label_sequence(
        groups.k(),
        path.order().iter().map(|&v| groups.label(v)),
    ))
}

/// `S(∪a1, ∪a2)`, summed from the pairwise table by additivity.
pub fn count_between_unions(
    path: &Path,
    groups: &GroupAssignment,
    a1: &[usize],
    a2: &[usize],
) -> Result<u64> {
    check_disjoint_subsets(a1, a2, groups.k())?;
    let table = count_edges(path, groups)?;
    Ok(a1.iter().flat_map(|&m| a2.iter().map(move |&l| (m, l))).map(|(m, l)| table.get(m, l)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Nodes 1..8 shifted to 0..8, four subsamples of two.
    fn path_fixture() -> (Path, GroupAssignment) {
        let path = Path::new([2, 3, 4, 1, 5, 7, 8, 6].iter().map(|v| v - 1).collect()).unwrap();
        let groups = GroupAssignment::from_sizes(&[2, 2, 2, 2]).unwrap();
        (path, groups)
    }

    #[test]
    fn fixture_subsample_counts() {
        let (path, groups) = path_fixture();
        let t = count_edges(&path, &groups).unwrap();
        let (xa, xb, ya, yb) = (0, 1, 2, 3);
        assert_eq!(t.get(xa, xb), 2);
        assert_eq!(t.get(xa, ya), 1);
        assert_eq!(t.get(xa, yb), 0);
        assert_eq!(t.get(xb, ya), 0);
        assert_eq!(t.get(xb, yb), 0);
        assert_eq!(t.get(ya, yb), 2);
        assert_eq!(t.total(), 7);
    }

    #[test]
    fn fixture_two_groups() {
        let (path, _) = path_fixture();
        let groups = GroupAssignment::from_sizes(&[4, 4]).unwrap();
        assert_eq!(count_edges(&path, &groups).unwrap().get(0, 1), 1);
        let sub = GroupAssignment::from_sizes(&[2, 2, 2, 2]).unwrap();
        assert_eq!(count_between_unions(&path, &sub, &[0, 1], &[2, 3]).unwrap(), 1);
    }

    #[test]
    fn single_group_all_within() {
        let path = Path::new(vec![3, 1, 0, 2, 4]).unwrap();
        let groups = GroupAssignment::new(vec![0; 5]).unwrap();
        let t = count_edges(&path, &groups).unwrap();
        assert_eq!(t.get(0, 0), 4);
    }

    #[test]
    fn invalid_inputs() {
        assert!(GroupAssignment::new(vec![0, 2, 2]).is_err());
        let path = Path::new(vec![0, 1, 2]).unwrap();
        let groups = GroupAssignment::from_sizes(&[2, 2]).unwrap();
        assert!(matches!(count_edges(&path, &groups), Err(Error::Shape(_))));
        let g3 = GroupAssignment::from_sizes(&[1, 1, 1]).unwrap();
        assert!(matches!(count_between_unions(&path, &g3, &[0], &[0, 1]), Err(Error::Parameter(_))));
        assert!(matches!(count_between_unions(&path, &g3, &[], &[1]), Err(Error::Parameter(_))));
        assert!(matches!(count_between_unions(&path, &g3, &[0], &[3]), Err(Error::Parameter(_))));
    }

    fn instance() -> impl Strategy<Value = (Path, GroupAssignment)> {
        (2usize..30, 2usize..5).prop_flat_map(|(n, k)| {
            let labels = prop::collection::vec(0..k, n);
            let order = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            (labels, order).prop_filter_map("every group present", move |(mut labels, order)| {
                // force every id to appear
                for g in 0..k.min(n) {
                    labels[g] = g;
                }
                let groups = GroupAssignment::new(labels).ok()?;
                Some((Path::new(order).unwrap(), groups))
            })
        })
    }

    proptest! {
        #[test]
        fn symmetric_and_complete((path, groups) in instance()) {
            let t = count_edges(&path, &groups).unwrap();
            prop_assert_eq!(t.total(), (groups.n() - 1) as u64);
            for m in 0..t.k() {
                for l in 0..t.k() {
                    prop_assert_eq!(t.get(m, l), t.get(l, m));
                }
            }
            prop_assert_eq!(count_edges(&path.reversed(), &groups).unwrap(), t);
        }

        #[test]
        fn union_matches_relabelled_recount((path, groups) in instance()) {
            prop_assume!(groups.k() >= 3);
            let t = count_edges(&path, &groups).unwrap();
            let via_sum = count_between_unions(&path, &groups, &[0, 1], &[2]).unwrap();
            prop_assert_eq!(via_sum, t.get(0, 2) + t.get(1, 2));
            let merged = groups.merged(&[0, 1], &[2]).unwrap();
            prop_assert_eq!(count_edges(&path, &merged).unwrap().get(0, 1), via_sum);
        }

        #[test]
        fn covering_union_is_complement_of_within((path, groups) in instance()) {
            let k = groups.k();
            let split = 1 + (path.order()[0] % (k - 1));
            let a1: Vec<usize> = (0..split).collect();
            let a2: Vec<usize> = (split..k).collect();
            let between = count_between_unions(&path, &groups, &a1, &a2).unwrap();
            let merged = count_edges(&path, &groups.merged(&a1, &a2).unwrap()).unwrap();
            let within = merged.get(0, 0) + merged.get(1, 1);
            prop_assert_eq!(between, (groups.n() as u64 - 1) - within);
        }
    }
}
