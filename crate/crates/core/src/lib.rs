//! Graph-based nonparametric comparison of `k` high-dimensional samples.
//!
//! Observations are treated as nodes of a complete graph whose edge costs come
//! from one of the [`cost`] families. A greedy heuristic ([`shp`]) builds an
//! approximate shortest Hamiltonian path through all nodes, and the edges of
//! that path are classified by the sample labels of their endpoints
//! ([`counts`]). Under the permutation null every label arrangement along the
//! path is equally likely, so the edge counts have exact closed-form moments
//! ([`moments`]). Two tests are built on top of them ([`inference`]): a
//! weighted sum of between-sample counts, asymptotically normal, and the
//! minimum of weighted centred counts, whose null law is a multivariate normal
//! orthant probability. Standardized counts double as relevance scores between
//! samples or unions of samples ([`relevance`]).
//!
//! ```
//! use relevance_kit::prelude::*;
//!
//! let data = DataMatrix::from_rows(vec![
//!     vec![0.0, 0.1], vec![0.2, 0.0], vec![0.1, 0.2],
//!     vec![5.0, 5.1], vec![5.2, 5.0], vec![5.1, 5.2],
//! ]).unwrap();
//! let groups = GroupAssignment::from_sizes(&[3, 3]).unwrap();
//! let costs = gamma_cost(&data, 2.0).unwrap();
//! let path = approximate_shp(&costs).unwrap();
//! let table = count_edges(&path, &groups).unwrap();
//! assert_eq!(table.get(0, 1), 1);
//! ```

pub mod cli;
pub mod cost;
pub mod counts;
pub mod error;
pub mod inference;
pub mod moments;
pub mod pipeline;
pub mod relevance;
pub mod shp;
pub mod sim;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::cost::{
        average_cost, diff_augmented_cost, gamma_cost, validate_assumptions, CostKind, CostMatrix,
        DataMatrix, DiagnosticReport,
    };
    pub use crate::counts::{count_between_unions, count_edges, EdgeCountTable, GroupAssignment};
    pub use crate::inference::{
        minimum_statistic, minimum_test, permutation_pvalue, weighted_sum_statistic,
        weighted_sum_test, MinimumTest, PairIndexer, StatisticKind, TestMethod, TestResult,
        WeightMatrix,
    };
    pub use crate::moments::MomentContext;
    pub use crate::relevance::{combined_z_score, relevance_report, z_score, RelevanceReport};
    pub use crate::shp::{approximate_shp, brute_force_shp, path_cost, Path};
    pub use crate::{Error, Result};
}
