//! Optimal univariate microaggregation.
//!
//! Given scalar records and a minimum cluster size `k`, find a partition into clusters
//! of at least `k` records that minimizes the total distortion. For the five cost kinds
//! in [`CostKind`] an optimal partition is contiguous in sorted order, so the problem
//! becomes a least-weight subsequence problem over sorted data. This crate solves it with
//! a quadratic reference dynamic program, two `O(kn)` scans and two `O(n)` algorithms
//! built on SMAWK.
//!
//! ```
//! use microagg::{solve, CostKind, SolverOptions};
//!
//! let data = [10.0, 0.0, 11.0, 1.0, 12.0, 2.0];
//! let clustering = solve(&data, 2, CostKind::Sse, &SolverOptions::default()).unwrap();
//! assert_eq!(clustering.labels, vec![1, 0, 1, 0, 1, 0]);
//! assert_eq!(clustering.total_cost, 4.0);
//! ```

pub mod cli;
pub mod cost;
pub mod error;
pub mod oracle;
pub mod smawk;
pub mod solvers;

pub use cost::{AdaptScheme, AdaptedCost, CostCalculator, CostKind, PrefixStore, SortedDataset, SumMode};
pub use error::{Error, Result};
pub use solvers::{solve, solve_sorted, Algorithm, Clustering, ImplicitSolution, SolverOptions};
