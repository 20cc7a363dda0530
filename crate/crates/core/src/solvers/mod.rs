//! Least-weight-subsequence solvers for univariate microaggregation.
//!
//! Every solver fills the same dynamic program over sorted data: `min_cost[j]` is the
//! cheapest clustering of the first `j` points and `argmin[j - 1]` the start of its last
//! cluster. They differ only in which candidates they look at.
//!
//! | solver              | candidates per column              | time      |
//! |---------------------|------------------------------------|-----------|
//! | [`solve_classic_n2`]  | all `i <= j - k`                 | `O(n^2)`  |
//! | [`solve_simple`]      | `j - 2k + 1 <= i <= j - k`       | `O(kn)`   |
//! | [`solve_simple_plus`] | as simple, clamped by the previous argmin | `O(kn)` |
//! | [`solve_staggered`]   | SMAWK on diagonal `k`-blocks     | `O(n)`    |
//! | [`solve_wilber`]      | SMAWK with guess and recovery    | `O(n)`    |

mod scan;
mod staggered;
mod wilber;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::cost::{AdaptedCost, CostCalculator, CostKind, SortedDataset, SumMode};
use crate::error::{Error, Result};

pub use scan::{solve_classic_n2, solve_simple, solve_simple_plus};
pub use staggered::solve_staggered;
pub use wilber::solve_wilber;

/// Default `k` from which [`Algorithm::Auto`] prefers the linear-time staggered solver.
pub const K_SWITCH: usize = 256;

/// Dynamic program state after a solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitSolution {
    /// `argmin[j - 1]` is the split index `i` of the last cluster of the first `j` points.
    pub argmin: Vec<usize>,
    /// `min_cost[j]`, forbidden for prefixes no valid clustering reaches. After rebasing
    /// the finite entries are only meaningful relative to each other.
    pub min_cost: Vec<AdaptedCost>,
    /// Whether stored totals were shifted during the run.
    pub rebased: bool,
    /// Number of adapted-cost evaluations performed.
    pub evaluations: u64,
}

impl ImplicitSolution {
    /// Zero-cost single cluster, the answer for `n <= 2k - 1`.
    pub fn single_cluster(n: usize) -> Self {
        Self {
            argmin: vec![0; n],
            min_cost: vec![AdaptedCost::ZERO; n + 1],
            rebased: false,
            evaluations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.argmin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.argmin.is_empty()
    }

    /// Cluster boundaries `[start, end)` in sorted order, left to right.
    pub fn boundaries(&self) -> Result<Vec<(usize, usize)>> {
        let labels = backtrack(&self.argmin)?;
        Ok(boundaries_from_labels(&labels))
    }
}

/// Which dynamic program to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// `SimplePlus` for `k < k_switch`, otherwise `Staggered`.
    #[default]
    Auto,
    ClassicN2,
    Simple,
    SimplePlus,
    Staggered,
    Wilber,
}

impl Algorithm {
    pub const CONCRETE: [Algorithm; 5] = [
        Algorithm::ClassicN2,
        Algorithm::Simple,
        Algorithm::SimplePlus,
        Algorithm::Staggered,
        Algorithm::Wilber,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::ClassicN2 => "classic",
            Algorithm::Simple => "simple",
            Algorithm::SimplePlus => "simple+",
            Algorithm::Staggered => "staggered",
            Algorithm::Wilber => "wilber",
        }
    }

    /// Whether the solver only considers clusters of `k` to `2k - 1` points.
    pub fn is_size_restricted(self) -> bool {
        matches!(
            self,
            Algorithm::Simple | Algorithm::SimplePlus | Algorithm::Staggered
        )
    }

    pub fn resolve(self, k: usize, k_switch: usize) -> Algorithm {
        match self {
            Algorithm::Auto if k < k_switch => Algorithm::SimplePlus,
            Algorithm::Auto => Algorithm::Staggered,
            other => other,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Algorithm::Auto),
            "classic" | "classic-n2" | "n2" => Ok(Algorithm::ClassicN2),
            "simple" => Ok(Algorithm::Simple),
            "simple+" | "simple-plus" | "simpleplus" => Ok(Algorithm::SimplePlus),
            "staggered" => Ok(Algorithm::Staggered),
            "wilber" => Ok(Algorithm::Wilber),
            other => Err(Error::Argument(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    pub algorithm: Algorithm,
    pub sum_mode: SumMode,
    /// Periodically subtract the smallest live total from the stored totals.
    pub rebase: bool,
    /// Threshold used by [`Algorithm::Auto`].
    pub k_switch: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Auto,
            sum_mode: SumMode::FullPrefix,
            rebase: false,
            k_switch: K_SWITCH,
        }
    }
}

impl SolverOptions {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }
}

/// Non-fatal conditions attached to a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Warning {
    /// Fewer than `k` points: no clustering satisfies the size constraint, so everything
    /// went into a single cluster.
    ConstraintUnsatisfiable,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ConstraintUnsatisfiable => {
                f.write_str("constraint unsatisfiable, single cluster")
            }
        }
    }
}

/// An explicit clustering.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Cluster id per record in input order; ids grow with the values, starting at 0.
    pub labels: Vec<usize>,
    /// `[start, end)` of each cluster in sorted order.
    pub boundaries: Vec<(usize, usize)>,
    pub representatives: Vec<f64>,
    /// Sum of the true cluster costs, evaluated directly on the final clusters.
    pub total_cost: f64,
    pub algorithm_used: Algorithm,
    pub cost_kind: CostKind,
    pub k: usize,
    pub warning: Option<Warning>,
}

impl Clustering {
    pub fn num_clusters(&self) -> usize {
        self.boundaries.len()
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundaries.iter().map(|(a, b)| b - a)
    }
}

/// Sorts `data`, runs the selected solver and decodes the result.
pub fn solve(data: &[f64], k: usize, kind: CostKind, opts: &SolverOptions) -> Result<Clustering> {
    solve_sorted(SortedDataset::from_unsorted(data)?, k, kind, opts)
}

/// As [`solve`], for data that has already been sorted. Labels refer to the order of
/// the data as given to [`SortedDataset::from_unsorted`].
pub fn solve_sorted(sorted: SortedDataset, k: usize, kind: CostKind, opts: &SolverOptions) -> Result<Clustering> {
    if sorted.is_empty() {
        return Err(Error::Argument("empty input".into()));
    }
    if k < 1 {
        return Err(Error::Argument("minimum cluster size k must be at least 1".into()));
    }
    let algorithm = opts.algorithm.resolve(k, opts.k_switch);
    if !algorithm.is_size_restricted() {
        if opts.sum_mode == SumMode::PartialPrefix {
            return Err(Error::Config(format!(
                "partial prefix sums only answer windows up to 2k-1 points; `{algorithm}` needs wider windows"
            )));
        }
        if opts.rebase {
            return Err(Error::Config(format!(
                "rebasing needs a size-restricted solver, not `{algorithm}`"
            )));
        }
    }
    let calc = CostCalculator::new(sorted, k, kind, opts.sum_mode)?;
    let n = calc.len();

    let implicit = if n < 2 * k {
        ImplicitSolution::single_cluster(n)
    } else {
        let sol = match algorithm {
            Algorithm::ClassicN2 => solve_classic_n2(&calc)?,
            Algorithm::Simple => solve_simple(&calc, opts.rebase)?,
            Algorithm::SimplePlus => solve_simple_plus(&calc, opts.rebase)?,
            Algorithm::Staggered => solve_staggered(&calc, opts.rebase)?,
            Algorithm::Wilber => solve_wilber(&calc)?,
            Algorithm::Auto => unreachable!("resolved above"),
        };
        if !sol.min_cost[n].is_finite() {
            return Err(Error::Invariant(format!(
                "no feasible clustering found for n = {n}, k = {k}"
            )));
        }
        sol
    };
    finish(&calc, &implicit, algorithm)
}

/// Turns a solver result into labels in input order, representatives and the recomputed
/// total cost.
pub fn finish(calc: &CostCalculator, implicit: &ImplicitSolution, algorithm: Algorithm) -> Result<Clustering> {
    let sorted_labels = backtrack(&implicit.argmin)?;
    let boundaries = boundaries_from_labels(&sorted_labels);
    let values = calc.values();
    let kind = calc.kind();
    let mut representatives = Vec::with_capacity(boundaries.len());
    let mut total_cost = 0.0;
    for &(a, b) in &boundaries {
        representatives.push(calc.representative(a, b)?);
        total_cost += kind.direct_cost(&values[a..b]);
    }
    let mut labels = vec![0; sorted_labels.len()];
    for (t, &p) in calc.data().perm().iter().enumerate() {
        labels[p] = sorted_labels[t];
    }
    let warning = (calc.len() < calc.k()).then_some(Warning::ConstraintUnsatisfiable);
    Ok(Clustering {
        labels,
        boundaries,
        representatives,
        total_cost,
        algorithm_used: algorithm,
        cost_kind: kind,
        k: calc.k(),
        warning,
    })
}

/// Decodes an implicit cluster array into labels in sorted order.
///
/// Walks `p = n, argmin[p-1], ...` down to 0 numbering clusters from the right, then
/// flips the numbering so the leftmost cluster is 0.
pub fn backtrack(argmin: &[usize]) -> Result<Vec<usize>> {
    let n = argmin.len();
    let mut out = vec![0; n];
    if n == 0 {
        return Ok(out);
    }
    let mut p = n;
    let mut clusters = 0;
    loop {
        let start = argmin[p - 1];
        if start >= p {
            return Err(Error::Invariant(format!(
                "argmin[{}] = {start} does not precede position {p}",
                p - 1
            )));
        }
        clusters += 1;
        if clusters > n {
            return Err(Error::Invariant("argmin chain does not terminate".into()));
        }
        out[start..p].fill(clusters);
        p = start;
        if p == 0 {
            break;
        }
    }
    for label in &mut out {
        *label = clusters - *label;
    }
    Ok(out)
}

/// `[start, end)` runs of equal labels.
pub fn boundaries_from_labels(labels: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for t in 1..=labels.len() {
        if t == labels.len() || labels[t] != labels[start] {
            out.push((start, t));
            start = t;
        }
    }
    out
}

/// Subtracts the smallest finite total in `live` from every finite entry in `live`.
///
/// Every later column compares candidates drawn from `live` only, so the choice of
/// argmins is unaffected. Returns the amount subtracted.
pub fn rebase_min_costs(min_cost: &mut [AdaptedCost], live: Range<usize>) -> f64 {
    let floor = min_cost[live.clone()]
        .iter()
        .filter_map(|c| c.finite())
        .fold(f64::INFINITY, f64::min);
    if !floor.is_finite() || floor == 0.0 {
        return 0.0;
    }
    for c in &mut min_cost[live] {
        if let AdaptedCost::Finite(v) = c {
            *v -= floor;
        }
    }
    floor
}

fn require_restricted_input(calc: &CostCalculator, name: &str) -> Result<()> {
    let (n, k) = (calc.len(), calc.k());
    if n < 2 * k {
        return Err(Error::Precondition(format!(
            "{name} needs n >= 2k (n = {n}, k = {k})"
        )));
    }
    Ok(())
}

fn require_unrestricted_input(calc: &CostCalculator, name: &str) -> Result<()> {
    let (n, k) = (calc.len(), calc.k());
    if n < k {
        return Err(Error::Precondition(format!(
            "{name} needs n >= k (n = {n}, k = {k})"
        )));
    }
    if calc.mode() == SumMode::PartialPrefix {
        return Err(Error::Config(format!(
            "{name} evaluates windows wider than 2k-1 points; partial prefix sums cannot"
        )));
    }
    Ok(())
}
