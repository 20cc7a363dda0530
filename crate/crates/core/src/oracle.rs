//! Brute-force references.
//!
//! Costs here are evaluated straight from their definitions on explicit multisets and
//! share no code with [`crate::cost`]. The enumerations are exponential and guarded by
//! small size caps.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::cost::CostKind;
use crate::error::{Error, Result};
use crate::solvers::{solve, Algorithm, SolverOptions};

/// Largest input for [`exhaustive_ordered`].
pub const MAX_ORDERED_N: usize = 20;
/// Largest input for [`exhaustive_all_partitions`].
pub const MAX_ALL_PARTITIONS_N: usize = 10;

/// Cost functions known to the oracle: the five supported kinds plus four that are not
/// ordered minimizable and only serve as counterexamples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtendedKind {
    Member(CostKind),
    /// Mean absolute deviation from the median.
    Mae,
    /// Square root of the sum of squared deviations.
    L2,
    /// Mean distance to the cluster maximum.
    MeanRoundUp,
    /// Mean distance to the cluster minimum.
    MeanRoundDown,
}

impl From<CostKind> for ExtendedKind {
    fn from(kind: CostKind) -> Self {
        ExtendedKind::Member(kind)
    }
}

impl fmt::Display for ExtendedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedKind::Member(kind) => write!(f, "{kind}"),
            ExtendedKind::Mae => f.write_str("mae"),
            ExtendedKind::L2 => f.write_str("l2"),
            ExtendedKind::MeanRoundUp => f.write_str("mean-roundup"),
            ExtendedKind::MeanRoundDown => f.write_str("mean-rounddown"),
        }
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / 2.0
    }
}

fn max(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Cost of one cluster, by definition.
pub fn cluster_cost(kind: ExtendedKind, x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let sse = |x: &[f64]| {
        let m = mean(x);
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    };
    let sae = |x: &[f64]| {
        let m = median(x);
        x.iter().map(|v| (v - m).abs()).sum::<f64>()
    };
    let up = |x: &[f64]| {
        let top = max(x);
        x.iter().map(|v| (v - top).abs()).sum::<f64>()
    };
    let down = |x: &[f64]| {
        let bottom = min(x);
        x.iter().map(|v| (v - bottom).abs()).sum::<f64>()
    };
    let len = x.len() as f64;
    match kind {
        ExtendedKind::Member(CostKind::Sse) => sse(x),
        ExtendedKind::Member(CostKind::Sae) => sae(x),
        ExtendedKind::Member(CostKind::MaxDist) => {
            let mid = (max(x) + min(x)) / 2.0;
            x.iter().map(|v| (v - mid).abs()).fold(0.0, f64::max)
        }
        ExtendedKind::Member(CostKind::RoundUp) => up(x),
        ExtendedKind::Member(CostKind::RoundDown) => down(x),
        ExtendedKind::Mae => sae(x) / len,
        ExtendedKind::L2 => sse(x).sqrt(),
        ExtendedKind::MeanRoundUp => up(x) / len,
        ExtendedKind::MeanRoundDown => down(x) / len,
    }
}

/// Sum of cluster costs.
pub fn partition_cost(kind: ExtendedKind, partition: &[Vec<f64>]) -> f64 {
    partition.iter().map(|c| cluster_cost(kind, c)).sum()
}

/// Which partitions an enumeration admits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub min_size: usize,
    pub max_size: Option<usize>,
    /// Required multiset of cluster sizes, if any.
    pub profile: Option<Vec<usize>>,
}

impl Constraint {
    /// Clusters of at least `min(k, n)` points, optionally at most `2k - 1`.
    pub fn min_size(k: usize, n: usize, enforce_max: bool) -> Self {
        let max_size = (enforce_max && n >= 2 * k).then(|| 2 * k - 1);
        Self {
            min_size: k.min(n).max(1),
            max_size,
            profile: None,
        }
    }

    /// Exactly the given cluster sizes.
    pub fn profile(sizes: &[usize]) -> Self {
        let mut sizes = sizes.to_vec();
        sizes.sort_unstable();
        Self {
            min_size: 1,
            max_size: None,
            profile: Some(sizes),
        }
    }

    fn admits(&self, sizes: &[usize]) -> bool {
        if sizes.iter().any(|&s| s < self.min_size) {
            return false;
        }
        if let Some(m) = self.max_size {
            if sizes.iter().any(|&s| s > m) {
                return false;
            }
        }
        if let Some(profile) = &self.profile {
            let mut s = sizes.to_vec();
            s.sort_unstable();
            return &s == profile;
        }
        true
    }
}

/// Best partition found by an enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub min_cost: f64,
    /// One optimal partition; clusters hold the values themselves.
    pub witness: Vec<Vec<f64>>,
    /// Number of admissible partitions evaluated.
    pub enumerated_count: u64,
}

fn sorted_copy(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Argument("NaN in oracle input".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Optimum over contiguous partitions of the sorted values with cluster sizes
/// `>= min(k, n)`, and `<= 2k - 1` when `enforce_max` is set and `n >= 2k`.
pub fn exhaustive_ordered(
    values: &[f64],
    k: usize,
    kind: impl Into<ExtendedKind>,
    enforce_max: bool,
) -> Result<OracleResult> {
    let n = values.len();
    if k < 1 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    ordered_with(values, kind.into(), &Constraint::min_size(k, n, enforce_max))
}

/// Optimum over contiguous partitions of the sorted values admitted by `constraint`.
pub fn ordered_with(values: &[f64], kind: ExtendedKind, constraint: &Constraint) -> Result<OracleResult> {
    let n = values.len();
    if n == 0 || n > MAX_ORDERED_N {
        return Err(Error::Argument(format!(
            "ordered enumeration needs 1 <= n <= {MAX_ORDERED_N}, got {n}"
        )));
    }
    let v = sorted_copy(values)?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut count = 0u64;
    let mut cuts = Vec::new();
    // Every composition of n is a subset of the n - 1 interior cut points.
    for mask in 0u32..(1 << (n - 1)) {
        cuts.clear();
        cuts.push(0);
        for t in 1..n {
            if mask & (1 << (t - 1)) != 0 {
                cuts.push(t);
            }
        }
        cuts.push(n);
        let sizes: Vec<usize> = cuts.windows(2).map(|w| w[1] - w[0]).collect();
        if !constraint.admits(&sizes) {
            continue;
        }
        count += 1;
        let cost: f64 = cuts.windows(2).map(|w| cluster_cost(kind, &v[w[0]..w[1]])).sum();
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, cuts.clone()));
        }
    }
    let (min_cost, cuts) = best.ok_or_else(|| Error::Argument("no admissible partition".into()))?;
    let witness = cuts.windows(2).map(|w| v[w[0]..w[1]].to_vec()).collect();
    Ok(OracleResult {
        min_cost,
        witness,
        enumerated_count: count,
    })
}

/// Optimum over all set partitions with cluster sizes `>= min(k, n)`.
pub fn exhaustive_all_partitions(
    values: &[f64],
    k: usize,
    kind: impl Into<ExtendedKind>,
) -> Result<OracleResult> {
    if k < 1 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    all_partitions_with(values, kind.into(), &Constraint::min_size(k, values.len(), false))
}

/// Optimum over all set partitions admitted by `constraint`, enumerated as
/// restricted growth strings.
pub fn all_partitions_with(values: &[f64], kind: ExtendedKind, constraint: &Constraint) -> Result<OracleResult> {
    let n = values.len();
    if n == 0 || n > MAX_ALL_PARTITIONS_N {
        return Err(Error::Argument(format!(
            "set partition enumeration needs 1 <= n <= {MAX_ALL_PARTITIONS_N}, got {n}"
        )));
    }
    let v = sorted_copy(values)?;
    let mut search = PartitionSearch {
        values: &v,
        kind,
        constraint,
        assignment: vec![0; n],
        sizes: Vec::new(),
        best: None,
        count: 0,
    };
    search.descend(0);
    let count = search.count;
    let (min_cost, assignment) = search
        .best
        .ok_or_else(|| Error::Argument("no admissible partition".into()))?;
    let blocks = assignment.iter().max().map_or(0, |m| m + 1);
    let mut witness = vec![Vec::new(); blocks];
    for (t, &b) in assignment.iter().enumerate() {
        witness[b].push(v[t]);
    }
    Ok(OracleResult {
        min_cost,
        witness,
        enumerated_count: count,
    })
}

struct PartitionSearch<'a> {
    values: &'a [f64],
    kind: ExtendedKind,
    constraint: &'a Constraint,
    assignment: Vec<usize>,
    sizes: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    count: u64,
}

impl PartitionSearch<'_> {
    fn descend(&mut self, t: usize) {
        let n = self.values.len();
        let remaining = n - t;
        let deficit: usize = self
            .sizes
            .iter()
            .map(|&s| self.constraint.min_size.saturating_sub(s))
            .sum();
        if deficit > remaining {
            return;
        }
        if t == n {
            if !self.constraint.admits(&self.sizes) {
                return;
            }
            self.count += 1;
            let mut blocks = vec![Vec::new(); self.sizes.len()];
            for (i, &b) in self.assignment.iter().enumerate() {
                blocks[b].push(self.values[i]);
            }
            let cost = partition_cost(self.kind, &blocks);
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.assignment.clone()));
            }
            return;
        }
        for b in 0..=self.sizes.len() {
            if b == self.sizes.len() {
                self.sizes.push(0);
            }
            if self.constraint.max_size.is_none_or(|m| self.sizes[b] < m) {
                self.sizes[b] += 1;
                self.assignment[t] = b;
                self.descend(t + 1);
                self.sizes[b] -= 1;
            }
            if self.sizes[b] == 0 {
                self.sizes.pop();
            }
        }
    }
}

/// Exact fraction for the rational counterexample fixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.abs(), den.abs()).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Ratio {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn int(v: i128) -> Self {
        Ratio::new(v, 1)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn add(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    fn sub(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }

    fn abs(self) -> Ratio {
        Ratio::new(self.num.abs(), self.den)
    }

    fn div_int(self, d: i128) -> Ratio {
        Ratio::new(self.num, self.den * d)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact cost of an integer cluster for the three rational fixture kinds.
pub fn exact_cluster_cost(kind: ExtendedKind, x: &[i64]) -> Option<Ratio> {
    if x.is_empty() {
        return Some(Ratio::int(0));
    }
    let mut s: Vec<i128> = x.iter().map(|&v| v as i128).collect();
    s.sort_unstable();
    let len = s.len() as i128;
    let m = s.len() / 2;
    let total = |center: Ratio| {
        s.iter()
            .fold(Ratio::int(0), |acc, &v| acc.add(Ratio::int(v).sub(center).abs()))
    };
    match kind {
        ExtendedKind::Mae => {
            let med = if s.len() % 2 == 1 {
                Ratio::int(s[m])
            } else {
                Ratio::new(s[m - 1] + s[m], 2)
            };
            Some(total(med).div_int(len))
        }
        ExtendedKind::MeanRoundUp => Some(total(Ratio::int(s[s.len() - 1])).div_int(len)),
        ExtendedKind::MeanRoundDown => Some(total(Ratio::int(s[0])).div_int(len)),
        _ => None,
    }
}

fn exact_partition_cost(kind: ExtendedKind, partition: &[Vec<i64>]) -> Option<Ratio> {
    partition.iter().try_fold(Ratio::int(0), |acc, c| {
        exact_cluster_cost(kind, c).map(|r| acc.add(r))
    })
}

/// One replayed counterexample.
#[derive(Clone, Debug)]
pub struct FixtureReport {
    pub name: &'static str,
    pub kind: ExtendedKind,
    pub universe: Vec<i64>,
    pub sizes: Vec<usize>,
    /// Optimum over all partitions with the given cluster sizes.
    pub unordered_optimum: f64,
    pub unordered_witness: Vec<Vec<f64>>,
    /// Costs of the contiguous partitions with those sizes, left to right.
    pub ordered_costs: Vec<f64>,
    pub expected_unordered: f64,
    pub expected_ordered: Vec<f64>,
    pub passed: bool,
    pub detail: String,
}

struct Fixture {
    name: &'static str,
    kind: ExtendedKind,
    universe: &'static [i64],
    // Cluster sizes of the unordered witness; the ordered candidates are the
    // contiguous partitions with the same sizes in either order.
    sizes: &'static [usize],
    witness: &'static [&'static [i64]],
    ordered: &'static [&'static [&'static [i64]]],
    expected_unordered: Expected,
    expected_ordered: Vec<Expected>,
}

#[derive(Clone, Copy)]
enum Expected {
    Rational(i128, i128),
    Real(f64),
}

impl Expected {
    fn value(self) -> f64 {
        match self {
            Expected::Rational(n, d) => n as f64 / d as f64,
            Expected::Real(v) => v,
        }
    }
}

fn fixtures() -> Vec<Fixture> {
    let l2_ordered = (0.5f64).sqrt() + (2.0f64 / 3.0).sqrt();
    vec![
        Fixture {
            name: "mean absolute error",
            kind: ExtendedKind::Mae,
            universe: &[-1, 0, 0, 0, 0, 1],
            sizes: &[4, 2],
            witness: &[&[-1, 1, 0, 0], &[0, 0]],
            ordered: &[&[&[-1, 0, 0, 0], &[0, 1]], &[&[-1, 0], &[0, 0, 0, 1]]],
            expected_unordered: Expected::Rational(1, 2),
            expected_ordered: vec![Expected::Rational(3, 4), Expected::Rational(3, 4)],
        },
        Fixture {
            name: "l2",
            kind: ExtendedKind::L2,
            universe: &[-1, 0, 0, 0, 1],
            sizes: &[3, 2],
            witness: &[&[-1, 1, 0], &[0, 0]],
            ordered: &[&[&[-1, 0, 0], &[0, 1]], &[&[-1, 0], &[0, 0, 1]]],
            expected_unordered: Expected::Real(std::f64::consts::SQRT_2),
            expected_ordered: vec![Expected::Real(l2_ordered), Expected::Real(l2_ordered)],
        },
        Fixture {
            name: "mean round down",
            kind: ExtendedKind::MeanRoundDown,
            universe: &[0, 0, 0, 1, 1, 2],
            sizes: &[4, 2],
            witness: &[&[0, 0, 0, 2], &[1, 1]],
            ordered: &[&[&[0, 0, 0, 1], &[1, 2]], &[&[0, 0], &[0, 1, 1, 2]]],
            expected_unordered: Expected::Rational(1, 2),
            expected_ordered: vec![Expected::Rational(3, 4), Expected::Rational(1, 1)],
        },
        Fixture {
            name: "mean round up",
            kind: ExtendedKind::MeanRoundUp,
            universe: &[0, 1, 1, 2, 2, 2],
            sizes: &[4, 2],
            witness: &[&[0, 2, 2, 2], &[1, 1]],
            ordered: &[&[&[0, 1, 1, 2], &[2, 2]], &[&[0, 1], &[1, 2, 2, 2]]],
            expected_unordered: Expected::Rational(1, 2),
            expected_ordered: vec![Expected::Rational(1, 1), Expected::Rational(3, 4)],
        },
    ]
}

const REAL_TOLERANCE: f64 = 1e-12;

fn as_f64(c: &[&[i64]]) -> Vec<Vec<f64>> {
    c.iter().map(|b| b.iter().map(|&v| v as f64).collect()).collect()
}

fn as_owned(c: &[&[i64]]) -> Vec<Vec<i64>> {
    c.iter().map(|b| b.to_vec()).collect()
}

fn check_value(kind: ExtendedKind, partition: &[&[i64]], expected: Expected, problems: &mut Vec<String>, what: &str) -> f64 {
    let real = partition_cost(kind, &as_f64(partition));
    match expected {
        Expected::Rational(n, d) => match exact_partition_cost(kind, &as_owned(partition)) {
            Some(exact) if exact == Ratio::new(n, d) => {}
            Some(exact) => problems.push(format!("{what}: exact cost {exact}, expected {n}/{d}")),
            None => problems.push(format!("{what}: no exact evaluation for {kind}")),
        },
        Expected::Real(v) => {
            if (real - v).abs() > REAL_TOLERANCE {
                problems.push(format!("{what}: cost {real}, expected {v}"));
            }
        }
    }
    real
}

/// Replays the four counterexamples showing that mean absolute error, the square root
/// of SSE and the mean round-up / round-down errors are not ordered minimizable: with
/// the cluster sizes held fixed, some non-contiguous partition beats every contiguous
/// one.
pub fn verify_counterexamples() -> Vec<FixtureReport> {
    fixtures()
        .into_iter()
        .map(|fx| {
            let mut problems = Vec::new();
            let universe: Vec<f64> = fx.universe.iter().map(|&v| v as f64).collect();
            let constraint = Constraint::profile(fx.sizes);

            let witness_cost = check_value(fx.kind, fx.witness, fx.expected_unordered, &mut problems, "witness");
            let ordered_costs: Vec<f64> = fx
                .ordered
                .iter()
                .zip(&fx.expected_ordered)
                .enumerate()
                .map(|(t, (p, &e))| check_value(fx.kind, p, e, &mut problems, &format!("ordered candidate {t}")))
                .collect();

            let (unordered_optimum, unordered_witness) = match all_partitions_with(&universe, fx.kind, &constraint) {
                Ok(res) => (res.min_cost, res.witness),
                Err(e) => {
                    problems.push(format!("enumeration failed: {e}"));
                    (f64::NAN, Vec::new())
                }
            };
            if (unordered_optimum - fx.expected_unordered.value()).abs() > REAL_TOLERANCE
                || (unordered_optimum - witness_cost).abs() > REAL_TOLERANCE
            {
                problems.push(format!(
                    "unordered optimum {unordered_optimum}, expected {}",
                    fx.expected_unordered.value()
                ));
            }
            match ordered_with(&universe, fx.kind, &constraint) {
                Ok(res) => {
                    let best = ordered_costs.iter().copied().fold(f64::INFINITY, f64::min);
                    if (res.min_cost - best).abs() > REAL_TOLERANCE || res.enumerated_count != fx.ordered.len() as u64 {
                        problems.push(format!(
                            "ordered enumeration found {} over {} partitions",
                            res.min_cost, res.enumerated_count
                        ));
                    }
                    if res.min_cost <= unordered_optimum + REAL_TOLERANCE {
                        problems.push("contiguous partitions are not beaten".into());
                    }
                }
                Err(e) => problems.push(format!("ordered enumeration failed: {e}")),
            }

            FixtureReport {
                name: fx.name,
                kind: fx.kind,
                universe: fx.universe.to_vec(),
                sizes: fx.sizes.to_vec(),
                unordered_optimum,
                unordered_witness,
                ordered_costs,
                expected_unordered: fx.expected_unordered.value(),
                expected_ordered: fx.expected_ordered.iter().map(|e| e.value()).collect(),
                passed: problems.is_empty(),
                detail: problems.join("; "),
            }
        })
        .collect()
}

/// Outcome of a randomized small-instance sweep.
#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub instances: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random multiset of `n` values: small integers (ties likely) or uniform reals.
pub fn random_multiset(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        let hi = rng.gen_range(1..=6);
        (0..n).map(|_| f64::from(rng.gen_range(0..=hi))).collect()
    } else {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }
}

/// For random multisets with `n <= max_n` and every `k`: the five kinds have equal
/// optima over all partitions and over contiguous ones, and every solver reaches the
/// contiguous optimum.
pub fn equivalence_sweep(seed: u64, instances: usize, max_n: usize) -> Result<SweepReport> {
    let max_n = max_n.min(MAX_ALL_PARTITIONS_N);
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut report = SweepReport::default();
    for _ in 0..instances {
        let n = rng.gen_range(1..=max_n);
        let values = random_multiset(&mut rng, n);
        report.instances += 1;
        for k in 1..=n {
            for kind in CostKind::ALL {
                let ordered = exhaustive_ordered(&values, k, kind, false)?;
                let all = exhaustive_all_partitions(&values, k, kind)?;
                report.checks += 1;
                if (ordered.min_cost - all.min_cost).abs() > 1e-9 {
                    report.failures.push(format!(
                        "{kind} k={k} {values:?}: all partitions {} vs contiguous {}",
                        all.min_cost, ordered.min_cost
                    ));
                }
                for alg in Algorithm::CONCRETE {
                    let got = solve(&values, k, kind, &SolverOptions::with_algorithm(alg))?;
                    report.checks += 1;
                    if (got.total_cost - ordered.min_cost).abs() > 1e-9 {
                        report.failures.push(format!(
                            "{alg} {kind} k={k} {values:?}: {} vs optimum {}",
                            got.total_cost, ordered.min_cost
                        ));
                    }
                }
            }
        }
    }
    Ok(report)
}
