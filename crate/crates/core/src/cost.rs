//! Cluster cost functions over sorted data.
//!
//! A window `(i, j)` with `0 <= i < j <= n` denotes the cluster made of the sorted
//! values `values[i..j]`. Every cost kind is answered in constant time after a linear
//! preprocessing pass, either from full prefix sums, from prefix sums that restart every
//! `k` positions, or through a cheaper surrogate that ranks clusterings of the same
//! prefix identically.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Ascending values together with the permutation back to input order.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedDataset {
    values: Vec<f64>,
    perm: Vec<usize>,
}

impl SortedDataset {
    /// Stable ascending sort of `raw`. NaN has no place in the order and is rejected.
    pub fn from_unsorted(raw: &[f64]) -> Result<Self> {
        if let Some(pos) = raw.iter().position(|x| x.is_nan()) {
            return Err(Error::Argument(format!("NaN at position {pos}")));
        }
        let mut perm: Vec<usize> = (0..raw.len()).collect();
        perm.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).unwrap_or(Ordering::Equal));
        let values = perm.iter().map(|&p| raw[p]).collect();
        Ok(Self { values, perm })
    }

    /// Wraps values that are already ascending; the permutation is the identity.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|x| x.is_nan()) {
            return Err(Error::Argument(format!("NaN at position {pos}")));
        }
        if let Some(t) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Argument(format!(
                "values not ascending at positions {t} and {}",
                t + 1
            )));
        }
        let perm = (0..values.len()).collect();
        Ok(Self { values, perm })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `perm()[t]` is the input position that `values()[t]` came from.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The five distortion measures for which contiguous clusters of sorted data are optimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostKind {
    /// Sum of squared deviations from the mean.
    Sse,
    /// Sum of absolute deviations from the median.
    Sae,
    /// Largest deviation from the midrange.
    MaxDist,
    /// Total distance to the cluster maximum.
    RoundUp,
    /// Total distance to the cluster minimum.
    RoundDown,
}

impl CostKind {
    pub const ALL: [CostKind; 5] = [
        CostKind::Sse,
        CostKind::Sae,
        CostKind::MaxDist,
        CostKind::RoundUp,
        CostKind::RoundDown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostKind::Sse => "sse",
            CostKind::Sae => "sae",
            CostKind::MaxDist => "maxdist",
            CostKind::RoundUp => "roundup",
            CostKind::RoundDown => "rounddown",
        }
    }

    /// Whether `mode` is defined for this kind.
    pub fn supports(self, mode: SumMode) -> bool {
        match mode {
            SumMode::FullPrefix => true,
            SumMode::PartialPrefix => matches!(self, CostKind::Sse | CostKind::Sae),
            SumMode::Alternative => {
                matches!(self, CostKind::Sse | CostKind::RoundUp | CostKind::RoundDown)
            }
        }
    }

    /// Cost of an ascending window evaluated straight from the definition in `O(len)`.
    ///
    /// Used to report final totals; it does not go through any prefix sums.
    pub fn direct_cost(self, window: &[f64]) -> f64 {
        let len = window.len();
        if len <= 1 {
            return 0.0;
        }
        match self {
            CostKind::Sse => {
                let mean = window.iter().sum::<f64>() / len as f64;
                window.iter().map(|x| (x - mean) * (x - mean)).sum()
            }
            CostKind::Sae => {
                let med = median_of_sorted(window);
                window.iter().map(|x| (x - med).abs()).sum()
            }
            CostKind::MaxDist => (window[len - 1] - window[0]) / 2.0,
            CostKind::RoundUp => {
                let top = window[len - 1];
                window.iter().map(|x| top - x).sum()
            }
            CostKind::RoundDown => {
                let bottom = window[0];
                window.iter().map(|x| x - bottom).sum()
            }
        }
    }

    /// Release value of an ascending, non-empty window.
    pub fn direct_representative(self, window: &[f64]) -> f64 {
        let len = window.len();
        match self {
            CostKind::Sse => window.iter().sum::<f64>() / len as f64,
            CostKind::Sae => median_of_sorted(window),
            CostKind::MaxDist => (window[0] + window[len - 1]) / 2.0,
            CostKind::RoundUp => window[len - 1],
            CostKind::RoundDown => window[0],
        }
    }
}

fn median_of_sorted(window: &[f64]) -> f64 {
    let len = window.len();
    if len % 2 == 1 {
        window[len / 2]
    } else {
        (window[len / 2 - 1] + window[len / 2]) / 2.0
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sse" => Ok(CostKind::Sse),
            "sae" => Ok(CostKind::Sae),
            "maxdist" | "max-dist" | "max" => Ok(CostKind::MaxDist),
            "roundup" | "round-up" => Ok(CostKind::RoundUp),
            "rounddown" | "round-down" => Ok(CostKind::RoundDown),
            other => Err(Error::Argument(format!("unknown cost kind `{other}`"))),
        }
    }
}

/// How window sums are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SumMode {
    /// Prefix sums over the whole dataset.
    #[default]
    FullPrefix,
    /// Prefix sums restarted every `k` positions; windows are limited to `2k - 1` points.
    PartialPrefix,
    /// Surrogate costs that differ from the true cost by a term depending only on the
    /// covered prefix. Minimizers are unchanged, values are not costs.
    Alternative,
}

impl SumMode {
    pub const ALL: [SumMode; 3] = [SumMode::FullPrefix, SumMode::PartialPrefix, SumMode::Alternative];

    pub fn name(self) -> &'static str {
        match self {
            SumMode::FullPrefix => "full",
            SumMode::PartialPrefix => "partial",
            SumMode::Alternative => "alternative",
        }
    }
}

impl fmt::Display for SumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "full-prefix" | "fullprefix" => Ok(SumMode::FullPrefix),
            "partial" | "partial-prefix" | "partialprefix" => Ok(SumMode::PartialPrefix),
            "alternative" | "alt" => Ok(SumMode::Alternative),
            other => Err(Error::Argument(format!("unknown sum mode `{other}`"))),
        }
    }
}

/// Preprocessed running sums.
#[derive(Clone, Debug, PartialEq)]
pub enum PrefixStore {
    /// Nothing stored; the cost only needs the sorted values.
    Empty,
    /// `sums[t]` is the sum of the first `t` values, `sums[0] = 0`; likewise for the
    /// squares. `squares` is empty when the kind does not need it.
    Full { sums: Vec<f64>, squares: Vec<f64> },
    /// Block `b` covers positions `b*k+1 ..= b*k+k` (1-based). Entry `b*(k+1) + r` holds the
    /// sum of the first `r` values of the block, so each entry aggregates at most `k` values.
    Partial {
        block: usize,
        sums: Vec<f64>,
        squares: Vec<f64>,
    },
}

impl PrefixStore {
    fn full(values: &[f64], with_squares: bool) -> Self {
        let mut sums = Vec::with_capacity(values.len() + 1);
        let mut acc = 0.0;
        sums.push(acc);
        for &x in values {
            acc += x;
            sums.push(acc);
        }
        let squares = if with_squares {
            let mut sq = Vec::with_capacity(values.len() + 1);
            let mut acc = 0.0;
            sq.push(acc);
            for &x in values {
                acc += x * x;
                sq.push(acc);
            }
            sq
        } else {
            Vec::new()
        };
        PrefixStore::Full { sums, squares }
    }

    fn partial(values: &[f64], k: usize, with_squares: bool) -> Self {
        let n = values.len();
        let blocks = n / k + 1;
        let stride = k + 1;
        let mut sums = vec![0.0; blocks * stride];
        let mut squares = if with_squares {
            vec![0.0; blocks * stride]
        } else {
            Vec::new()
        };
        for b in 0..blocks {
            let start = b * k;
            let (mut s, mut q) = (0.0, 0.0);
            for r in 1..=k {
                // Entries past the end repeat the last running sum and are never read.
                if let Some(&x) = values.get(start + r - 1) {
                    s += x;
                    q += x * x;
                }
                sums[b * stride + r] = s;
                if with_squares {
                    squares[b * stride + r] = q;
                }
            }
        }
        PrefixStore::Partial {
            block: k,
            sums,
            squares,
        }
    }

    /// Full prefix sums, when stored.
    pub fn prefix_sums(&self) -> Option<&[f64]> {
        match self {
            PrefixStore::Full { sums, .. } => Some(sums),
            _ => None,
        }
    }

    /// Full prefix sums of squares, when stored.
    pub fn prefix_squares(&self) -> Option<&[f64]> {
        match self {
            PrefixStore::Full { squares, .. } if !squares.is_empty() => Some(squares),
            _ => None,
        }
    }

    /// Running sums of the block starting at position `start` (a multiple of `k`),
    /// beginning with the leading zero.
    pub fn block_sums(&self, start: usize, n: usize) -> Option<&[f64]> {
        match self {
            PrefixStore::Partial { block, sums, .. } if start.is_multiple_of(*block) && start < n => {
                let b = start / block;
                let len = (*block).min(n - start);
                let base = b * (block + 1);
                Some(&sums[base..=base + len])
            }
            _ => None,
        }
    }
}

/// Sum over `(i, j]` from restart-every-`k` running sums. Needs `j - i <= 2k - 1`.
///
/// Such a window touches up to three blocks, not two: with `k = 3`, `(2, 7]` takes the
/// last value of block 0, all of block 1 and the first of block 2.
#[inline]
fn partial_window(table: &[f64], k: usize, i: usize, j: usize) -> f64 {
    let stride = k + 1;
    let (bi, ri) = (i / k, i % k);
    let (mut bj, mut rj) = (j / k, j % k);
    if rj == 0 && bj > bi {
        bj -= 1;
        rj = k;
    }
    match bj - bi {
        0 => table[bj * stride + rj] - table[bi * stride + ri],
        1 => table[bj * stride + rj] + (table[bi * stride + k] - table[bi * stride + ri]),
        _ => {
            debug_assert_eq!(bj, bi + 2);
            table[bj * stride + rj]
                + table[(bi + 1) * stride + k]
                + (table[bi * stride + k] - table[bi * stride + ri])
        }
    }
}

/// Cost value with a ranked "forbidden" tier above every finite cost.
///
/// Ordering: all `Finite` values compare by value and sit below every `Forbidden`;
/// forbidden values compare by rank. Adding a finite amount to a forbidden value leaves it
/// unchanged.
#[derive(Clone, Copy, Debug)]
pub enum AdaptedCost {
    Finite(f64),
    Forbidden(i64),
}

impl AdaptedCost {
    pub const ZERO: AdaptedCost = AdaptedCost::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, AdaptedCost::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            AdaptedCost::Finite(v) => Some(v),
            AdaptedCost::Forbidden(_) => None,
        }
    }

    /// `t + self` for a finite scalar `t`.
    #[inline]
    pub fn shift(self, t: f64) -> Self {
        match self {
            AdaptedCost::Finite(v) => AdaptedCost::Finite(t + v),
            f => f,
        }
    }
}

impl Add for AdaptedCost {
    type Output = AdaptedCost;

    /// Two forbidden operands keep the larger rank. That case only arises for prefixes
    /// that no valid clustering reaches.
    #[inline]
    fn add(self, rhs: AdaptedCost) -> AdaptedCost {
        match (self, rhs) {
            (AdaptedCost::Finite(a), AdaptedCost::Finite(b)) => AdaptedCost::Finite(a + b),
            (AdaptedCost::Finite(_), f @ AdaptedCost::Forbidden(_)) => f,
            (f @ AdaptedCost::Forbidden(_), AdaptedCost::Finite(_)) => f,
            (AdaptedCost::Forbidden(a), AdaptedCost::Forbidden(b)) => {
                AdaptedCost::Forbidden(a.max(b))
            }
        }
    }
}

impl Ord for AdaptedCost {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (AdaptedCost::Finite(a), AdaptedCost::Finite(b)) => {
                if a < b {
                    Ordering::Less
                } else if a > b {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            }
            (AdaptedCost::Finite(_), AdaptedCost::Forbidden(_)) => Ordering::Less,
            (AdaptedCost::Forbidden(_), AdaptedCost::Finite(_)) => Ordering::Greater,
            (AdaptedCost::Forbidden(a), AdaptedCost::Forbidden(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for AdaptedCost {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for AdaptedCost {
    #[inline]
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AdaptedCost {}

/// How window sizes outside `[k, 2k-1]` are mapped into the forbidden tier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdaptScheme {
    /// Raw cost, no size restriction.
    Unrestricted,
    /// Windows smaller than `k` are forbidden.
    MinOnly,
    /// Windows smaller than `k` or of at least `2k` points are forbidden.
    MinMax,
    /// Windows smaller than `k` are forbidden with rank `i`, keeping the transposed
    /// matrix totally monotone.
    MinOnlyMonotone,
    /// As `MinOnlyMonotone`; windows of at least `2k` points get rank `-i`.
    MinMaxMonotone,
}

/// Constant-time window costs over a preprocessed sorted dataset.
#[derive(Clone, Debug)]
pub struct CostCalculator {
    data: SortedDataset,
    k: usize,
    kind: CostKind,
    mode: SumMode,
    store: PrefixStore,
}

impl CostCalculator {
    pub fn new(data: SortedDataset, k: usize, kind: CostKind, mode: SumMode) -> Result<Self> {
        if k < 1 {
            return Err(Error::Argument("minimum cluster size k must be at least 1".into()));
        }
        if !kind.supports(mode) {
            return Err(Error::Config(format!(
                "sum mode `{mode}` is not defined for cost `{kind}`"
            )));
        }
        let values = data.values();
        let store = match (kind, mode) {
            (CostKind::MaxDist, _) => PrefixStore::Empty,
            (CostKind::RoundUp | CostKind::RoundDown, SumMode::Alternative) => PrefixStore::Empty,
            (CostKind::Sse, SumMode::FullPrefix) => PrefixStore::full(values, true),
            (CostKind::Sse, SumMode::PartialPrefix) => PrefixStore::partial(values, k, true),
            (CostKind::Sae, SumMode::PartialPrefix) => PrefixStore::partial(values, k, false),
            (_, _) => PrefixStore::full(values, false),
        };
        Ok(Self {
            data,
            k,
            kind,
            mode,
            store,
        })
    }

    pub fn data(&self) -> &SortedDataset {
        &self.data
    }

    pub fn values(&self) -> &[f64] {
        self.data.values()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn mode(&self) -> SumMode {
        self.mode
    }

    pub fn store(&self) -> &PrefixStore {
        &self.store
    }

    /// Largest window the calculator answers, `2k - 1` for partial sums.
    pub fn max_window(&self) -> usize {
        match self.mode {
            SumMode::PartialPrefix => 2 * self.k - 1,
            _ => self.len(),
        }
    }

    fn check_window(&self, i: usize, j: usize) -> Result<()> {
        if i >= j || j > self.len() {
            return Err(Error::Precondition(format!(
                "window ({i}, {j}) outside 0 <= i < j <= {}",
                self.len()
            )));
        }
        if j - i > self.max_window() {
            return Err(Error::Precondition(format!(
                "window ({i}, {j}) wider than {} points under partial prefix sums",
                self.max_window()
            )));
        }
        Ok(())
    }

    /// Sum of `values[i..j]`. Requires a stored sum table.
    #[inline(always)]
    fn window_sum(&self, i: usize, j: usize) -> f64 {
        match &self.store {
            PrefixStore::Full { sums, .. } => sums[j] - sums[i],
            PrefixStore::Partial { block, sums, .. } => partial_window(sums, *block, i, j),
            PrefixStore::Empty => self.values()[i..j].iter().sum(),
        }
    }

    #[inline(always)]
    fn window_squares(&self, i: usize, j: usize) -> f64 {
        match &self.store {
            PrefixStore::Full { squares, .. } => squares[j] - squares[i],
            PrefixStore::Partial { block, squares, .. } => partial_window(squares, *block, i, j),
            PrefixStore::Empty => self.values()[i..j].iter().map(|x| x * x).sum(),
        }
    }

    /// Cost of the cluster `values[i..j]`, or its surrogate in `Alternative` mode.
    ///
    /// Debug builds assert `0 <= i < j <= n` and the partial-sum width limit; use
    /// [`checked_cluster_cost`](Self::checked_cluster_cost) for untrusted indices.
    #[inline(always)]
    pub fn cluster_cost(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < j && j <= self.len(), "window ({i}, {j}) out of range");
        debug_assert!(j - i <= self.max_window(), "window ({i}, {j}) too wide");
        let x = self.values();
        let len = (j - i) as f64;
        match (self.kind, self.mode) {
            (CostKind::Sse, SumMode::Alternative) => {
                let s = self.window_sum(i, j);
                -(s * s) / len
            }
            (CostKind::RoundUp, SumMode::Alternative) => len * x[j - 1],
            (CostKind::RoundDown, SumMode::Alternative) => -len * x[i],
            (CostKind::MaxDist, _) => (x[j - 1] - x[i]) / 2.0,
            // Prefix differences leave rounding residue, which can even be slightly
            // negative. Singletons are pinned to zero; other windows are left alone,
            // because the residues largely cancel along a chain of clusters and clamping
            // them breaks that.
            _ if j == i + 1 => 0.0,
            (CostKind::Sse, _) => {
                let s = self.window_sum(i, j);
                self.window_squares(i, j) - s * s / len
            }
            (CostKind::Sae, _) => {
                let half = (j - i) / 2;
                self.window_sum(j - half, j) - self.window_sum(i, i + half)
            }
            (CostKind::RoundUp, _) => len * x[j - 1] - self.window_sum(i, j),
            (CostKind::RoundDown, _) => self.window_sum(i, j) - len * x[i],
        }
    }

    pub fn checked_cluster_cost(&self, i: usize, j: usize) -> Result<f64> {
        self.check_window(i, j)?;
        Ok(self.cluster_cost(i, j))
    }

    /// Size-restricted cost. Windows with `j <= i` count as too small, which extends
    /// the forbidden region below the diagonal.
    #[inline]
    pub fn adapted_cost(&self, i: usize, j: usize, scheme: AdaptScheme) -> AdaptedCost {
        let k = self.k;
        let small = j < i + k;
        match scheme {
            AdaptScheme::Unrestricted => {
                if j <= i {
                    AdaptedCost::Forbidden(i as i64)
                } else {
                    AdaptedCost::Finite(self.cluster_cost(i, j))
                }
            }
            AdaptScheme::MinOnly => {
                if small {
                    AdaptedCost::Forbidden(0)
                } else {
                    AdaptedCost::Finite(self.cluster_cost(i, j))
                }
            }
            AdaptScheme::MinMax => {
                if small || j - i >= 2 * k {
                    AdaptedCost::Forbidden(0)
                } else {
                    AdaptedCost::Finite(self.cluster_cost(i, j))
                }
            }
            AdaptScheme::MinOnlyMonotone => {
                if small {
                    AdaptedCost::Forbidden(i as i64)
                } else {
                    AdaptedCost::Finite(self.cluster_cost(i, j))
                }
            }
            AdaptScheme::MinMaxMonotone => {
                if small {
                    AdaptedCost::Forbidden(i as i64)
                } else if j - i >= 2 * k {
                    AdaptedCost::Forbidden(-(i as i64))
                } else {
                    AdaptedCost::Finite(self.cluster_cost(i, j))
                }
            }
        }
    }

    pub fn checked_adapted_cost(&self, i: usize, j: usize, scheme: AdaptScheme) -> Result<AdaptedCost> {
        if i >= j || j > self.len() {
            return Err(Error::Precondition(format!(
                "window ({i}, {j}) outside 0 <= i < j <= {}",
                self.len()
            )));
        }
        let c = self.adapted_cost(i, j, scheme);
        if c.is_finite() {
            self.check_window(i, j)?;
        }
        Ok(c)
    }

    /// Release value of the cluster `values[i..j]`: mean, median (midpoint of the two
    /// middle values for even sizes), midrange, maximum or minimum.
    pub fn representative(&self, i: usize, j: usize) -> Result<f64> {
        if i >= j || j > self.len() {
            return Err(Error::Precondition(format!(
                "window ({i}, {j}) outside 0 <= i < j <= {}",
                self.len()
            )));
        }
        let x = self.values();
        Ok(match self.kind {
            CostKind::Sse => {
                if j - i <= self.max_window() && !matches!(self.store, PrefixStore::Empty) {
                    self.window_sum(i, j) / (j - i) as f64
                } else {
                    x[i..j].iter().sum::<f64>() / (j - i) as f64
                }
            }
            kind => kind.direct_representative(&x[i..j]),
        })
    }
}
