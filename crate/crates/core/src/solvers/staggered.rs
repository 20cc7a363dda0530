use crate::cost::{AdaptScheme, AdaptedCost, CostCalculator};
use crate::error::Result;
use crate::smawk::smawk_into;

use super::{rebase_min_costs, require_restricted_input, ImplicitSolution};

/// Linear-time solver that runs SMAWK on the diagonal `k`-wide blocks of the cost matrix.
///
/// Column `c` only has valid splits in `[c - 2k + 1, c - k]`, so the columns
/// `[ik, (i+1)k - 1]` need rows `[(i-2)k + 1, ik - 1]` only, all of which are final by
/// the time the block is processed. Every SMAWK call is `O(k)` and there are at most
/// `ceil(n / k)` of them.
pub fn solve_staggered(calc: &CostCalculator, rebase: bool) -> Result<ImplicitSolution> {
    require_restricted_input(calc, "staggered")?;
    let n = calc.len();
    let k = calc.k();
    let mut state = State {
        calc,
        argmin: vec![0; n],
        min_cost: vec![AdaptedCost::Forbidden(0); n + 1],
        evaluations: 0,
        rebased: false,
        rows: Vec::with_capacity(2 * k),
        block_argmin: Vec::with_capacity(k),
        block_min: Vec::with_capacity(k),
    };
    state.min_cost[0] = AdaptedCost::ZERO;
    for i in k..2 * k {
        state.min_cost[i] = AdaptedCost::Finite(calc.cluster_cost(0, i));
        state.argmin[i - 1] = 0;
    }
    state.evaluations += k as u64;

    let blocks = staggered_blocks(n, k);
    for (t, &((col_lo, col_hi), (row_lo, row_hi))) in blocks.iter().enumerate() {
        state.block(col_lo, col_hi, row_lo, row_hi);
        if let (true, Some(&((next_col, _), (next_lo, next_hi)))) = (rebase, blocks.get(t + 1)) {
            // Rows the next block can actually combine with a valid window.
            state.rebase(next_lo..(next_hi + 1).min(next_col));
        }
    }
    Ok(state.into_solution())
}

struct State<'a> {
    calc: &'a CostCalculator,
    argmin: Vec<usize>,
    min_cost: Vec<AdaptedCost>,
    evaluations: u64,
    rebased: bool,
    rows: Vec<usize>,
    block_argmin: Vec<usize>,
    block_min: Vec<Option<AdaptedCost>>,
}

impl State<'_> {
    /// Column minima of columns `[col_lo, col_hi]` over rows `[row_lo, row_hi]`.
    fn block(&mut self, col_lo: usize, col_hi: usize, row_lo: usize, row_hi: usize) {
        let calc = self.calc;
        let min_cost = &self.min_cost;
        let mut evaluations = 0u64;
        let mut eval = |r: usize, c: usize| {
            evaluations += 1;
            // Rows at or past the block start only produce too-small windows here, so
            // their (not yet computed) totals are never read.
            match calc.adapted_cost(r, c, AdaptScheme::MinMaxMonotone) {
                AdaptedCost::Finite(v) => min_cost[r].shift(v),
                forbidden => forbidden,
            }
        };
        self.rows.clear();
        self.rows.extend(row_lo..=row_hi);
        let cols = col_hi - col_lo + 1;
        self.block_argmin.clear();
        self.block_argmin.resize(cols, 0);
        self.block_min.clear();
        self.block_min.resize(cols, None);
        smawk_into(
            &mut eval,
            &self.rows,
            col_lo,
            &mut self.block_argmin,
            &mut self.block_min,
        );
        self.evaluations += evaluations;
        for t in 0..cols {
            let c = col_lo + t;
            self.argmin[c - 1] = self.block_argmin[t];
            self.min_cost[c] = self.block_min[t].expect("SMAWK fills every column");
        }
    }

    fn rebase(&mut self, live: std::ops::Range<usize>) {
        self.rebased |= rebase_min_costs(&mut self.min_cost, live) != 0.0;
    }

    fn into_solution(self) -> ImplicitSolution {
        ImplicitSolution {
            argmin: self.argmin,
            min_cost: self.min_cost,
            rebased: self.rebased,
            evaluations: self.evaluations,
        }
    }
}

/// Column and row ranges of every SMAWK call the staggered solver makes for `n`, `k`,
/// in order, as `((col_lo, col_hi), (row_lo, row_hi))`. The initial columns
/// `[k, 2k - 1]` are filled directly and not listed.
pub fn staggered_blocks(n: usize, k: usize) -> Vec<((usize, usize), (usize, usize))> {
    let mut out = Vec::new();
    if k == 0 || n < 2 * k {
        return out;
    }
    out.push(((2 * k, (3 * k - 1).min(n)), (k, 2 * k - 1)));
    if n < 3 * k {
        return out;
    }
    let (f, rem) = ((n + 1 - 3 * k) / k, (n + 1 - 3 * k) % k);
    for i in 3..3 + f {
        out.push(((i * k, (i + 1) * k - 1), ((i - 2) * k + 1, i * k - 1)));
    }
    if rem > 0 {
        let i = 3 + f;
        out.push(((i * k, n), ((i - 2) * k + 1, n - 1)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_geometry_n8_k2() {
        assert_eq!(
            staggered_blocks(8, 2),
            vec![((4, 5), (2, 3)), ((6, 7), (3, 5)), ((8, 8), (5, 7))]
        );
    }

    #[test]
    fn blocks_cover_every_column_once() {
        for k in 1..7 {
            for n in 2 * k..12 * k {
                let mut next = 2 * k;
                for ((lo, hi), (rlo, rhi)) in staggered_blocks(n, k) {
                    assert_eq!(lo, next, "n={n} k={k}");
                    assert!(hi >= lo);
                    // every valid split of every column is a row of the block
                    for c in lo..=hi {
                        let first_valid = (c + 1).saturating_sub(2 * k).max(k);
                        assert!(rlo <= first_valid && c - k <= rhi, "n={n} k={k} c={c}");
                    }
                    next = hi + 1;
                }
                assert_eq!(next, n + 1, "n={n} k={k}");
            }
        }
    }
}
