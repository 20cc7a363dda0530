use crate::cost::{AdaptScheme, AdaptedCost, CostCalculator};
use crate::error::Result;

use super::{require_restricted_input, require_unrestricted_input, ImplicitSolution};

/// Quadratic reference: every split `0 <= i <= j - k` for every column `j`.
pub fn solve_classic_n2(calc: &CostCalculator) -> Result<ImplicitSolution> {
    require_unrestricted_input(calc, "classic")?;
    Ok(column_scan(calc, AdaptScheme::MinOnly, false, |j, _| {
        (0, j + 1 - calc.k())
    }))
}

/// Scans the `k` splits that give a cluster of `k` to `2k - 1` points.
pub fn solve_simple(calc: &CostCalculator, rebase: bool) -> Result<ImplicitSolution> {
    require_restricted_input(calc, "simple")?;
    let k = calc.k();
    Ok(column_scan(calc, AdaptScheme::MinMax, rebase, |j, _| {
        ((j + 1).saturating_sub(2 * k), j + 1 - k)
    }))
}

/// As [`solve_simple`], but the scan starts no earlier than the previous column's
/// argmin, which is valid because argmins are non-decreasing for concave costs.
pub fn solve_simple_plus(calc: &CostCalculator, rebase: bool) -> Result<ImplicitSolution> {
    require_restricted_input(calc, "simple+")?;
    let k = calc.k();
    Ok(column_scan(calc, AdaptScheme::MinMaxMonotone, rebase, |j, prev| {
        ((j + 1).saturating_sub(2 * k).max(prev), j + 1 - k)
    }))
}

/// Shared column loop. `bounds(j, previous_argmin)` yields the half-open candidate range
/// for column `j >= k`; columns below `k` are unreachable.
///
/// Every window the three scans look at is admissible under `scheme`, so the forbidden
/// tier only ever shows up as the total of an unreachable prefix. The loop keeps those
/// as `+inf` in plain floats, which compares the same way and keeps the inner loop tight.
fn column_scan<B>(calc: &CostCalculator, scheme: AdaptScheme, rebase: bool, bounds: B) -> ImplicitSolution
where
    B: Fn(usize, usize) -> (usize, usize),
{
    let n = calc.len();
    let k = calc.k();
    let mut argmin = vec![0usize; n];
    let mut total = vec![f64::INFINITY; n + 1];
    total[0] = 0.0;
    let mut evaluations = 0u64;
    let mut prev = 0;
    let mut rebased = false;
    let period = 2 * k - 1;

    for j in k..=n {
        let (lo, hi) = bounds(j, prev);
        debug_assert!(lo < hi);
        debug_assert!(calc.adapted_cost(lo, j, scheme).is_finite());
        debug_assert!(calc.adapted_cost(hi - 1, j, scheme).is_finite());
        let mut best_i = lo;
        let mut best = total[lo] + calc.cluster_cost(lo, j);
        for i in lo + 1..hi {
            let cand = total[i] + calc.cluster_cost(i, j);
            if cand < best {
                best = cand;
                best_i = i;
            }
        }
        evaluations += (hi - lo) as u64;
        argmin[j - 1] = best_i;
        total[j] = best;
        prev = best_i;

        if rebase && (j - k + 1).is_multiple_of(period) {
            // Columns after j read rows >= j + 2 - 2k only.
            let live = (j + 2).saturating_sub(2 * k)..j + 1;
            rebased |= rebase_totals(&mut total, live) != 0.0;
        }
    }

    let min_cost = total
        .into_iter()
        .map(|t| if t.is_finite() { AdaptedCost::Finite(t) } else { AdaptedCost::Forbidden(0) })
        .collect();
    ImplicitSolution {
        argmin,
        min_cost,
        rebased,
        evaluations,
    }
}

/// [`rebase_min_costs`] on plain floats with `+inf` for unreachable entries.
fn rebase_totals(total: &mut [f64], live: std::ops::Range<usize>) -> f64 {
    let shift = total[live.clone()]
        .iter()
        .copied()
        .filter(|t| t.is_finite())
        .fold(f64::INFINITY, f64::min);
    if !shift.is_finite() || shift == 0.0 {
        return 0.0;
    }
    for t in &mut total[live] {
        *t -= shift;
    }
    shift
}
