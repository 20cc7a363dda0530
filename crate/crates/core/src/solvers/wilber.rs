use crate::cost::{AdaptScheme, AdaptedCost, CostCalculator};
use crate::error::Result;
use crate::smawk::smawk_into;

use super::{require_unrestricted_input, ImplicitSolution};

/// Linear-time concave least-weight-subsequence solver with guess and recovery.
///
/// Only the lower bound on cluster sizes is imposed. Prefixes of length `1..k` cannot be
/// clustered at all, so the dynamic program runs over the reachable positions
/// `0, k, k+1, ..., n` only; a submatrix of a totally monotone matrix stays totally
/// monotone.
///
/// With the totals of positions `<= c` final and rows below `r` known to be dominated,
/// each round
/// 1. computes, by SMAWK, the minima of columns `c+1 ..= p` over the rows `r ..= c`, where
///    `p = 2c - r + 1` keeps the block square;
/// 2. treats those minima as the totals of positions `c+1 .. p` and computes, by SMAWK
///    over the triangle of new rows, the best value each later column could get from a
///    new row;
/// 3. accepts every guess up to the first column where a new row wins. At that column the
///    new row's value is final and all rows up to `c` are dominated from then on.
pub fn solve_wilber(calc: &CostCalculator) -> Result<ImplicitSolution> {
    require_unrestricted_input(calc, "wilber")?;
    let n = calc.len();
    let k = calc.k();
    // Compressed positions: q = 0 is prefix 0, q >= 1 is prefix k - 1 + q.
    let last = n + 1 - k;
    let pos = |q: usize| if q == 0 { 0 } else { k - 1 + q };

    let mut total = vec![AdaptedCost::ZERO; last + 1];
    let mut from = vec![0usize; last + 1];
    let mut evaluations = 0u64;

    let mut rows: Vec<usize> = Vec::new();
    let mut guess_arg: Vec<usize> = Vec::new();
    let mut guess_min: Vec<Option<AdaptedCost>> = Vec::new();
    let mut new_arg: Vec<usize> = Vec::new();
    let mut new_min: Vec<Option<AdaptedCost>> = Vec::new();

    let mut c = 0;
    let mut r = 0;
    while c < last {
        let p = (2 * c + 1 - r).min(last);

        // Step 1: minima of columns c+1..=p over final rows r..=c.
        rows.clear();
        rows.extend(r..=c);
        guess_arg.clear();
        guess_arg.resize(p - c, 0);
        guess_min.clear();
        guess_min.resize(p - c, None);
        {
            let total = &total;
            let mut eval = |q1: usize, q2: usize| {
                evaluations += 1;
                entry(calc, total, pos(q1), pos(q2), q1)
            };
            smawk_into(&mut eval, &rows, c + 1, &mut guess_arg, &mut guess_min);
        }
        for t in 0..p - c {
            total[c + 1 + t] = guess_min[t].expect("column filled");
            from[c + 1 + t] = guess_arg[t];
        }
        if p == c + 1 {
            c = p;
            continue;
        }

        // Step 2: what the tentative rows c+1..p-1 offer to columns c+2..=p.
        rows.clear();
        rows.extend(c + 1..p);
        new_arg.clear();
        new_arg.resize(p - c - 1, 0);
        new_min.clear();
        new_min.resize(p - c - 1, None);
        {
            let total = &total;
            let mut eval = |q1: usize, q2: usize| {
                evaluations += 1;
                entry(calc, total, pos(q1), pos(q2), q1)
            };
            smawk_into(&mut eval, &rows, c + 2, &mut new_arg, &mut new_min);
        }

        // Step 3: first column where a new row beats the guess.
        let beaten = (0..p - c - 1).find(|&t| {
            let j = c + 2 + t;
            new_min[t].expect("column filled") < total[j]
        });
        match beaten {
            None => c = p,
            Some(t) => {
                let j = c + 2 + t;
                total[j] = new_min[t].expect("column filled");
                from[j] = new_arg[t];
                r = c + 1;
                c = j;
            }
        }
    }

    let mut argmin = vec![0usize; n];
    let mut min_cost = vec![AdaptedCost::Forbidden(0); n + 1];
    min_cost[0] = AdaptedCost::ZERO;
    for q in 1..=last {
        argmin[pos(q) - 1] = pos(from[q]);
        min_cost[pos(q)] = total[q];
    }
    Ok(ImplicitSolution {
        argmin,
        min_cost,
        rebased: false,
        evaluations,
    })
}

#[inline]
fn entry(calc: &CostCalculator, total: &[AdaptedCost], i: usize, j: usize, q: usize) -> AdaptedCost {
    match calc.adapted_cost(i, j, AdaptScheme::MinOnlyMonotone) {
        AdaptedCost::Finite(v) => total[q].shift(v),
        forbidden => forbidden,
    }
}
