//! Column minima of implicitly defined totally monotone matrices.
//!
//! The matrices handled here are given by an evaluation closure `eval(row, col)` over a
//! rectangle of row and column indices. The contract is that the *transpose* is totally
//! monotone: for rows `r1 < r2` and columns `c1 < c2`, `eval(r1, c1) > eval(r2, c1)`
//! implies `eval(r1, c2) > eval(r2, c2)`, and `eval(r1, c1) >= eval(r2, c1)` implies
//! `eval(r1, c2) >= eval(r2, c2)`. Under that contract the smallest-index row minimum of
//! each column moves down (weakly) as the column index grows, and SMAWK finds all of them
//! with `O(rows + cols)` evaluations.
//!
//! Monotonicity is not checked; [`col_minima_verified`] brute-forces the answer for tests.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// Minimum of every column of a submatrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ColMinResult<T> {
    /// First column covered.
    pub col_lo: usize,
    /// `argmin[c - col_lo]` is the smallest row attaining the minimum of column `c`.
    pub argmin: Vec<usize>,
    /// `min[c - col_lo]` is that minimum.
    pub min: Vec<T>,
}

impl<T: Copy> ColMinResult<T> {
    pub fn get(&self, col: usize) -> (usize, T) {
        let t = col - self.col_lo;
        (self.argmin[t], self.min[t])
    }
}

/// Column minima of `eval` over `rows x cols` by SMAWK.
pub fn col_minima<T, F>(
    rows: RangeInclusive<usize>,
    cols: RangeInclusive<usize>,
    mut eval: F,
) -> Result<ColMinResult<T>>
where
    T: Ord + Copy,
    F: FnMut(usize, usize) -> T,
{
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::Argument(format!(
            "empty submatrix: rows {rows:?}, cols {cols:?}"
        )));
    }
    let col_lo = *cols.start();
    let ncols = cols.end() - col_lo + 1;
    let rows: Vec<usize> = rows.collect();
    let mut argmin = vec![0; ncols];
    let mut min = vec![None; ncols];
    smawk_into(&mut eval, &rows, col_lo, &mut argmin, &mut min);
    let min = min
        .into_iter()
        .map(|v| v.expect("every column receives a minimum"))
        .collect();
    Ok(ColMinResult { col_lo, argmin, min })
}

/// Same as [`col_minima`], then checks every column against an exhaustive scan and
/// reports the first disagreement. `O(rows * cols)`.
pub fn col_minima_verified<T, F>(
    rows: RangeInclusive<usize>,
    cols: RangeInclusive<usize>,
    mut eval: F,
) -> Result<ColMinResult<T>>
where
    T: Ord + Copy + std::fmt::Debug,
    F: FnMut(usize, usize) -> T,
{
    let fast = col_minima(rows.clone(), cols.clone(), &mut eval)?;
    let slow = col_minima_brute_force(rows, cols, eval)?;
    if fast != slow {
        let t = (0..fast.argmin.len())
            .find(|&t| fast.argmin[t] != slow.argmin[t] || fast.min[t] != slow.min[t])
            .unwrap_or(0);
        return Err(Error::Invariant(format!(
            "column {} minimum {:?} at row {} differs from exhaustive {:?} at row {}; \
             the matrix transpose is not totally monotone",
            fast.col_lo + t,
            fast.min[t],
            fast.argmin[t],
            slow.min[t],
            slow.argmin[t]
        )));
    }
    Ok(fast)
}

/// Per-column exhaustive scan with smallest-row tie-break.
pub fn col_minima_brute_force<T, F>(
    rows: RangeInclusive<usize>,
    cols: RangeInclusive<usize>,
    mut eval: F,
) -> Result<ColMinResult<T>>
where
    T: Ord + Copy,
    F: FnMut(usize, usize) -> T,
{
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::Argument(format!(
            "empty submatrix: rows {rows:?}, cols {cols:?}"
        )));
    }
    let col_lo = *cols.start();
    let mut argmin = Vec::new();
    let mut min = Vec::new();
    for c in cols {
        let mut best = (eval(*rows.start(), c), *rows.start());
        for r in rows.clone().skip(1) {
            let v = eval(r, c);
            if v < best.0 {
                best = (v, r);
            }
        }
        argmin.push(best.1);
        min.push(best.0);
    }
    Ok(ColMinResult { col_lo, argmin, min })
}

/// Column minima of `rows x [col_lo, col_lo + argmin.len())` written into `argmin` and
/// `min`. `rows` must be ascending.
pub(crate) fn smawk_into<T, F>(
    eval: &mut F,
    rows: &[usize],
    col_lo: usize,
    argmin: &mut [usize],
    min: &mut [Option<T>],
) where
    T: Ord + Copy,
    F: FnMut(usize, usize) -> T,
{
    debug_assert_eq!(argmin.len(), min.len());
    let count = argmin.len();
    smawk(eval, rows, col_lo, 1, count, col_lo, argmin, min);
}

/// Local columns are `start + t * step` for `t < count`; results land in slot
/// `column - col_lo`.
#[allow(clippy::too_many_arguments)]
fn smawk<T, F>(
    eval: &mut F,
    rows: &[usize],
    start: usize,
    step: usize,
    count: usize,
    col_lo: usize,
    argmin: &mut [usize],
    min: &mut [Option<T>],
) where
    T: Ord + Copy,
    F: FnMut(usize, usize) -> T,
{
    if count == 0 {
        return;
    }
    let col = |t: usize| start + t * step;

    // REDUCE: keep at most `count` rows that can still host a column minimum.
    // `own[t]` caches eval(stack[t], col(t)).
    let cap = count.min(rows.len());
    let mut stack: Vec<usize> = Vec::with_capacity(cap);
    let mut own: Vec<Option<T>> = Vec::with_capacity(cap);
    for &r in rows {
        let mut popped_at: Option<(usize, T)> = None;
        while let Some(&top) = stack.last() {
            let t = stack.len() - 1;
            let top_val = match own[t] {
                Some(v) => v,
                None => {
                    let v = eval(top, col(t));
                    own[t] = Some(v);
                    v
                }
            };
            let r_val = eval(r, col(t));
            if top_val > r_val {
                stack.pop();
                own.pop();
                popped_at = Some((t, r_val));
            } else {
                break;
            }
        }
        if stack.len() < count {
            let t = stack.len();
            stack.push(r);
            own.push(match popped_at {
                Some((pt, v)) if pt == t => Some(v),
                _ => None,
            });
        }
    }

    if count == 1 {
        let v = match own[0] {
            Some(v) => v,
            None => eval(stack[0], start),
        };
        argmin[start - col_lo] = stack[0];
        min[start - col_lo] = Some(v);
        return;
    }

    smawk(eval, &stack, col(1), step * 2, count / 2, col_lo, argmin, min);

    // INTERPOLATE the even local columns between neighbouring odd-column argmins.
    let mut r = 0;
    let mut t = 0;
    while t < count {
        let c = col(t);
        let last_row = if t + 1 < count {
            argmin[col(t + 1) - col_lo]
        } else {
            stack[stack.len() - 1]
        };
        let value_at = |r: usize, eval: &mut F| match own[r] {
            Some(v) if r == t => v,
            _ => eval(stack[r], c),
        };
        let mut best_row = stack[r];
        let mut best = value_at(r, eval);
        while stack[r] != last_row {
            r += 1;
            let v = value_at(r, eval);
            if v < best {
                best = v;
                best_row = stack[r];
            }
        }
        argmin[c - col_lo] = best_row;
        min[c - col_lo] = Some(best);
        t += 2;
    }
}
