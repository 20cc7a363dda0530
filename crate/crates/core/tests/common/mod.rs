#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

/// `m[r][c] = row[r] + col[c] + sum of w[r'][c'] over r' <= r, c' > c`, which is Monge
/// for non-negative `w`. Small integer weights make ties common.
pub fn monge(rows: usize, cols: usize, w: &[u8], row_off: &[i16], col_off: &[i16]) -> Vec<Vec<i64>> {
    // out[r][c] = out[r-1][c] + sum of row r of w past column c
    let mut out = vec![vec![0i64; cols]; rows];
    for r in 0..rows {
        let mut suffix = 0i64;
        for c in (0..cols).rev() {
            let above = if r > 0 { out[r - 1][c] } else { 0 };
            out[r][c] = above + suffix;
            suffix += i64::from(w[(r * cols + c) % w.len()] % 4);
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            out[r][c] += i64::from(row_off[r % row_off.len()]) + i64::from(col_off[c % col_off.len()]);
        }
    }
    out
}

pub fn random_monge(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<i64>> {
    let w: Vec<u8> = (0..rng.gen_range(1..64)).map(|_| rng.gen()).collect();
    let row_off: Vec<i16> = (0..rng.gen_range(1..32)).map(|_| rng.gen_range(-40..40)).collect();
    let col_off: Vec<i16> = (0..rng.gen_range(1..32)).map(|_| rng.gen_range(-40..40)).collect();
    monge(rows, cols, &w, &row_off, &col_off)
}

pub fn is_monge(m: &[Vec<i64>]) -> bool {
    (0..m.len().saturating_sub(1))
        .all(|r| (0..m[0].len() - 1).all(|c| m[r][c] + m[r + 1][c + 1] <= m[r][c + 1] + m[r + 1][c]))
}

pub fn uniform(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = Pcg64::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}
