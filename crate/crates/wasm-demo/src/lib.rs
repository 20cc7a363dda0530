//! Browser bindings for `microagg`: cluster a list of numbers, draw a seeded sample, and
//! compare the solvers on the same input.
//!
//! The exported functions are thin wrappers over plain Rust functions, which is what the
//! native tests exercise.

use microagg::cli::bench_data;
use microagg::solvers::{
    finish, solve_classic_n2, solve_simple, solve_simple_plus, solve_staggered, solve_wilber,
};
use microagg::{solve, Algorithm, CostCalculator, CostKind, SolverOptions, SortedDataset, SumMode};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct DemoClustering {
    labels: Vec<u32>,
    representatives: Vec<f64>,
    sizes: Vec<u32>,
    total_cost: f64,
    algorithm: String,
    warning: Option<String>,
}

#[wasm_bindgen]
impl DemoClustering {
    /// Cluster id of every input value, in input order.
    #[wasm_bindgen(getter)]
    pub fn labels(&self) -> Vec<u32> {
        self.labels.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn representatives(&self) -> Vec<f64> {
        self.representatives.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn sizes(&self) -> Vec<u32> {
        self.sizes.clone()
    }

    #[wasm_bindgen(getter, js_name = totalCost)]
    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    #[wasm_bindgen(getter)]
    pub fn algorithm(&self) -> String {
        self.algorithm.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn warning(&self) -> Option<String> {
        self.warning.clone()
    }
}

pub fn cluster_values(values: &[f64], k: usize, cost: &str, algorithm: &str) -> microagg::Result<DemoClustering> {
    let kind: CostKind = cost.parse()?;
    let algorithm: Algorithm = algorithm.parse()?;
    let c = solve(values, k, kind, &SolverOptions::with_algorithm(algorithm))?;
    Ok(DemoClustering {
        labels: c.labels.iter().map(|&l| l as u32).collect(),
        representatives: c.representatives.clone(),
        sizes: c.sizes().map(|s| s as u32).collect(),
        total_cost: c.total_cost,
        algorithm: c.algorithm_used.to_string(),
        warning: c.warning.map(|w| w.to_string()),
    })
}

/// Optimal clustering of `values` with clusters of at least `k`.
#[wasm_bindgen]
pub fn cluster(values: Vec<f64>, k: usize, cost: &str, algorithm: &str) -> Result<DemoClustering, JsError> {
    cluster_values(&values, k, cost, algorithm).map_err(|e| JsError::new(&e.to_string()))
}

/// `n` values in `[0, 100)` gathered around `bumps` centres; the same seed gives the
/// same sample.
#[wasm_bindgen]
pub fn sample(n: usize, bumps: usize, seed: u64) -> Vec<f64> {
    let bumps = bumps.max(1) as f64;
    let u = bench_data(2 * n, seed);
    u.chunks_exact(2)
        .map(|p| {
            let centre = (p[0] * bumps).floor() + 0.5;
            // triangular spread around the centre, narrower than the gap between centres
            let offset = (p[1] - 0.5) * (p[0] * bumps).fract() * 0.8;
            (centre + offset) * 100.0 / bumps
        })
        .collect()
}

/// One row of a solver comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverRow {
    pub algorithm: Algorithm,
    pub total_cost: f64,
    pub clusters: usize,
    pub evaluations: u64,
}

pub fn compare_solvers(values: &[f64], k: usize, cost: &str) -> microagg::Result<Vec<SolverRow>> {
    let kind: CostKind = cost.parse()?;
    let sorted = SortedDataset::from_unsorted(values)?;
    let calc = CostCalculator::new(sorted, k, kind, SumMode::FullPrefix)?;
    if calc.len() < 2 * k {
        return Err(microagg::Error::Argument(format!(
            "need at least 2k = {} values to compare solvers",
            2 * k
        )));
    }
    Algorithm::CONCRETE
        .iter()
        .map(|&algorithm| {
            let implicit = match algorithm {
                Algorithm::ClassicN2 => solve_classic_n2(&calc)?,
                Algorithm::Simple => solve_simple(&calc, false)?,
                Algorithm::SimplePlus => solve_simple_plus(&calc, false)?,
                Algorithm::Staggered => solve_staggered(&calc, false)?,
                _ => solve_wilber(&calc)?,
            };
            let c = finish(&calc, &implicit, algorithm)?;
            Ok(SolverRow {
                algorithm,
                total_cost: c.total_cost,
                clusters: c.num_clusters(),
                evaluations: implicit.evaluations,
            })
        })
        .collect()
}

/// Runs every solver on `values` and returns a small HTML table of costs and the number
/// of window costs each one evaluated.
#[wasm_bindgen]
pub fn compare(values: Vec<f64>, k: usize, cost: &str) -> Result<String, JsError> {
    let rows = compare_solvers(&values, k, cost).map_err(|e| JsError::new(&e.to_string()))?;
    let mut html = String::from(
        "<table><thead><tr><th>solver</th><th>total cost</th><th>clusters</th><th>cost evaluations</th></tr></thead><tbody>",
    );
    for r in rows {
        html.push_str(&format!(
            "<tr><td>{}</td><td>{:.6}</td><td>{}</td><td>{}</td></tr>",
            r.algorithm, r.total_cost, r.clusters, r.evaluations
        ));
    }
    html.push_str("</tbody></table>");
    Ok(html)
}
