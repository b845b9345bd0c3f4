//! Wall-clock timing of the element formula and the dense circuit.

use std::hint::black_box;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{apply_uphi_circuit, PhaseConfig, StateVector};
use crate::error::{arg_err, Result};
use crate::fast::uphi_element;
use crate::rng::seeded;

pub const CSV_HEADER: &str = "n,op,mean_ns,stddev";
/// Largest `n` timed for the dense circuit.
pub const MAX_DENSE_BENCH_N: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub op: String,
    pub mean_ns: f64,
    pub stddev: f64,
    /// Fastest batch, per call.
    pub min_ns: f64,
}

fn summarize(n: usize, op: &str, per_call: &[f64]) -> BenchRow {
    let len = per_call.len() as f64;
    let mean = per_call.iter().sum::<f64>() / len;
    let var = if per_call.len() > 1 { per_call.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0) } else { 0.0 };
    BenchRow { n, op: op.to_string(), mean_ns: mean, stddev: var.sqrt(), min_ns: per_call.iter().copied().fold(f64::INFINITY, f64::min) }
}

/// Per-call time of `uphi_element` over `reps` batches of `batch` calls.
pub fn time_element(n: usize, reps: usize, batch: usize, seed: u64) -> Result<BenchRow> {
    let mut rng = seeded(seed);
    let cfg = PhaseConfig::random(n, &mut rng);
    let dim_mask = (1u64 << (n + 1)) - 1;
    let pairs: Vec<(u64, u64)> = (0..batch).map(|_| (rng.random::<u64>() & dim_mask, rng.random::<u64>() & dim_mask)).collect();
    let mut per_call = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, l) in &pairs {
            acc += uphi_element(black_box(k), black_box(l), &cfg)?;
        }
        black_box(acc);
        per_call.push(start.elapsed().as_nanos() as f64 / batch as f64);
    }
    Ok(summarize(n, "element", &per_call))
}

/// Per-call time of applying the gate circuit to a dense state.
pub fn time_dense_apply(n: usize, reps: usize, batch: usize, seed: u64) -> Result<BenchRow> {
    let mut rng = seeded(seed);
    let cfg = PhaseConfig::random(n, &mut rng);
    let mut st = StateVector::new_basis_state(n + 1, 0)?;
    st.apply_hadamard_layer(&(0..=n).collect::<Vec<_>>())?;
    for _ in 0..batch {
        apply_uphi_circuit(&mut st, &cfg)?;
    }
    let mut per_call = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        for _ in 0..batch {
            apply_uphi_circuit(&mut st, &cfg)?;
        }
        black_box(&st);
        per_call.push(start.elapsed().as_nanos() as f64 / batch as f64);
    }
    Ok(summarize(n, "dense_apply", &per_call))
}

/// Element timings for `n_min..=n_max` and dense timings up to
/// [`MAX_DENSE_BENCH_N`].
pub fn run_bench(n_min: usize, n_max: usize, reps: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if n_min == 0 || n_min > n_max || reps == 0 {
        return arg_err("need 1 <= n_min <= n_max and reps >= 1");
    }
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        rows.push(time_element(n, reps, 2000, seed)?);
    }
    for n in n_min..=n_max.min(MAX_DENSE_BENCH_N) {
        let batch = (1usize << 14 >> n.min(14)).max(1);
        rows.push(time_dense_apply(n, reps, batch, seed)?);
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{:.3},{:.3}\n", r.n, r.op, r.mean_ns, r.stddev));
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let len = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let rows = run_bench(2, 3, 2, 1).unwrap();
        let csv = to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,op,mean_ns,stddev"));
        assert_eq!(lines.count(), 4);
        assert!(run_bench(3, 2, 1, 1).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|x| (x as f64, 3.0 * (x as f64).powf(1.5))).collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-12);
    }
}
