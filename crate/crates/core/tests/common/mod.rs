//! Fixture loading and independent reference computations shared by the
//! integration tests. The oracles use plain `Vec`s and Gaussian elimination so
//! they share no numerical code with the library.

#![allow(dead_code)]

use std::fs::File;
use std::path::PathBuf;

use notional::config::AnalysisConfig;
use notional::io::{read_table, Table};

pub const TICKERS: [&str; 5] = ["IEF", "IWB", "IWM", "EFA", "EEM"];
pub const SHARES: [f64; 5] = [0.35, 0.40, 0.0, 0.25, 0.0];
pub const ANCHOR: &str = "2009-12-31";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn table(name: &str) -> Table {
    read_table(File::open(fixture(name)).unwrap()).unwrap()
}

pub fn config() -> AnalysisConfig {
    AnalysisConfig::load(&fixture("portf.toml")).unwrap()
}

/// The last 13 weekly dates of the fixture calendar.
pub fn alpha_dates() -> Vec<String> {
    let t = table("prices_anchored.csv");
    let days = t.calendar.days();
    days[days.len() - 13..]
        .iter()
        .map(|d| d.to_string())
        .collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-300, "singular system");
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * y;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Minimizes `|R p - r|` subject to `sum p = 1` through the KKT system
/// `[R'R 1; 1' 0] [p; mu] = [R'r; 1]`. `r_cols[j]` is column `j` of `R`.
pub fn oracle_constrained(r_cols: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let n = r_cols.len();
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    let mut b = vec![0.0; n + 1];
    for j in 0..n {
        for k in 0..n {
            a[j][k] = dot(&r_cols[j], &r_cols[k]);
        }
        a[j][n] = 1.0;
        a[n][j] = 1.0;
        b[j] = dot(&r_cols[j], target);
    }
    b[n] = 1.0;
    let mut x = gauss_solve(a, b);
    x.truncate(n);
    x
}

/// Unconstrained least squares by normal equations.
pub fn oracle_lstsq(cols: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let n = cols.len();
    let a = (0..n)
        .map(|j| (0..n).map(|k| dot(&cols[j], &cols[k])).collect())
        .collect();
    let b = (0..n).map(|j| dot(&cols[j], target)).collect();
    gauss_solve(a, b)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Population mean and standard deviation under uniform weights.
pub fn oracle_mean_sd(x: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mean = x.iter().sum::<f64>() / m;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
    (mean, var.sqrt())
}

pub fn oracle_correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, sa) = oracle_mean_sd(a);
    let (mb, sb) = oracle_mean_sd(b);
    let cov = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / a.len() as f64;
    cov / (sa * sb)
}
