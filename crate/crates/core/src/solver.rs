//! Sum-constrained least squares for portfolio proportions.
//!
//! Minimizes `||R p - r_P||_2` subject to `1' p = 1`, with no sign
//! constraint. The constraint is eliminated by writing `p = e_1 + N z`, where
//! the columns of `N` (`e_j - e_1`, `j >= 2`) span the sum-zero subspace, and
//! the remaining unconstrained problem in `z` is solved by Householder QR.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::portfolio::RANK_TOLERANCE;
use crate::returns::ReturnMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionSolution {
    pub tickers: Vec<String>,
    /// Sums to one.
    pub proportions: Vec<f64>,
    /// `||R p - r_P||_2` in fractional-return units.
    pub residual_abs: f64,
    /// `residual_abs / ||r_P||_2`.
    pub residual_rel: f64,
    /// Smallest over largest singular value of `R`.
    pub singular_ratio: f64,
}

/// Solves for proportions with the portfolio as the last column of `returns`.
pub fn solve_return_matrix(returns: &ReturnMatrix) -> Result<ProportionSolution> {
    let mut solution = solve_proportions(&returns.securities(), &returns.portfolio())?;
    solution.tickers = returns.tickers()[..returns.n_securities()].to_vec();
    Ok(solution)
}

pub fn solve_proportions(r: &DMatrix<f64>, rp: &DVector<f64>) -> Result<ProportionSolution> {
    let (m, n) = r.shape();
    if rp.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: rp.len(),
        });
    }
    if n == 0 {
        return Err(Error::Underdetermined { rows: m, cols: 0 });
    }
    if m < n {
        return Err(Error::Underdetermined { rows: m, cols: n });
    }

    let singular = r.singular_values();
    let max = singular.max();
    let singular_ratio = if max > 0.0 { singular.min() / max } else { 0.0 };
    if singular_ratio < RANK_TOLERANCE {
        return Err(Error::RankDeficient {
            ratio: singular_ratio,
        });
    }

    let first = r.column(0).into_owned();
    let mut p = DVector::zeros(n);
    if n == 1 {
        p[0] = 1.0;
    } else {
        // R N has columns r_j - r_1 for j >= 2.
        let reduced = DMatrix::from_fn(m, n - 1, |i, k| r[(i, k + 1)] - first[i]);
        let rhs = rp - &first;
        let qr = reduced.qr();
        let qtb = qr.q().transpose() * rhs;
        let z = qr
            .r()
            .solve_upper_triangular(&qtb)
            .ok_or(Error::RankDeficient { ratio: 0.0 })?;
        p[0] = 1.0 - z.sum();
        p.rows_mut(1, n - 1).copy_from(&z);
    }

    let residual_abs = (r * &p - rp).norm();
    let target = rp.norm();
    let residual_rel = if target > 0.0 {
        residual_abs / target
    } else if residual_abs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    Ok(ProportionSolution {
        tickers: (0..n).map(|j| format!("#{}", j + 1)).collect(),
        proportions: p.iter().copied().collect(),
        residual_abs,
        residual_rel,
        singular_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_recovery_small() {
        let r = DMatrix::from_row_slice(4, 2, &[0.01, 0.02, -0.01, 0.03, 0.02, -0.01, 0.00, 0.01]);
        let p = DVector::from_vec(vec![0.25, 0.75]);
        let rp = &r * &p;
        let sol = solve_proportions(&r, &rp).unwrap();
        assert!((sol.proportions[0] - 0.25).abs() < 1e-12);
        assert!((sol.proportions[1] - 0.75).abs() < 1e-12);
        assert!(sol.residual_abs < 1e-15);
    }

    #[test]
    fn single_column_is_all_in() {
        let r = DMatrix::from_row_slice(2, 1, &[0.01, 0.02]);
        let rp = DVector::from_vec(vec![0.02, 0.01]);
        let sol = solve_proportions(&r, &rp).unwrap();
        assert_eq!(sol.proportions, vec![1.0]);
        assert!((sol.residual_abs - (2.0f64 * 1e-4).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn underdetermined() {
        let r = DMatrix::from_row_slice(1, 2, &[0.01, 0.02]);
        let rp = DVector::from_vec(vec![0.0]);
        assert!(matches!(
            solve_proportions(&r, &rp),
            Err(Error::Underdetermined { rows: 1, cols: 2 })
        ));
    }

    #[test]
    fn collinear_columns() {
        let r = DMatrix::from_row_slice(3, 2, &[0.01, 0.01, 0.02, 0.02, -0.01, -0.01]);
        let rp = DVector::from_vec(vec![0.01, 0.02, -0.01]);
        assert!(matches!(
            solve_proportions(&r, &rp),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn zero_target() {
        let r = DMatrix::from_row_slice(3, 2, &[0.01, -0.01, 0.02, -0.02, 0.03, 0.01]);
        let rp = DVector::zeros(3);
        let sol = solve_proportions(&r, &rp).unwrap();
        assert!((sol.proportions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(sol.residual_rel.is_infinite() || sol.residual_abs == 0.0);
    }
}
