//! Weighted return statistics.
//!
//! With period weights `omega` (positive, summing to one): expected return
//! `e_j = omega . r_j`, deviations `z_j = r_j - e_j`, covariance
//! `v_jk = sum_i omega_i z_ij z_ik`. Variances are the weighted second moment
//! as given, with no small-sample correction.
//!
//! For alpha-denominated linear returns the normalizing factor `1/(alpha . x)`
//! scales `e` and `sigma` alike, so `e / sigma` and the correlations do not
//! depend on the normalization at all.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub const WEEKS_PER_YEAR: f64 = 52.0;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Positive period weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    weights: Vec<f64>,
}

impl WeightSystem {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no periods".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!(
                "weights must be positive, found {w}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "weights must sum to 1, found {sum}"
            )));
        }
        Ok(Self { weights })
    }

    pub fn uniform(periods: usize) -> Result<Self> {
        if periods == 0 {
            return Err(Error::InvalidWeights("no periods".into()));
        }
        Ok(Self {
            weights: vec![1.0 / periods as f64; periods],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn check(&self, m: usize) -> Result<()> {
        if m != self.weights.len() {
            return Err(Error::LengthMismatch {
                expected: self.weights.len(),
                found: m,
            });
        }
        Ok(())
    }

    fn dot(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

pub fn expected_return(r: &[f64], omega: &WeightSystem) -> Result<f64> {
    omega.check(r.len())?;
    Ok(omega.dot(r.iter().copied()))
}

/// `z_j = r_j - 1 e_j` for every column.
pub fn deviations(r: &DMatrix<f64>, omega: &WeightSystem) -> Result<DMatrix<f64>> {
    omega.check(r.nrows())?;
    let mut z = r.clone();
    for mut column in z.column_iter_mut() {
        let mean = omega.dot(column.iter().copied());
        column.add_scalar_mut(-mean);
    }
    Ok(z)
}

/// Weighted standard deviation of one column.
pub fn std_dev(r: &[f64], omega: &WeightSystem) -> Result<f64> {
    let e = expected_return(r, omega)?;
    Ok(omega.dot(r.iter().map(|v| (v - e) * (v - e))).sqrt())
}

/// `e / sigma`; undefined when `sigma = 0`.
pub fn return_risk_ratio(r: &[f64], omega: &WeightSystem) -> Result<f64> {
    let e = expected_return(r, omega)?;
    let sigma = std_dev(r, omega)?;
    if sigma == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(e / sigma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceReport {
    /// `V`, symmetric.
    pub covariance: DMatrix<f64>,
    /// `C`; `None` in every row and column of a zero-variance security.
    pub correlation: DMatrix<Option<f64>>,
    /// `Z = [z_1, ..., z_n]`.
    pub deviations: DMatrix<f64>,
    pub std_devs: Vec<f64>,
}

impl CovarianceReport {
    pub fn correlation_at(&self, j: usize, k: usize) -> Option<f64> {
        self.correlation[(j, k)]
    }
}

pub fn covariance(r: &DMatrix<f64>, omega: &WeightSystem) -> Result<CovarianceReport> {
    if r.ncols() == 0 {
        return Err(Error::LengthMismatch {
            expected: 1,
            found: 0,
        });
    }
    let z = deviations(r, omega)?;
    let n = r.ncols();
    let mut v = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let vjk = omega.dot(
                z.column(j)
                    .iter()
                    .zip(z.column(k).iter())
                    .map(|(a, b)| a * b),
            );
            v[(j, k)] = vjk;
            v[(k, j)] = vjk;
        }
    }
    let std_devs: Vec<f64> = (0..n).map(|j| v[(j, j)].max(0.0).sqrt()).collect();
    let correlation = DMatrix::from_fn(n, n, |j, k| {
        let denom = std_devs[j] * std_devs[k];
        if denom > 0.0 {
            Some((v[(j, k)] / denom).clamp(-1.0, 1.0))
        } else {
            None
        }
    });
    Ok(CovarianceReport {
        covariance: v,
        correlation,
        deviations: z,
        std_devs,
    })
}

/// `p' V p`.
pub fn portfolio_variance(v: &DMatrix<f64>, p: &[f64]) -> Result<f64> {
    if !v.is_square() || v.nrows() != p.len() {
        return Err(Error::LengthMismatch {
            expected: v.nrows(),
            found: p.len(),
        });
    }
    let p = DVector::from_column_slice(p);
    Ok((p.transpose() * v * &p)[(0, 0)])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnStats {
    pub ticker: String,
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
    /// `mean / std_dev`, `None` when the column has zero variance.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub columns: Vec<ColumnStats>,
    /// Periods per year applied by [`annualize`], if any.
    pub periods_per_year: Option<f64>,
}

/// Per-column mean, standard deviation and return-risk ratio.
pub fn stats_report(
    r: &DMatrix<f64>,
    tickers: &[String],
    omega: &WeightSystem,
) -> Result<StatsReport> {
    if tickers.len() != r.ncols() {
        return Err(Error::LengthMismatch {
            expected: r.ncols(),
            found: tickers.len(),
        });
    }
    let columns = r
        .column_iter()
        .zip(tickers)
        .map(|(col, ticker)| {
            let col: Vec<f64> = col.iter().copied().collect();
            let mean = expected_return(&col, omega)?;
            let std_dev = std_dev(&col, omega)?;
            Ok(ColumnStats {
                ticker: ticker.clone(),
                mean,
                variance: std_dev * std_dev,
                std_dev,
                ratio: (std_dev > 0.0).then(|| mean / std_dev),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StatsReport {
        columns,
        periods_per_year: None,
    })
}

/// Scales means and variances by `periods_per_year`, deviations and ratios by
/// its square root.
pub fn annualize(report: &StatsReport, periods_per_year: f64) -> Result<StatsReport> {
    if !(periods_per_year.is_finite() && periods_per_year > 0.0) {
        return Err(Error::InvalidScale(periods_per_year));
    }
    let root = periods_per_year.sqrt();
    let columns = report
        .columns
        .iter()
        .map(|c| ColumnStats {
            ticker: c.ticker.clone(),
            mean: c.mean * periods_per_year,
            variance: c.variance * periods_per_year,
            std_dev: c.std_dev * root,
            ratio: c.ratio.map(|r| r * root),
        })
        .collect();
    Ok(StatsReport {
        columns,
        periods_per_year: Some(report.periods_per_year.unwrap_or(1.0) * periods_per_year),
    })
}
