//! Periodic returns from adjusted prices.
//!
//! Three definitions over a sampled period `x_{k-1} -> x_k`:
//!
//! * compound: `x_k / x_{k-1} - 1`
//! * continuous: `ln(x_k / x_{k-1})`
//! * alpha-denominated linear: `(x_k - x_{k-1}) / (alpha . x)`, where the
//!   average runs over every market day, not only the sampled ones.
//!
//! Only the linear definition is linear in the prices, so only linear returns
//! of a static portfolio are exactly the proportion-weighted sum of its
//! securities' returns. Values are fractions throughout; percent is an I/O
//! concern.

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use crate::calendar::PeriodSampler;
use crate::error::{Error, Result};
use crate::normalization::{alpha_normalize, AveragingVector};
use crate::portfolio::Normalization;
use crate::price_series::AdjustedPriceSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum ReturnKind {
    Compound,
    Continuous,
    Linear(Normalization),
}

impl ReturnKind {
    pub fn linear(alpha: AveragingVector, level: f64) -> Self {
        ReturnKind::Linear(Normalization { alpha, level })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReturnKind::Compound => "compound",
            ReturnKind::Continuous => "continuous",
            ReturnKind::Linear(_) => "linear",
        }
    }
}

/// `m` periodic returns for each security, plus the portfolio as last column.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    period_ends: Vec<NaiveDate>,
    kind: Option<ReturnKind>,
    tickers: Vec<String>,
    values: DMatrix<f64>,
}

impl ReturnMatrix {
    /// Builds a matrix from already computed returns (e.g. read from a file).
    /// The last column is taken to be the portfolio.
    pub fn from_values(
        period_ends: Vec<NaiveDate>,
        tickers: Vec<String>,
        values: DMatrix<f64>,
        kind: Option<ReturnKind>,
    ) -> Result<Self> {
        if values.nrows() != period_ends.len() {
            return Err(Error::LengthMismatch {
                expected: period_ends.len(),
                found: values.nrows(),
            });
        }
        if values.ncols() != tickers.len() || tickers.is_empty() {
            return Err(Error::LengthMismatch {
                expected: tickers.len().max(1),
                found: values.ncols(),
            });
        }
        if matches!(kind, Some(ReturnKind::Compound)) && values.iter().any(|r| *r <= -1.0) {
            return Err(Error::Parse {
                line: 0,
                message: "compound returns must exceed -100%".into(),
            });
        }
        Ok(Self {
            period_ends,
            kind,
            tickers,
            values,
        })
    }

    pub fn period_ends(&self) -> &[NaiveDate] {
        &self.period_ends
    }

    pub fn kind(&self) -> Option<&ReturnKind> {
        self.kind.as_ref()
    }

    /// Securities first, portfolio last.
    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn periods(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_securities(&self) -> usize {
        self.values.ncols() - 1
    }

    /// The `m x n` block of security returns.
    pub fn securities(&self) -> DMatrix<f64> {
        self.values.columns(0, self.n_securities()).into_owned()
    }

    pub fn portfolio(&self) -> DVector<f64> {
        self.values.column(self.n_securities()).into_owned()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }
}

fn sampled(series: &AdjustedPriceSeries, sampler: &PeriodSampler) -> Result<Vec<f64>> {
    series.calendar().ensure_same(sampler.calendar())?;
    sampler.sample(series.prices())
}

pub fn compound_returns(series: &AdjustedPriceSeries, sampler: &PeriodSampler) -> Result<Vec<f64>> {
    let x = sampled(series, sampler)?;
    Ok(x.windows(2).map(|w| w[1] / w[0] - 1.0).collect())
}

pub fn continuous_returns(
    series: &AdjustedPriceSeries,
    sampler: &PeriodSampler,
) -> Result<Vec<f64>> {
    let x = sampled(series, sampler)?;
    Ok(x.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Differences of the alpha-normalized prices divided by `level`.
pub fn linear_returns(
    series: &AdjustedPriceSeries,
    sampler: &PeriodSampler,
    alpha: &AveragingVector,
    level: f64,
) -> Result<Vec<f64>> {
    series.calendar().ensure_same(sampler.calendar())?;
    let normalized = alpha_normalize(series, alpha, level)?;
    let diffs = sampler.differences(normalized.prices())?;
    Ok(diffs.into_iter().map(|d| d / level).collect())
}

pub fn returns_of(
    series: &AdjustedPriceSeries,
    sampler: &PeriodSampler,
    kind: &ReturnKind,
) -> Result<Vec<f64>> {
    match kind {
        ReturnKind::Compound => compound_returns(series, sampler),
        ReturnKind::Continuous => continuous_returns(series, sampler),
        ReturnKind::Linear(n) => linear_returns(series, sampler, &n.alpha, n.level),
    }
}

/// Returns of every security followed by the portfolio.
pub fn return_matrix(
    securities: &[AdjustedPriceSeries],
    portfolio: &AdjustedPriceSeries,
    sampler: &PeriodSampler,
    kind: &ReturnKind,
) -> Result<ReturnMatrix> {
    let m = sampler.periods();
    let columns = securities
        .iter()
        .chain(std::iter::once(portfolio))
        .map(|s| returns_of(s, sampler, kind))
        .collect::<Result<Vec<_>>>()?;
    let values = DMatrix::from_fn(m, columns.len(), |i, j| columns[j][i]);
    let tickers = securities
        .iter()
        .chain(std::iter::once(portfolio))
        .map(|s| s.label().to_string())
        .collect();
    ReturnMatrix::from_values(
        sampler.period_end_dates(),
        tickers,
        values,
        Some(kind.clone()),
    )
}
