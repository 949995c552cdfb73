//! Notional shares and the portfolios they describe.
//!
//! A static portfolio's adjusted prices are a nonnegative combination of its
//! securities' adjusted prices, `x_P = X s`. Rescaling any column changes the
//! shares but not the day-by-day value proportions, and once every series is
//! alpha-normalized to the same level the shares become proportions that sum
//! to one.

use log::warn;
use nalgebra::{DMatrix, DVector};

use crate::calendar::MarketCalendar;
use crate::error::{Error, Result};
use crate::normalization::{alpha_normalize, AveragingVector};
use crate::price_series::AdjustedPriceSeries;

pub const DEFAULT_PORTFOLIO_LABEL: &str = "PORTF";

/// Columns below this singular-value ratio are treated as dependent.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Recovered proportions below `-NEGATIVE_TOLERANCE` are rejected.
pub const NEGATIVE_TOLERANCE: f64 = 1e-10;

const SUM_WARN_TOLERANCE: f64 = 1e-6;

/// The averaging vector and level a set of prices was normalized with.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub alpha: AveragingVector,
    pub level: f64,
}

/// Adjusted prices of `n >= 1` securities over one calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceMatrix {
    calendar: MarketCalendar,
    columns: Vec<AdjustedPriceSeries>,
    normalization: Option<Normalization>,
}

impl PriceMatrix {
    pub fn new(columns: Vec<AdjustedPriceSeries>) -> Result<Self> {
        let first = columns.first().ok_or_else(|| {
            Error::InvalidShares("price matrix needs at least one security".into())
        })?;
        let calendar = first.calendar().clone();
        for column in &columns[1..] {
            calendar.ensure_same(column.calendar())?;
        }
        Ok(Self {
            calendar,
            columns,
            normalization: None,
        })
    }

    pub fn calendar(&self) -> &MarketCalendar {
        &self.calendar
    }

    pub fn columns(&self) -> &[AdjustedPriceSeries] {
        &self.columns
    }

    pub fn n_securities(&self) -> usize {
        self.columns.len()
    }

    pub fn tickers(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.label().to_string()).collect()
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.normalization.as_ref()
    }

    /// Column for `ticker`, if present.
    pub fn column(&self, ticker: &str) -> Option<&AdjustedPriceSeries> {
        self.columns.iter().find(|c| c.label() == ticker)
    }

    /// Every column alpha-normalized at `level`.
    pub fn alpha_normalized(&self, alpha: &AveragingVector, level: f64) -> Result<PriceMatrix> {
        let columns = self
            .columns
            .iter()
            .map(|c| alpha_normalize(c, alpha, level))
            .collect::<Result<Vec<_>>>()?;
        Ok(PriceMatrix {
            calendar: self.calendar.clone(),
            columns,
            normalization: Some(Normalization {
                alpha: alpha.clone(),
                level,
            }),
        })
    }

    /// Dense `(M+1) x n` matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.calendar.len(), self.columns.len(), |i, j| {
            self.columns[j].prices()[i]
        })
    }
}

/// Nonnegative notional shares, one per security, not all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct NotionalShares {
    shares: Vec<f64>,
    tickers: Vec<String>,
}

impl NotionalShares {
    pub fn new(shares: Vec<f64>, tickers: Vec<String>) -> Result<Self> {
        if shares.len() != tickers.len() {
            return Err(Error::LengthMismatch {
                expected: tickers.len(),
                found: shares.len(),
            });
        }
        if let Some(s) = shares.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::InvalidShares(format!(
                "shares must be nonnegative, found {s}"
            )));
        }
        if shares.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidShares(
                "at least one share count must be positive".into(),
            ));
        }
        Ok(Self { shares, tickers })
    }

    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }
}

/// Proportions of an alpha-notional portfolio; they sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NotionalPortfolio {
    proportions: Vec<f64>,
    tickers: Vec<String>,
    normalization: Option<Normalization>,
}

impl NotionalPortfolio {
    pub fn new(
        proportions: Vec<f64>,
        tickers: Vec<String>,
        normalization: Option<Normalization>,
    ) -> Result<Self> {
        if proportions.len() != tickers.len() {
            return Err(Error::LengthMismatch {
                expected: tickers.len(),
                found: proportions.len(),
            });
        }
        let sum: f64 = proportions.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidShares(format!(
                "proportions must sum to 1, found {sum}"
            )));
        }
        Ok(Self {
            proportions,
            tickers,
            normalization,
        })
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.normalization.as_ref()
    }

    /// The proportions viewed as notional shares in the same price system.
    pub fn as_shares(&self) -> Result<NotionalShares> {
        NotionalShares::new(self.proportions.clone(), self.tickers.clone())
    }
}

/// Day-by-day value proportions `p^c_ij = x_ij s_j / x_iP`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosingPortfolioMatrix {
    calendar: MarketCalendar,
    tickers: Vec<String>,
    values: DMatrix<f64>,
}

impl ClosingPortfolioMatrix {
    pub fn calendar(&self) -> &MarketCalendar {
        &self.calendar
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    /// Rows are market days, columns securities.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn row(&self, day: usize) -> Vec<f64> {
        self.values.row(day).iter().copied().collect()
    }
}

fn check_dims(x: &PriceMatrix, s: &NotionalShares) -> Result<()> {
    if s.shares().len() != x.n_securities() {
        return Err(Error::LengthMismatch {
            expected: x.n_securities(),
            found: s.shares().len(),
        });
    }
    Ok(())
}

/// Portfolio prices `x_P = X s`, labelled [`DEFAULT_PORTFOLIO_LABEL`].
pub fn synthesize(x: &PriceMatrix, s: &NotionalShares) -> Result<AdjustedPriceSeries> {
    check_dims(x, s)?;
    let mut prices = vec![0.0; x.calendar().len()];
    for (column, &share) in x.columns().iter().zip(s.shares()) {
        if share == 0.0 {
            continue;
        }
        for (acc, p) in prices.iter_mut().zip(column.prices()) {
            *acc += p * share;
        }
    }
    AdjustedPriceSeries::new(x.calendar().clone(), prices, DEFAULT_PORTFOLIO_LABEL)
}

/// Market-day-closing portfolios of the static portfolio `X s`.
pub fn closing_portfolios(x: &PriceMatrix, s: &NotionalShares) -> Result<ClosingPortfolioMatrix> {
    let xp = synthesize(x, s)?;
    let values = DMatrix::from_fn(x.calendar().len(), x.n_securities(), |i, j| {
        x.columns()[j].prices()[i] * s.shares()[j] / xp.prices()[i]
    });
    Ok(ClosingPortfolioMatrix {
        calendar: x.calendar().clone(),
        tickers: x.tickers(),
        values,
    })
}

/// Unconstrained least-squares fit of `x_P ~ X p`, before any clean-up.
#[derive(Debug, Clone)]
pub struct NotionalFit {
    /// Least-squares coefficients as solved.
    pub raw: Vec<f64>,
    /// `||X p - x_P|| / ||x_P||` for the raw coefficients.
    pub residual_rel: f64,
    /// Smallest over largest singular value of `X`.
    pub singular_ratio: f64,
}

impl NotionalFit {
    pub fn raw_sum(&self) -> f64 {
        self.raw.iter().sum()
    }
}

/// Least-squares coefficients of `x_P` against the columns of `X`.
pub fn fit_notional(x: &PriceMatrix, xp: &AdjustedPriceSeries) -> Result<NotionalFit> {
    x.calendar().ensure_same(xp.calendar())?;
    let rows = x.calendar().len();
    let cols = x.n_securities();
    if rows < cols {
        return Err(Error::Underdetermined { rows, cols });
    }
    let a = x.to_matrix();
    let b = DVector::from_column_slice(xp.prices());
    let singular = a.singular_values();
    let max = singular.max();
    let singular_ratio = if max > 0.0 { singular.min() / max } else { 0.0 };
    if singular_ratio < RANK_TOLERANCE {
        return Err(Error::RankDeficient {
            ratio: singular_ratio,
        });
    }
    // Householder QR rather than `SVD::solve`: nalgebra's singular vectors lose
    // accuracy on some nearly parallel price columns even though the singular
    // values stay correct.
    let qr = a.clone().qr();
    let p = qr
        .r()
        .solve_upper_triangular(&(qr.q().transpose() * &b))
        .ok_or(Error::RankDeficient { ratio: 0.0 })?;
    let residual_rel = (&a * &p - &b).norm() / b.norm();
    Ok(NotionalFit {
        raw: p.iter().copied().collect(),
        residual_rel,
        singular_ratio,
    })
}

/// Recovers the alpha-notional portfolio of `xp_alpha` with the default
/// negativity tolerance.
pub fn notional_portfolio(
    x_alpha: &PriceMatrix,
    xp_alpha: &AdjustedPriceSeries,
) -> Result<NotionalPortfolio> {
    notional_portfolio_with_tolerance(x_alpha, xp_alpha, NEGATIVE_TOLERANCE)
}

/// As [`notional_portfolio`], rejecting proportions below `-negative_tolerance`.
///
/// Negatives within tolerance are clamped to zero and the result is divided by
/// its sum. Prices printed to a few decimals need a tolerance on the order of
/// the rounding they carry.
pub fn notional_portfolio_with_tolerance(
    x_alpha: &PriceMatrix,
    xp_alpha: &AdjustedPriceSeries,
    negative_tolerance: f64,
) -> Result<NotionalPortfolio> {
    let fit = fit_notional(x_alpha, xp_alpha)?;
    let raw_sum = fit.raw_sum();
    if (raw_sum - 1.0).abs() > SUM_WARN_TOLERANCE {
        warn!("notional proportions sum to {raw_sum:.9}; inputs may not share one normalization");
    }
    let tickers = x_alpha.tickers();
    let mut proportions = fit.raw;
    for (p, ticker) in proportions.iter_mut().zip(&tickers) {
        if *p < -negative_tolerance {
            return Err(Error::NegativeProportion {
                ticker: ticker.clone(),
                value: *p,
            });
        }
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let sum: f64 = proportions.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidShares(
            "recovered proportions are all zero".into(),
        ));
    }
    proportions.iter_mut().for_each(|p| *p /= sum);
    NotionalPortfolio::new(proportions, tickers, x_alpha.normalization().cloned())
}

/// Re-expresses an alpha-notional portfolio in beta-normalized prices:
/// `p_beta_j = (beta . x_alpha_j) / (beta . x_alpha_P) * p_alpha_j`.
pub fn convert_portfolio(
    p_alpha: &NotionalPortfolio,
    x_alpha: &PriceMatrix,
    xp_alpha: &AdjustedPriceSeries,
    beta: &AveragingVector,
) -> Result<NotionalPortfolio> {
    x_alpha.calendar().ensure_same(beta.calendar())?;
    x_alpha.calendar().ensure_same(xp_alpha.calendar())?;
    if p_alpha.proportions().len() != x_alpha.n_securities() {
        return Err(Error::LengthMismatch {
            expected: x_alpha.n_securities(),
            found: p_alpha.proportions().len(),
        });
    }

    let synthesized = synthesize(x_alpha, &p_alpha.as_shares()?)?;
    let mismatch = synthesized
        .prices()
        .iter()
        .zip(xp_alpha.prices())
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    if mismatch > SUM_WARN_TOLERANCE {
        warn!("portfolio prices differ from X p by up to {mismatch:.3e} (relative)");
    }

    let portfolio_avg = beta.average(xp_alpha)?;
    let mut proportions = x_alpha
        .columns()
        .iter()
        .zip(p_alpha.proportions())
        .map(|(column, p)| Ok(beta.average(column)? / portfolio_avg * p))
        .collect::<Result<Vec<f64>>>()?;
    let sum: f64 = proportions.iter().sum();
    if (sum - 1.0).abs() > SUM_WARN_TOLERANCE {
        warn!("converted proportions sum to {sum:.9} before renormalizing");
    }
    proportions.iter_mut().for_each(|p| *p /= sum);

    let level = x_alpha
        .normalization()
        .map_or(crate::normalization::DEFAULT_LEVEL, |n| n.level);
    NotionalPortfolio::new(
        proportions,
        p_alpha.tickers().to_vec(),
        Some(Normalization {
            alpha: beta.clone(),
            level,
        }),
    )
}
