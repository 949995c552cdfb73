//! End-to-end pipeline: loaded prices plus a config to normalized prices,
//! return matrices, solutions and statistics.

use log::info;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::calendar::PeriodSampler;
use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::normalization::{alpha_normalize, point_mass};
use crate::portfolio::{synthesize, Normalization, NotionalShares, PriceMatrix};
use crate::price_series::AdjustedPriceSeries;
use crate::returns::{return_matrix, ReturnKind, ReturnMatrix};
use crate::solver::{solve_return_matrix, ProportionSolution};
use crate::statistics::{annualize, covariance, stats_report, StatsReport, WeightSystem};

/// Securities and the portfolio they hold, on one calendar.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub securities: PriceMatrix,
    pub portfolio: AdjustedPriceSeries,
    /// Present when the portfolio was synthesized from configured shares.
    pub shares: Option<NotionalShares>,
}

impl Dataset {
    /// Splits input columns into securities and portfolio.
    ///
    /// With configured shares the portfolio is synthesized and any input column
    /// carrying the portfolio's name is dropped. Without shares that column
    /// must be present and is used as given.
    pub fn from_columns(
        columns: Vec<AdjustedPriceSeries>,
        config: &AnalysisConfig,
    ) -> Result<Self> {
        let name = &config.portfolio.name;
        let (given, securities): (Vec<_>, Vec<_>) =
            columns.into_iter().partition(|c| c.label() == name);
        if securities.is_empty() {
            return Err(Error::Config("input has no security columns".into()));
        }
        let securities = PriceMatrix::new(securities)?;
        match &config.portfolio.shares {
            Some(map) => {
                let tickers = securities.tickers();
                if let Some(unknown) = map.keys().find(|t| !tickers.contains(t)) {
                    return Err(Error::Config(format!(
                        "unknown ticker `{unknown}` in portfolio"
                    )));
                }
                if !given.is_empty() {
                    info!("input column `{name}` ignored; portfolio is synthesized from shares");
                }
                let shares = tickers
                    .iter()
                    .map(|t| map.get(t).copied().unwrap_or(0.0))
                    .collect();
                let shares = NotionalShares::new(shares, tickers)?;
                let portfolio = synthesize(&securities, &shares)?.with_label(name.clone());
                Ok(Self {
                    securities,
                    portfolio,
                    shares: Some(shares),
                })
            }
            None => {
                let portfolio = given.into_iter().next().ok_or_else(|| {
                    Error::Config(format!(
                        "no `[portfolio] shares` configured and input has no `{name}` column"
                    ))
                })?;
                Ok(Self {
                    securities,
                    portfolio,
                    shares: None,
                })
            }
        }
    }

    /// Securities followed by the portfolio.
    pub fn all_series(&self) -> Vec<AdjustedPriceSeries> {
        let mut all = self.securities.columns().to_vec();
        all.push(self.portfolio.clone());
        all
    }

    /// Tickers with a positive configured share, or every security when the
    /// portfolio was read from input.
    pub fn holdings(&self) -> Vec<String> {
        match &self.shares {
            Some(s) => s
                .tickers()
                .iter()
                .zip(s.shares())
                .filter(|(_, v)| **v > 0.0)
                .map(|(t, _)| t.clone())
                .collect(),
            None => self.securities.tickers(),
        }
    }
}

/// A named normalization resolved against the loaded calendar.
#[derive(Debug, Clone)]
pub struct NamedNormalization {
    pub label: String,
    pub normalization: Normalization,
}

/// A config resolved against a dataset.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub dataset: Dataset,
    /// Never empty; defaults to a point mass on the first market day.
    pub normalizations: Vec<NamedNormalization>,
    pub sampler: PeriodSampler,
    pub weights: WeightSystem,
    pub periods_per_year: f64,
}

impl Analysis {
    pub fn new(dataset: Dataset, config: &AnalysisConfig) -> Result<Self> {
        let calendar = dataset.securities.calendar().clone();
        let mut normalizations = config
            .normalization
            .iter()
            .map(|spec| {
                Ok(NamedNormalization {
                    label: spec.display_label(),
                    normalization: Normalization {
                        alpha: spec.resolve(&calendar)?,
                        level: config.level,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if normalizations.is_empty() {
            normalizations.push(NamedNormalization {
                label: format!("[{}]", calendar.first()),
                normalization: Normalization {
                    alpha: point_mass(&calendar, calendar.first())?,
                    level: config.level,
                },
            });
        }
        let sampler = config.period.resolve(&calendar)?;
        let weights = config.statistics.weights_for(sampler.periods())?;
        Ok(Self {
            dataset,
            normalizations,
            sampler,
            weights,
            periods_per_year: config.statistics.periods_per_year,
        })
    }

    /// Looks up a normalization by label; `None` picks the first.
    pub fn normalization(&self, label: Option<&str>) -> Result<&NamedNormalization> {
        match label {
            None => Ok(&self.normalizations[0]),
            Some(l) => self
                .normalizations
                .iter()
                .find(|n| n.label == l)
                .ok_or_else(|| {
                    let known: Vec<_> = self
                        .normalizations
                        .iter()
                        .map(|n| n.label.as_str())
                        .collect();
                    Error::Config(format!(
                        "unknown normalization `{l}`; known: {}",
                        known.join(", ")
                    ))
                }),
        }
    }

    /// Alpha-normalized securities followed by the portfolio.
    pub fn normalized(&self, n: &Normalization) -> Result<Vec<AdjustedPriceSeries>> {
        self.dataset
            .all_series()
            .iter()
            .map(|s| alpha_normalize(s, &n.alpha, n.level))
            .collect()
    }

    pub fn returns(&self, kind: &ReturnKind) -> Result<ReturnMatrix> {
        return_matrix(
            self.dataset.securities.columns(),
            &self.dataset.portfolio,
            &self.sampler,
            kind,
        )
    }

    /// Compound, continuous, then one linear block per normalization.
    pub fn stats_blocks(&self) -> Result<Vec<StatsBlock>> {
        let mut kinds = vec![
            ("compound".to_string(), ReturnKind::Compound),
            ("continuous".to_string(), ReturnKind::Continuous),
        ];
        for n in &self.normalizations {
            kinds.push((
                format!("{}-denominated linear", n.label),
                ReturnKind::Linear(n.normalization.clone()),
            ));
        }
        kinds
            .into_iter()
            .map(|(title, kind)| {
                let returns = self.returns(&kind)?;
                let proportions = match kind {
                    ReturnKind::Linear(_) => Some(solve_return_matrix(&returns)?),
                    _ => None,
                };
                stats_block(
                    title,
                    &returns,
                    proportions,
                    &self.weights,
                    self.periods_per_year,
                )
            })
            .collect()
    }
}

/// Statistics for one return matrix.
#[derive(Debug, Clone, Serialize)]
pub struct StatsBlock {
    pub title: String,
    /// Proportions recovered from linear returns; absent for other kinds.
    pub proportions: Option<ProportionSolution>,
    pub annualized: StatsReport,
    /// Securities only.
    pub correlation_tickers: Vec<String>,
    pub correlation: Vec<Vec<Option<f64>>>,
}

pub fn stats_block(
    title: String,
    returns: &ReturnMatrix,
    proportions: Option<ProportionSolution>,
    weights: &WeightSystem,
    periods_per_year: f64,
) -> Result<StatsBlock> {
    if weights.len() != returns.periods() {
        return Err(Error::Config(format!(
            "{} weights given for {} return periods",
            weights.len(),
            returns.periods()
        )));
    }
    let report = stats_report(returns.values(), returns.tickers(), weights)?;
    let annualized = annualize(&report, periods_per_year)?;
    let n = returns.n_securities().max(1);
    let block: DMatrix<f64> = returns.values().columns(0, n).into_owned();
    let cov = covariance(&block, weights)?;
    let correlation = (0..n)
        .map(|j| (0..n).map(|k| cov.correlation_at(j, k)).collect())
        .collect();
    Ok(StatsBlock {
        title,
        proportions,
        annualized,
        correlation_tickers: returns.tickers()[..n].to_vec(),
        correlation,
    })
}
