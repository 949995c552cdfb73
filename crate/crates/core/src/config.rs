//! Analysis configuration (TOML).
//!
//! ```toml
//! level = 100.0                  # normalization level, default 100
//!
//! [portfolio]
//! name = "PORTF"                 # default "PORTF"
//! shares = { IEF = 0.35, IWB = 0.40, EFA = 0.25 }
//!
//! [[normalization]]              # first entry is the primary one
//! label = "last 13 weeks"
//! uniform-over = ["2010-10-08", "2010-10-15"]
//!
//! [[normalization]]
//! point-mass = "2009-12-31"
//!
//! [period]
//! rule = "week-ending"           # every-day | week-ending | explicit
//! from = "2010-04-02"            # optional window
//! to = "2010-12-31"
//! # dates = [...]                # explicit rule only
//!
//! [statistics]
//! weights = "uniform"            # or a list of positive weights
//! periods-per-year = 52
//! ```
//!
//! Dates are quoted ISO 8601 strings. When `shares` is omitted the input must
//! carry a column named after the portfolio.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::calendar::{sample_periodic, MarketCalendar, PeriodRule, PeriodSampler};
use crate::error::{Error, Result};
use crate::normalization::{point_mass, uniform_over, AveragingVector, DEFAULT_LEVEL};
use crate::portfolio::DEFAULT_PORTFOLIO_LABEL;
use crate::statistics::{WeightSystem, WEEKS_PER_YEAR};

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default)]
    pub portfolio: PortfolioSpec,
    #[serde(default)]
    pub normalization: Vec<NormalizationSpec>,
    #[serde(default)]
    pub period: PeriodSpec,
    #[serde(default)]
    pub statistics: StatisticsSpec,
}

fn default_level() -> f64 {
    DEFAULT_LEVEL
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PortfolioSpec {
    #[serde(default = "default_portfolio_name")]
    pub name: String,
    pub shares: Option<BTreeMap<String, f64>>,
}

impl Default for PortfolioSpec {
    fn default() -> Self {
        Self {
            name: default_portfolio_name(),
            shares: None,
        }
    }
}

fn default_portfolio_name() -> String {
    DEFAULT_PORTFOLIO_LABEL.to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct NormalizationSpec {
    pub label: Option<String>,
    pub point_mass: Option<String>,
    pub uniform_over: Option<Vec<String>>,
}

impl NormalizationSpec {
    pub fn point_mass(date: &str) -> Self {
        Self {
            label: None,
            point_mass: Some(date.to_string()),
            uniform_over: None,
        }
    }

    pub fn uniform_over<S: AsRef<str>>(dates: &[S]) -> Self {
        Self {
            label: None,
            point_mass: None,
            uniform_over: Some(dates.iter().map(|d| d.as_ref().to_string()).collect()),
        }
    }

    pub fn display_label(&self) -> String {
        if let Some(label) = &self.label {
            return label.clone();
        }
        match (&self.point_mass, &self.uniform_over) {
            (Some(d), _) => format!("[{d}]"),
            (None, Some(ds)) if ds.len() == 1 => format!("[{}]", ds[0]),
            (None, Some(ds)) => format!("uniform over {} days", ds.len()),
            (None, None) => "unspecified".into(),
        }
    }

    pub fn resolve(&self, calendar: &MarketCalendar) -> Result<AveragingVector> {
        match (&self.point_mass, &self.uniform_over) {
            (Some(d), None) => point_mass(calendar, parse_date(d)?),
            (None, Some(ds)) => {
                let dates = ds
                    .iter()
                    .map(|d| parse_date(d))
                    .collect::<Result<Vec<_>>>()?;
                uniform_over(calendar, &dates)
            }
            _ => Err(Error::Config(
                "each normalization needs exactly one of `point-mass` or `uniform-over`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    EveryDay,
    #[default]
    WeekEnding,
    Explicit,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PeriodSpec {
    #[serde(default)]
    pub rule: RuleName,
    pub dates: Option<Vec<String>>,
    pub from: Option<String>,
    pub to: Option<String>,
}

impl PeriodSpec {
    pub fn resolve(&self, calendar: &MarketCalendar) -> Result<PeriodSampler> {
        let rule = match (self.rule, &self.dates) {
            (RuleName::EveryDay, None) => PeriodRule::EveryDay,
            (RuleName::WeekEnding, None) => PeriodRule::WeekEnding,
            (RuleName::Explicit, Some(ds)) => {
                PeriodRule::ExplicitDates(ds.iter().map(|d| parse_date(d)).collect::<Result<_>>()?)
            }
            (RuleName::Explicit, None) => {
                return Err(Error::Config("explicit period rule needs `dates`".into()))
            }
            (_, Some(_)) => {
                return Err(Error::Config(
                    "`dates` is only valid with rule = \"explicit\"".into(),
                ))
            }
        };
        let sampler = sample_periodic(calendar, &rule)?;
        if self.from.is_none() && self.to.is_none() {
            return Ok(sampler);
        }
        let from = self.from.as_deref().map(parse_date).transpose()?;
        let to = self.to.as_deref().map(parse_date).transpose()?;
        sampler.within(from, to)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Named(String),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct StatisticsSpec {
    #[serde(default = "default_weights")]
    pub weights: WeightsSpec,
    #[serde(default = "default_periods_per_year")]
    pub periods_per_year: f64,
}

impl Default for StatisticsSpec {
    fn default() -> Self {
        Self {
            weights: default_weights(),
            periods_per_year: default_periods_per_year(),
        }
    }
}

fn default_weights() -> WeightsSpec {
    WeightsSpec::Named("uniform".into())
}

fn default_periods_per_year() -> f64 {
    WEEKS_PER_YEAR
}

impl StatisticsSpec {
    pub fn weights_for(&self, periods: usize) -> Result<WeightSystem> {
        match &self.weights {
            WeightsSpec::Named(name) if name == "uniform" => WeightSystem::uniform(periods),
            WeightsSpec::Named(name) => {
                Err(Error::Config(format!("unknown weight scheme `{name}`")))
            }
            WeightsSpec::Explicit(w) if w.len() != periods => Err(Error::Config(format!(
                "{} weights given for {periods} return periods",
                w.len()
            ))),
            WeightsSpec::Explicit(w) => {
                WeightSystem::new(w.clone()).map_err(|e| Error::Config(e.to_string()))
            }
        }
    }
}

pub(crate) fn parse_date(s: &str) -> Result<NaiveDate> {
    s.parse()
        .map_err(|_| Error::Config(format!("invalid date `{s}`, expected YYYY-MM-DD")))
}

impl AnalysisConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: AnalysisConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<()> {
        if !(self.level.is_finite() && self.level > 0.0) {
            return Err(Error::Config(format!(
                "level must be positive, found {}",
                self.level
            )));
        }
        if !(self.statistics.periods_per_year.is_finite() && self.statistics.periods_per_year > 0.0)
        {
            return Err(Error::Config("periods-per-year must be positive".into()));
        }
        if let Some(shares) = &self.portfolio.shares {
            if shares.values().any(|s| !(s.is_finite() && *s >= 0.0)) {
                return Err(Error::Config("shares must be nonnegative".into()));
            }
            if shares.values().sum::<f64>() <= 0.0 {
                return Err(Error::Config(
                    "at least one share count must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}
