//! Market-day-averaging vectors and alpha-normalization.
//!
//! An averaging vector `alpha` has nonnegative weights over every market day
//! of a calendar, summing to one. The alpha-normalized counterpart of a price
//! series `x` at level `L` is `x * L / (alpha . x)`, the unique positive
//! multiple of `x` whose alpha-average is `L`.

use std::collections::HashSet;

use chrono::NaiveDate;

use crate::calendar::MarketCalendar;
use crate::error::{Error, Result};
use crate::price_series::AdjustedPriceSeries;

pub const DEFAULT_LEVEL: f64 = 100.0;

const SUM_TOLERANCE: f64 = 1e-12;

/// Dense nonnegative weights over a calendar, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragingVector {
    calendar: MarketCalendar,
    weights: Vec<f64>,
}

impl AveragingVector {
    pub fn new(calendar: MarketCalendar, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != calendar.len() {
            return Err(Error::LengthMismatch {
                expected: calendar.len(),
                found: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidAveragingVector(format!(
                "weights must be nonnegative, found {w}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidAveragingVector(format!(
                "weights must sum to 1, found {sum}"
            )));
        }
        Ok(Self { calendar, weights })
    }

    pub fn calendar(&self) -> &MarketCalendar {
        &self.calendar
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `alpha . x` over all market days.
    pub fn average(&self, series: &AdjustedPriceSeries) -> Result<f64> {
        self.calendar.ensure_same(series.calendar())?;
        Ok(self.dot(series.prices()))
    }

    pub(crate) fn dot(&self, values: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .filter(|(w, _)| **w != 0.0)
            .map(|(w, v)| w * v)
            .sum()
    }
}

/// All weight on `date`.
pub fn point_mass(calendar: &MarketCalendar, date: NaiveDate) -> Result<AveragingVector> {
    uniform_over(calendar, &[date])
}

/// Weight `1/k` on each of the `k` distinct `dates`.
pub fn uniform_over(calendar: &MarketCalendar, dates: &[NaiveDate]) -> Result<AveragingVector> {
    if dates.is_empty() {
        return Err(Error::InvalidAveragingVector(
            "no dates to average over".into(),
        ));
    }
    let mut seen = HashSet::with_capacity(dates.len());
    let mut weights = vec![0.0; calendar.len()];
    let share = 1.0 / dates.len() as f64;
    for &date in dates {
        if !seen.insert(date) {
            return Err(Error::DuplicateDate(date));
        }
        weights[calendar.position(date)?] = share;
    }
    // k * (1/k) may miss 1 by an ulp or two; the sum check tolerates that.
    AveragingVector::new(calendar.clone(), weights)
}

/// `x * level / (alpha . x)`.
pub fn alpha_normalize(
    series: &AdjustedPriceSeries,
    alpha: &AveragingVector,
    level: f64,
) -> Result<AdjustedPriceSeries> {
    if !(level.is_finite() && level > 0.0) {
        return Err(Error::InvalidScale(level));
    }
    let avg = alpha.average(series)?;
    let factor = level / avg;
    let prices = series.prices().iter().map(|p| p * factor).collect();
    Ok(AdjustedPriceSeries::from_parts(
        series.calendar().clone(),
        prices,
        series.label().to_string(),
    ))
}
