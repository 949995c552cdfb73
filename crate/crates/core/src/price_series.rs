//! Adjusted closing prices built from raw closes and corporate actions.
//!
//! On an ordinary day the adjusted ratio `x_i / x_{i-1}` equals the raw ratio
//! `c_i / c_{i-1}`. On an ex-date it becomes
//!
//! * `c_i / (c_{i-1} - d)` for a cash dividend of `d` per share,
//! * `(1 + s) c_i / c_{i-1}` for a dividend of `s` shares per share,
//! * `tau c_i / c_{i-1}` for a `tau : 1` split.
//!
//! Adjusted prices are only defined up to a positive factor; [`adjust`] pins
//! the factor by fixing the value on one anchor day.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::calendar::MarketCalendar;
use crate::error::{Error, Result};

/// Raw closing prices of one security.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCloseSeries {
    calendar: MarketCalendar,
    closes: Vec<f64>,
    label: String,
}

impl RawCloseSeries {
    pub fn new(
        calendar: MarketCalendar,
        closes: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_positive(&calendar, &closes)?;
        Ok(Self {
            calendar,
            closes,
            label: label.into(),
        })
    }

    pub fn calendar(&self) -> &MarketCalendar {
        &self.calendar
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActionKind {
    /// Currency per share.
    CashDividend(f64),
    /// Shares per share.
    ShareDividend(f64),
    /// `tau : 1` split ratio.
    Split(f64),
}

impl ActionKind {
    fn name(&self) -> &'static str {
        match self {
            ActionKind::CashDividend(_) => "cash-dividend",
            ActionKind::ShareDividend(_) => "share-dividend",
            ActionKind::Split(_) => "split",
        }
    }

    // Composition order on a shared ex-date: cash, then share, then split.
    fn order(&self) -> u8 {
        match self {
            ActionKind::CashDividend(_) => 0,
            ActionKind::ShareDividend(_) => 1,
            ActionKind::Split(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorporateAction {
    pub ex_date: NaiveDate,
    pub kind: ActionKind,
}

impl CorporateAction {
    pub fn cash_dividend(ex_date: NaiveDate, amount: f64) -> Self {
        Self {
            ex_date,
            kind: ActionKind::CashDividend(amount),
        }
    }

    pub fn share_dividend(ex_date: NaiveDate, shares: f64) -> Self {
        Self {
            ex_date,
            kind: ActionKind::ShareDividend(shares),
        }
    }

    pub fn split(ex_date: NaiveDate, ratio: f64) -> Self {
        Self {
            ex_date,
            kind: ActionKind::Split(ratio),
        }
    }
}

/// Positive adjusted closing prices of one security (or portfolio).
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedPriceSeries {
    calendar: MarketCalendar,
    prices: Vec<f64>,
    label: String,
}

impl AdjustedPriceSeries {
    pub fn new(
        calendar: MarketCalendar,
        prices: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_positive(&calendar, &prices)?;
        Ok(Self {
            calendar,
            prices,
            label: label.into(),
        })
    }

    pub fn calendar(&self) -> &MarketCalendar {
        &self.calendar
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Price on `date`.
    pub fn at(&self, date: NaiveDate) -> Result<f64> {
        Ok(self.prices[self.calendar.position(date)?])
    }

    // Callers guarantee positivity.
    pub(crate) fn from_parts(calendar: MarketCalendar, prices: Vec<f64>, label: String) -> Self {
        debug_assert_eq!(calendar.len(), prices.len());
        Self {
            calendar,
            prices,
            label,
        }
    }
}

fn check_positive(calendar: &MarketCalendar, values: &[f64]) -> Result<()> {
    if values.len() != calendar.len() {
        return Err(Error::LengthMismatch {
            expected: calendar.len(),
            found: values.len(),
        });
    }
    match values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(index) => Err(Error::NonPositivePrice {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Builds adjusted prices from raw closes, with `x[anchor] = anchor_value`.
pub fn adjust(
    raw: &RawCloseSeries,
    actions: &[CorporateAction],
    anchor: usize,
    anchor_value: f64,
) -> Result<AdjustedPriceSeries> {
    let closes = raw.closes();
    let n = closes.len();
    if anchor >= n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: anchor + 1,
        });
    }
    if !(anchor_value.is_finite() && anchor_value > 0.0) {
        return Err(Error::InvalidScale(anchor_value));
    }

    let mut by_day: BTreeMap<usize, Vec<ActionKind>> = BTreeMap::new();
    for action in actions {
        let day = raw.calendar().position(action.ex_date)?;
        if day == 0 {
            return Err(Error::InvalidAction {
                date: action.ex_date,
                reason: "ex-date cannot be the first calendar day".into(),
            });
        }
        let kinds = by_day.entry(day).or_default();
        if kinds.iter().any(|k| k.order() == action.kind.order()) {
            return Err(Error::ConflictingAction {
                date: action.ex_date,
                kind: action.kind.name(),
            });
        }
        kinds.push(action.kind);
    }

    let mut ratios = vec![1.0; n];
    for i in 1..n {
        ratios[i] = closes[i] / closes[i - 1];
    }
    for (&day, kinds) in by_day.iter_mut() {
        kinds.sort_by_key(ActionKind::order);
        let date = raw.calendar().days()[day];
        let prior = closes[day - 1];
        let mut ratio = closes[day] / prior;
        for kind in kinds.iter() {
            match *kind {
                ActionKind::CashDividend(d) => {
                    if !(d.is_finite() && d >= 0.0) {
                        return Err(Error::InvalidAction {
                            date,
                            reason: format!("cash dividend must be nonnegative, found {d}"),
                        });
                    }
                    if d >= prior {
                        return Err(Error::InvalidDividend {
                            date,
                            dividend: d,
                            prior_close: prior,
                        });
                    }
                    ratio = closes[day] / (prior - d);
                }
                ActionKind::ShareDividend(s) => {
                    if !(s.is_finite() && s > -1.0) {
                        return Err(Error::InvalidAction {
                            date,
                            reason: format!("share dividend must exceed -1, found {s}"),
                        });
                    }
                    ratio *= 1.0 + s;
                }
                ActionKind::Split(tau) => {
                    if !(tau.is_finite() && tau > 0.0) {
                        return Err(Error::InvalidAction {
                            date,
                            reason: format!("split ratio must be positive, found {tau}"),
                        });
                    }
                    ratio *= tau;
                }
            }
        }
        ratios[day] = ratio;
    }

    let mut prices = vec![0.0; n];
    prices[anchor] = anchor_value;
    for i in anchor + 1..n {
        prices[i] = prices[i - 1] * ratios[i];
    }
    for i in (1..=anchor).rev() {
        prices[i - 1] = prices[i] / ratios[i];
    }
    AdjustedPriceSeries::new(raw.calendar().clone(), prices, raw.label())
}

/// Multiplies every price by `lambda > 0`.
pub fn rescale(series: &AdjustedPriceSeries, lambda: f64) -> Result<AdjustedPriceSeries> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidScale(lambda));
    }
    let prices = series.prices().iter().map(|p| p * lambda).collect();
    AdjustedPriceSeries::new(series.calendar().clone(), prices, series.label())
}
