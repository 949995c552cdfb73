//! Market-day calendars and periodic sampling.
//!
//! A [`MarketCalendar`] is the ordered index set shared by every series in an
//! analysis. Dates are opaque ordered labels: no sessions, no time zones.
//! A [`PeriodSampler`] picks `m + 1` successive periodic market days out of the
//! calendar's `M + 1`; differencing the sampled values yields `m` periodic
//! changes.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use chrono::{Datelike, NaiveDate, Weekday};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Strictly increasing, nonempty list of market days.
///
/// Cloning is cheap; clones share storage.
#[derive(Clone)]
pub struct MarketCalendar {
    days: Arc<[NaiveDate]>,
}

impl MarketCalendar {
    pub fn new(days: Vec<NaiveDate>) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::EmptyCalendar);
        }
        for pair in days.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::UnorderedCalendar {
                    prev: pair[0],
                    next: pair[1],
                });
            }
        }
        Ok(Self { days: days.into() })
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn first(&self) -> NaiveDate {
        self.days[0]
    }

    pub fn last(&self) -> NaiveDate {
        self.days[self.days.len() - 1]
    }

    /// Position of `date`, or [`Error::UnknownDate`].
    pub fn position(&self, date: NaiveDate) -> Result<usize> {
        self.days
            .binary_search(&date)
            .map_err(|_| Error::UnknownDate(date))
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.days.binary_search(&date).is_ok()
    }

    /// True when both calendars list the same days.
    pub fn same_as(&self, other: &MarketCalendar) -> bool {
        Arc::ptr_eq(&self.days, &other.days) || self.days == other.days
    }

    pub(crate) fn ensure_same(&self, other: &MarketCalendar) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::CalendarMismatch)
        }
    }
}

impl PartialEq for MarketCalendar {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for MarketCalendar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MarketCalendar({} days, {}..={})",
            self.len(),
            self.first(),
            self.last()
        )
    }
}

/// How a [`PeriodSampler`] chooses the last market day of each period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodRule {
    EveryDay,
    /// Last listed market day on or before Friday of each ISO week. A Friday
    /// holiday therefore falls back to Thursday (or earlier).
    WeekEnding,
    ExplicitDates(Vec<NaiveDate>),
}

/// Ordered positions `i_0 < i_1 < ... < i_m` into a calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSampler {
    calendar: MarketCalendar,
    indices: Vec<usize>,
}

/// Picks the last market day of each period under `rule`.
pub fn sample_periodic(calendar: &MarketCalendar, rule: &PeriodRule) -> Result<PeriodSampler> {
    let indices = match rule {
        PeriodRule::EveryDay => (0..calendar.len()).collect(),
        PeriodRule::WeekEnding => week_ending_positions(calendar.days()),
        PeriodRule::ExplicitDates(dates) => {
            let mut seen = HashSet::with_capacity(dates.len());
            let mut positions = Vec::with_capacity(dates.len());
            for &date in dates {
                if !seen.insert(date) {
                    return Err(Error::DuplicateDate(date));
                }
                positions.push(calendar.position(date)?);
            }
            positions.sort_unstable();
            positions
        }
    };
    PeriodSampler::new(calendar.clone(), indices)
}

fn week_ending_positions(days: &[NaiveDate]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut current_week = None;
    let mut candidate: Option<usize> = None;
    for (i, day) in days.iter().enumerate() {
        let week = day.iso_week();
        let key = (week.year(), week.week());
        if current_week != Some(key) {
            out.extend(candidate.take());
            current_week = Some(key);
        }
        if day.weekday().number_from_monday() <= Weekday::Fri.number_from_monday() {
            candidate = Some(i);
        }
    }
    out.extend(candidate);
    out
}

impl PeriodSampler {
    pub fn new(calendar: MarketCalendar, indices: Vec<usize>) -> Result<Self> {
        if indices.len() < 2 {
            return Err(Error::DegenerateSampler {
                count: indices.len(),
            });
        }
        let in_bounds = indices.iter().all(|&i| i < calendar.len());
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        if !in_bounds || !increasing {
            return Err(Error::InvalidSampler {
                len: calendar.len(),
            });
        }
        Ok(Self { calendar, indices })
    }

    /// Keeps only sampled days within `[from, to]` (either bound optional).
    pub fn within(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Self> {
        let days = self.calendar.days();
        let indices = self
            .indices
            .iter()
            .copied()
            .filter(|&i| from.is_none_or(|f| days[i] >= f) && to.is_none_or(|t| days[i] <= t))
            .collect();
        Self::new(self.calendar.clone(), indices)
    }

    pub fn calendar(&self) -> &MarketCalendar {
        &self.calendar
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of return periods, `m`.
    pub fn periods(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.indices
            .iter()
            .map(|&i| self.calendar.days()[i])
            .collect()
    }

    /// Dates that close each return period (all sampled dates but the first).
    pub fn period_end_dates(&self) -> Vec<NaiveDate> {
        self.dates().split_off(1)
    }

    /// Sampled values `x[i_0], ..., x[i_m]`.
    pub fn sample(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.calendar.len() {
            return Err(Error::LengthMismatch {
                expected: self.calendar.len(),
                found: values.len(),
            });
        }
        Ok(self.indices.iter().map(|&i| values[i]).collect())
    }

    /// Successive differences of the sampled values.
    pub fn differences(&self, values: &[f64]) -> Result<Vec<f64>> {
        let sampled = self.sample(values)?;
        Ok(sampled.windows(2).map(|w| w[1] - w[0]).collect())
    }

    /// The `(m+1) x (M+1)` 0/1 matrix that selects the sampled rows.
    pub fn selection_matrix(&self) -> DMatrix<f64> {
        let mut theta = DMatrix::zeros(self.indices.len(), self.calendar.len());
        for (k, &i) in self.indices.iter().enumerate() {
            theta[(k, i)] = 1.0;
        }
        theta
    }

    /// The `m x (m+1)` first-difference matrix.
    pub fn difference_matrix(&self) -> DMatrix<f64> {
        let m = self.periods();
        let mut delta = DMatrix::zeros(m, m + 1);
        for i in 0..m {
            delta[(i, i)] = -1.0;
            delta[(i, i + 1)] = 1.0;
        }
        delta
    }
}
