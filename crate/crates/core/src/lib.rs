//! Adjusted closing prices, notional portfolios, alpha-normalization, linear
//! returns and the statistics built on them.

pub mod analysis;
pub mod calendar;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod normalization;
pub mod portfolio;
pub mod price_series;
pub mod returns;
pub mod solver;
pub mod statistics;

pub use calendar::{sample_periodic, MarketCalendar, PeriodRule, PeriodSampler};
pub use error::{Error, Result};
pub use normalization::{alpha_normalize, point_mass, uniform_over, AveragingVector};
pub use portfolio::{
    closing_portfolios, convert_portfolio, notional_portfolio, synthesize, ClosingPortfolioMatrix,
    Normalization, NotionalPortfolio, NotionalShares, PriceMatrix,
};
pub use price_series::{adjust, rescale, AdjustedPriceSeries, CorporateAction, RawCloseSeries};
pub use returns::{return_matrix, ReturnKind, ReturnMatrix};
pub use solver::{solve_proportions, solve_return_matrix, ProportionSolution};
pub use statistics::{annualize, covariance, stats_report, WeightSystem};
