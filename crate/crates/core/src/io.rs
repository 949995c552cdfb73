//! CSV reading and writing.
//!
//! Price files have a `date,<ticker>,...` header and one row per market day,
//! dates in ISO 8601 and strictly increasing, every price positive. Return
//! files share the layout but hold percentages, with the portfolio in the last
//! column. Output always uses `,` separators and `\n` line endings.

use std::io::{Read, Write};

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::calendar::MarketCalendar;
use crate::error::{Error, Result};
use crate::price_series::AdjustedPriceSeries;
use crate::returns::ReturnMatrix;

/// Number formatting for emitted CSVs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Decimals(usize),
    /// Shortest representation that parses back to the same `f64`.
    RoundTrip,
}

impl Precision {
    pub fn format(self, value: f64) -> String {
        match self {
            Precision::Decimals(d) => {
                let s = format!("{value:.d$}");
                // Avoid "-0.000".
                if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
                    s[1..].to_string()
                } else {
                    s
                }
            }
            Precision::RoundTrip => format!("{value:?}"),
        }
    }
}

/// A parsed CSV table: calendar plus one numeric column per ticker.
#[derive(Debug, Clone)]
pub struct Table {
    pub calendar: MarketCalendar,
    pub tickers: Vec<String>,
    /// Column-major values.
    pub columns: Vec<Vec<f64>>,
}

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads any `date,<col>,...` table of finite numbers.
pub fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| parse_error(1, format!("cannot read header: {e}")))?
        .clone();
    if headers.get(0).map(|h| h.eq_ignore_ascii_case("date")) != Some(true) {
        return Err(parse_error(1, "first header cell must be `date`"));
    }
    let tickers: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if tickers.iter().any(|t| t.is_empty()) {
        return Err(parse_error(1, "empty column name"));
    }
    for (i, t) in tickers.iter().enumerate() {
        if tickers[..i].contains(t) {
            return Err(parse_error(1, format!("duplicate column `{t}`")));
        }
    }

    let mut dates = Vec::new();
    let mut columns = vec![Vec::new(); tickers.len()];
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != tickers.len() + 1 {
            return Err(parse_error(
                line,
                format!(
                    "expected {} cells, found {}",
                    tickers.len() + 1,
                    record.len()
                ),
            ));
        }
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|_| parse_error(line, format!("invalid date `{}`", &record[0])))?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(parse_error(
                    line,
                    format!("date {date} does not follow {prev}"),
                ));
            }
        }
        dates.push(date);
        for (j, cell) in record.iter().skip(1).enumerate() {
            if cell.is_empty() {
                return Err(parse_error(
                    line,
                    format!("missing value for `{}`", tickers[j]),
                ));
            }
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    parse_error(
                        line,
                        format!("invalid number `{cell}` for `{}`", tickers[j]),
                    )
                })?;
            columns[j].push(value);
        }
    }
    if dates.is_empty() {
        return Err(parse_error(1, "no data rows"));
    }
    Ok(Table {
        calendar: MarketCalendar::new(dates)?,
        tickers,
        columns,
    })
}

/// Reads adjusted prices; every value must be positive.
pub fn read_prices<R: Read>(reader: R) -> Result<Vec<AdjustedPriceSeries>> {
    let table = read_table(reader)?;
    table
        .columns
        .into_iter()
        .zip(table.tickers)
        .map(|(values, ticker)| {
            AdjustedPriceSeries::new(table.calendar.clone(), values, ticker).map_err(|e| match e {
                // +2: header line and 1-based numbering.
                Error::NonPositivePrice { index, value } => parse_error(
                    index as u64 + 2,
                    format!(
                        "price must be positive, found {value} on {}",
                        table.calendar.days()[index]
                    ),
                ),
                other => other,
            })
        })
        .collect()
}

/// Reads a returns file in percent; the last column is the portfolio.
pub fn read_returns<R: Read>(reader: R) -> Result<ReturnMatrix> {
    let table = read_table(reader)?;
    let m = table.calendar.len();
    let values = DMatrix::from_fn(m, table.tickers.len(), |i, j| table.columns[j][i] / 100.0);
    ReturnMatrix::from_values(table.calendar.days().to_vec(), table.tickers, values, None)
}

pub fn write_prices<W: Write>(
    mut out: W,
    series: &[AdjustedPriceSeries],
    precision: Precision,
) -> Result<()> {
    let Some(first) = series.first() else {
        return Ok(());
    };
    write!(out, "date")?;
    for s in series {
        write!(out, ",{}", s.label())?;
    }
    writeln!(out)?;
    for (i, date) in first.calendar().days().iter().enumerate() {
        write!(out, "{date}")?;
        for s in series {
            write!(out, ",{}", precision.format(s.prices()[i]))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes returns as percentages.
pub fn write_returns<W: Write>(
    mut out: W,
    returns: &ReturnMatrix,
    precision: Precision,
) -> Result<()> {
    write!(out, "date")?;
    for t in returns.tickers() {
        write!(out, ",{t}")?;
    }
    writeln!(out)?;
    for (i, date) in returns.period_ends().iter().enumerate() {
        write!(out, "{date}")?;
        for j in 0..returns.tickers().len() {
            write!(
                out,
                ",{}",
                precision.format(returns.values()[(i, j)] * 100.0)
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}
