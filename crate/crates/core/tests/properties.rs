mod common;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use common::{oracle_constrained, oracle_lstsq};
use notional::calendar::{sample_periodic, MarketCalendar, PeriodRule};
use notional::io::{read_prices, write_prices, Precision};
use notional::portfolio::closing_portfolios;
use notional::returns::{return_matrix, ReturnKind};
use notional::statistics::{covariance, return_risk_ratio};
use notional::*;

fn calendar(m: usize) -> MarketCalendar {
    let start: NaiveDate = "2010-01-04".parse().unwrap();
    MarketCalendar::new(
        (0..m as u64)
            .map(|i| start + chrono::Days::new(i))
            .collect(),
    )
    .unwrap()
}

/// `n` positive random walks of length `m`.
fn walks(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(
        (
            10.0..200.0f64,
            proptest::collection::vec(-0.05..0.05f64, m - 1),
        ),
        n,
    )
    .prop_map(|cols| {
        cols.into_iter()
            .map(|(start, steps)| {
                let mut p = start;
                std::iter::once(start)
                    .chain(steps.into_iter().map(|s| {
                        p *= 1.0 + s;
                        p
                    }))
                    .collect()
            })
            .collect()
    })
}

fn weights(m: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01..1.0f64, m).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    })
}

#[derive(Debug)]
struct Market {
    cal: MarketCalendar,
    securities: Vec<AdjustedPriceSeries>,
    x: PriceMatrix,
    xp: AdjustedPriceSeries,
    shares: NotionalShares,
}

fn market(cols: Vec<Vec<f64>>, shares: Vec<f64>) -> Market {
    let cal = calendar(cols[0].len());
    let securities: Vec<_> = cols
        .into_iter()
        .enumerate()
        .map(|(j, c)| AdjustedPriceSeries::new(cal.clone(), c, format!("S{j}")).unwrap())
        .collect();
    let x = PriceMatrix::new(securities.clone()).unwrap();
    let shares = NotionalShares::new(shares, x.tickers()).unwrap();
    let xp = synthesize(&x, &shares).unwrap();
    Market {
        cal,
        securities,
        x,
        xp,
        shares,
    }
}

fn market_strategy() -> impl Strategy<Value = (Market, Vec<f64>)> {
    (8usize..25, 1usize..5)
        .prop_flat_map(|(m, n)| {
            (
                walks(m, n),
                proptest::collection::vec(0.1..5.0f64, n),
                weights(m),
            )
        })
        .prop_map(|(cols, shares, alpha)| (market(cols, shares), alpha))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn linear_returns_recover_alpha_portfolio((mk, w) in market_strategy()) {
        let alpha = AveragingVector::new(mk.cal.clone(), w).unwrap();
        let sampler = sample_periodic(&mk.cal, &PeriodRule::EveryDay).unwrap();
        let r = return_matrix(&mk.securities, &mk.xp, &sampler, &ReturnKind::linear(alpha.clone(), 100.0)).unwrap();
        let sol = solve_return_matrix(&r).unwrap();
        let p = notional_portfolio(
            &mk.x.alpha_normalized(&alpha, 100.0).unwrap(),
            &alpha_normalize(&mk.xp, &alpha, 100.0).unwrap(),
        ).unwrap();
        prop_assert!(sol.residual_abs < 1e-12, "residual {}", sol.residual_abs);
        prop_assert!(max_abs_diff(&sol.proportions, p.proportions()) < 1e-8);
    }

    #[test]
    fn compound_at_least_continuous((mk, _) in market_strategy()) {
        let sampler = sample_periodic(&mk.cal, &PeriodRule::EveryDay).unwrap();
        let c = return_matrix(&mk.securities, &mk.xp, &sampler, &ReturnKind::Compound).unwrap();
        let l = return_matrix(&mk.securities, &mk.xp, &sampler, &ReturnKind::Continuous).unwrap();
        prop_assert!(c.values().iter().zip(l.values().iter()).all(|(a, b)| a >= b));
    }

    #[test]
    fn normalization_idempotent_and_scale_free((mk, w) in market_strategy(), lambda in 0.01..100.0f64) {
        let alpha = AveragingVector::new(mk.cal.clone(), w).unwrap();
        let once = alpha_normalize(&mk.xp, &alpha, 100.0).unwrap();
        let twice = alpha_normalize(&once, &alpha, 100.0).unwrap();
        let scaled = alpha_normalize(&rescale(&mk.xp, lambda).unwrap(), &alpha, 100.0).unwrap();
        prop_assert!(max_abs_diff(once.prices(), twice.prices()) < 1e-10);
        prop_assert!(max_abs_diff(once.prices(), scaled.prices()) < 1e-10);
        prop_assert!((alpha.average(&once).unwrap() - 100.0).abs() < 1e-10);
    }

    #[test]
    fn notional_portfolio_sums_to_one_and_matches_oracle((mk, w) in market_strategy()) {
        let alpha = AveragingVector::new(mk.cal.clone(), w).unwrap();
        let xa = mk.x.alpha_normalized(&alpha, 100.0).unwrap();
        let xpa = alpha_normalize(&mk.xp, &alpha, 100.0).unwrap();
        let p = notional_portfolio(&xa, &xpa).unwrap();
        prop_assert!((p.proportions().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let cols: Vec<Vec<f64>> = xa.columns().iter().map(|c| c.prices().to_vec()).collect();
        let oracle = oracle_lstsq(&cols, xpa.prices());
        prop_assert!(max_abs_diff(p.proportions(), &oracle) < 1e-8);
    }

    #[test]
    fn conversion_agrees_with_direct_fit((mk, w) in market_strategy()) {
        let alpha = AveragingVector::new(mk.cal.clone(), w).unwrap();
        let beta = point_mass(&mk.cal, mk.cal.last()).unwrap();
        let xa = mk.x.alpha_normalized(&alpha, 100.0).unwrap();
        let xpa = alpha_normalize(&mk.xp, &alpha, 100.0).unwrap();
        let pa = notional_portfolio(&xa, &xpa).unwrap();
        let converted = convert_portfolio(&pa, &xa, &xpa, &beta).unwrap();
        let direct = notional_portfolio(
            &mk.x.alpha_normalized(&beta, 100.0).unwrap(),
            &alpha_normalize(&mk.xp, &beta, 100.0).unwrap(),
        ).unwrap();
        prop_assert!(max_abs_diff(converted.proportions(), direct.proportions()) < 1e-8);
    }

    #[test]
    fn closing_rows_sum_to_one((mk, _) in market_strategy()) {
        let pc = closing_portfolios(&mk.x, &mk.shares).unwrap();
        for i in 0..mk.cal.len() {
            prop_assert!((pc.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ratio_and_correlation_normalization_free(
        (mk, w) in market_strategy(),
        w2 in weights(25),
        lambdas in proptest::collection::vec(0.01..100.0f64, 5),
    ) {
        let m = mk.cal.len();
        let w2: Vec<f64> = {
            let head = &w2[..m];
            let total: f64 = head.iter().sum();
            head.iter().map(|v| v / total).collect()
        };
        let a1 = AveragingVector::new(mk.cal.clone(), w).unwrap();
        let a2 = AveragingVector::new(mk.cal.clone(), w2).unwrap();
        let sampler = sample_periodic(&mk.cal, &PeriodRule::EveryDay).unwrap();
        let scaled: Vec<_> = mk.securities.iter().zip(&lambdas).map(|(s, l)| rescale(s, *l).unwrap()).collect();
        let r1 = return_matrix(&mk.securities, &mk.xp, &sampler, &ReturnKind::linear(a1, 100.0)).unwrap();
        let r2 = return_matrix(&scaled, &mk.xp, &sampler, &ReturnKind::linear(a2, 100.0)).unwrap();
        let omega = WeightSystem::uniform(r1.periods()).unwrap();
        for j in 0..r1.values().ncols() {
            match (return_risk_ratio(&r1.column(j), &omega), return_risk_ratio(&r2.column(j), &omega)) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-8 * a.abs().max(1.0)),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "ratio defined for one normalization only"),
            }
        }
        let c1 = covariance(r1.values(), &omega).unwrap().correlation;
        let c2 = covariance(r2.values(), &omega).unwrap().correlation;
        for (a, b) in c1.iter().zip(c2.iter()) {
            match (a, b) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-10),
                (None, None) => {}
                _ => prop_assert!(false, "correlation defined for one normalization only"),
            }
        }
    }

    #[test]
    fn solver_kkt_and_oracle(
        r in proptest::collection::vec(-0.05..0.05f64, 18),
        rp in proptest::collection::vec(-0.05..0.05f64, 6),
    ) {
        let r = DMatrix::from_column_slice(6, 3, &r);
        let rp = DVector::from_vec(rp);
        // Skip draws too close to collinear for a meaningful comparison.
        let sv = r.singular_values();
        prop_assume!(sv.min() / sv.max() > 1e-3);
        let sol = solve_proportions(&r, &rp).unwrap();
        let p = DVector::from_column_slice(&sol.proportions);
        prop_assert!((p.sum() - 1.0).abs() < 1e-12);
        let residual = &r * &p - &rp;
        for j in 1..3 {
            prop_assert!((r.column(j) - r.column(0)).dot(&residual).abs() < 1e-12);
        }
        let cols: Vec<Vec<f64>> = (0..3).map(|j| r.column(j).iter().copied().collect()).collect();
        let oracle = oracle_constrained(&cols, rp.as_slice());
        prop_assert!(max_abs_diff(&sol.proportions, &oracle) < 1e-10);
    }

    #[test]
    fn csv_round_trip((mk, _) in market_strategy()) {
        let mut out = Vec::new();
        write_prices(&mut out, &mk.securities, Precision::RoundTrip).unwrap();
        let back = read_prices(out.as_slice()).unwrap();
        for (a, b) in mk.securities.iter().zip(&back) {
            prop_assert_eq!(a.prices(), b.prices());
            prop_assert_eq!(a.label(), b.label());
        }
    }

    #[test]
    fn adjust_then_rescale_matches_reanchoring(
        closes in proptest::collection::vec(1.0..100.0f64, 3..12),
        anchor_value in 1.0..1000.0f64,
        lambda in 0.1..10.0f64,
    ) {
        let cal = calendar(closes.len());
        let raw = RawCloseSeries::new(cal, closes, "X").unwrap();
        let a = adjust(&raw, &[], 0, anchor_value).unwrap();
        let b = adjust(&raw, &[], 0, anchor_value * lambda).unwrap();
        let a_scaled = rescale(&a, lambda).unwrap();
        for (x, y) in a_scaled.prices().iter().zip(b.prices()) {
            prop_assert!((x - y).abs() < 1e-9 * y);
        }
    }
}

#[test]
fn adjustment_unit_cases() {
    use notional::price_series::ActionKind;
    let cal = calendar(2);
    let day = cal.days()[1];
    for (closes, kind, want) in [
        ([100.0, 99.0], ActionKind::CashDividend(1.0), [100.0, 100.0]),
        ([100.0, 50.0], ActionKind::Split(2.0), [100.0, 100.0]),
        (
            [100.0, 91.0],
            ActionKind::ShareDividend(0.1),
            [100.0, 100.1],
        ),
    ] {
        let raw = RawCloseSeries::new(cal.clone(), closes.to_vec(), "X").unwrap();
        let adjusted = adjust(&raw, &[CorporateAction { ex_date: day, kind }], 0, 100.0).unwrap();
        assert!(max_abs_diff(adjusted.prices(), &want) < 1e-9, "{kind:?}");
    }
}
