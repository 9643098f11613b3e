use bhcast_core::sarima::{
    aicc, fit_sarima, fit_sarima_with, fully_difference, simulate, suggest_order, FitOptions, SarimaCoefficients,
    SarimaModel, SarimaOrder,
};
use bhcast_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn airline_coefs(phi: f64, sphi: f64) -> SarimaCoefficients {
    SarimaCoefficients { ar: vec![phi], sar: vec![sphi], ..Default::default() }
}

fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

#[test]
fn recovers_seasonal_ar_coefficients() {
    let order = SarimaOrder::airline_ar(7);
    let (mut err_phi, mut err_sphi) = (0.0, 0.0);
    for seed in 0..50 {
        let y = simulate(&order, &airline_coefs(0.5, 0.3), 0.1, 364, seed).unwrap();
        let m = fit_sarima(&y, order).unwrap();
        err_phi += (m.ar[0] - 0.5).abs();
        err_sphi += (m.sar[0] - 0.3).abs();
    }
    assert!(err_phi / 50.0 <= 0.1, "{}", err_phi / 50.0);
    assert!(err_sphi / 50.0 <= 0.1, "{}", err_sphi / 50.0);
}

#[test]
fn white_noise_gives_small_coefficients() {
    let order = SarimaOrder::new((1, 0, 0), (1, 0, 0), 7).unwrap();
    let m = fit_sarima(&white_noise(2000, 3), order).unwrap();
    assert!(m.ar[0].abs() <= 0.1 && m.sar[0].abs() <= 0.1, "{:?} {:?}", m.ar, m.sar);
}

#[test]
fn short_series_rejected() {
    let y: Vec<f64> = (0..15).map(f64::from).collect();
    assert!(matches!(fit_sarima(&y, SarimaOrder::airline_ar(7)), Err(Error::InsufficientData { .. })));
}

#[test]
fn two_identical_weeks_repeat() {
    let week: Vec<f64> = (1..=7).map(f64::from).collect();
    let history: Vec<f64> = week.iter().chain(&week).copied().collect();
    let m =
        SarimaModel::with_coefficients(SarimaOrder::airline_ar(7), airline_coefs(0.0, 0.0), None, &history).unwrap();
    assert_eq!(m.forecast(7).unwrap(), week);
    assert_eq!(m.forecast_from(&history, 7).unwrap(), week);
}

#[test]
fn drift_continues() {
    let c = 0.37;
    let pattern = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0];
    let y: Vec<f64> = (0..70).map(|t| pattern[t % 7] + c * t as f64).collect();
    let m = fit_sarima(&y, SarimaOrder::airline_ar(7)).unwrap();
    let f = m.forecast(21).unwrap();
    let mut ext = y.clone();
    ext.extend(&f);
    for t in y.len() - 7..ext.len() - 7 {
        assert!((ext[t + 7] - ext[t] - 7.0 * c).abs() < 1e-9);
    }
}

/// One-step predictor for (1,1,0)x(1,1,0)_7 written out from the model equation.
fn one_step_oracle(y: &[f64], phi: f64, sphi: f64) -> f64 {
    let n = y.len();
    let w = |t: usize| y[t] - y[t - 1] - y[t - 7] + y[t - 8];
    let w_hat = phi * w(n - 1) + sphi * w(n - 7) - phi * sphi * w(n - 8);
    w_hat + y[n - 1] + y[n - 7] - y[n - 8]
}

#[test]
fn one_step_forecasts_match_recursion() {
    let order = SarimaOrder::airline_ar(7);
    let y = simulate(&order, &airline_coefs(0.4, 0.5), 1.0, 300, 42).unwrap();
    let m = fit_sarima(&y[..250], order).unwrap();
    assert!((m.forecast(1).unwrap()[0] - one_step_oracle(&y[..250], m.ar[0], m.sar[0])).abs() < 1e-9);
    for end in 250..300 {
        let f = m.forecast_from(&y[..end], 1).unwrap()[0];
        assert!((f - one_step_oracle(&y[..end], m.ar[0], m.sar[0])).abs() < 1e-9);
    }
}

#[test]
fn true_order_wins_aicc() {
    let truth = SarimaOrder::arima(1, 0, 0);
    let overfit = SarimaOrder::arima(6, 0, 0);
    let coefs = SarimaCoefficients { ar: vec![0.6], ..Default::default() };
    let mut wins = 0;
    for seed in 0..50 {
        let y = simulate(&truth, &coefs, 1.0, 500, 1000 + seed).unwrap();
        let a = fit_sarima(&y, truth).unwrap();
        let b = fit_sarima(&y, overfit).unwrap();
        if aicc(&a, &y).unwrap() < aicc(&b, &y).unwrap() {
            wins += 1;
        }
    }
    assert!(wins >= 45, "{wins}/50");
}

#[test]
fn nested_models_do_not_increase_css() {
    let coefs = SarimaCoefficients { ar: vec![0.5, -0.2], ..Default::default() };
    let y = simulate(&SarimaOrder::arima(2, 0, 0), &coefs, 1.0, 400, 8).unwrap();
    let mut prev = f64::INFINITY;
    for p in 0..4 {
        let m = fit_sarima(&y, SarimaOrder::arima(p, 0, 0)).unwrap();
        assert!(m.css <= prev * (1.0 + 1e-9), "p={p}: {} > {prev}", m.css);
        prev = m.css;
    }
    let a = fit_sarima(&y, SarimaOrder::arima(1, 0, 0)).unwrap();
    assert_eq!(aicc(&a, &y).unwrap(), aicc(&a.clone(), &y).unwrap());
}

#[test]
fn residuals_recompute_exactly() {
    let order = SarimaOrder::new((1, 0, 1), (0, 1, 1), 7).unwrap();
    let coefs = SarimaCoefficients { ar: vec![0.3], ma: vec![0.4], sma: vec![-0.5], ..Default::default() };
    let y = simulate(&order, &coefs, 1.0, 400, 12).unwrap();
    let m = fit_sarima(&y, order).unwrap();
    let again = m.in_sample_residuals(&y).unwrap();
    assert_eq!(again.len(), m.residuals.len());
    for (a, b) in again.iter().zip(&m.residuals) {
        assert!((a - b).abs() <= 1e-9);
    }
    assert!(m.sigma2 > 0.0);
    assert!((m.ma[0] - 0.4).abs() < 0.15 && (m.sma[0] + 0.5).abs() < 0.15, "{:?} {:?}", m.ma, m.sma);
    assert_eq!(m.forecast(10).unwrap(), m.forecast_from(&y, 10).unwrap());
}

#[test]
fn json_round_trip() {
    let order = SarimaOrder::airline_ar(7);
    let y = simulate(&order, &airline_coefs(0.5, 0.3), 0.1, 200, 1).unwrap();
    let m = fit_sarima(&y, order).unwrap();
    let back = SarimaModel::from_json(&m.to_json().unwrap()).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.forecast(14).unwrap(), m.forecast(14).unwrap());
    assert!(m.to_json().unwrap().contains("\"S\":7"));
}

#[test]
fn fitting_is_deterministic() {
    let order = SarimaOrder::airline_ar(7);
    let y = simulate(&order, &airline_coefs(0.5, 0.3), 0.1, 200, 77).unwrap();
    assert_eq!(fit_sarima(&y, order).unwrap(), fit_sarima(&y, order).unwrap());
}

#[test]
fn fit_does_not_depend_on_units() {
    let order = SarimaOrder::airline_ar(7);
    let y = simulate(&order, &airline_coefs(0.5, 0.3), 0.1, 200, 31).unwrap();
    let big: Vec<f64> = y.iter().map(|v| 3.0e9 * v + 1.0e10).collect();
    let (a, b) = (fit_sarima(&y, order).unwrap(), fit_sarima(&big, order).unwrap());
    assert!((a.ar[0] - b.ar[0]).abs() <= 1e-6 && (a.sar[0] - b.sar[0]).abs() <= 1e-6);
    let with_mean = FitOptions { include_mean: true, ..FitOptions::default() };
    let mean = fit_sarima_with(&big, SarimaOrder::arima(1, 0, 0), with_mean).unwrap();
    let small = fit_sarima_with(&y, SarimaOrder::arima(1, 0, 0), with_mean).unwrap();
    assert!((mean.ar[0] - small.ar[0]).abs() <= 1e-6);
    assert!((mean.mean.unwrap() - (3.0e9 * small.mean.unwrap() + 1.0e10)).abs() <= 1e-6 * 1.0e10);
}

#[test]
fn suggest_white_noise_is_all_zero() {
    let (order, diag) = suggest_order(&white_noise(500, 21), 7).unwrap();
    assert_eq!(order, SarimaOrder::new((0, 0, 0), (0, 0, 0), 7).unwrap(), "{}", diag.table());
}

#[test]
fn suggest_ma1() {
    let order = SarimaOrder::arima(0, 0, 1);
    let y = simulate(&order, &SarimaCoefficients { ma: vec![0.5], ..Default::default() }, 1.0, 1000, 4).unwrap();
    let (got, diag) = suggest_order(&y, 7).unwrap();
    assert_eq!((got.p, got.q), (0, 1), "{}", diag.table());
}

#[test]
fn suggest_busy_hour_like_series() {
    // weekly pattern + linear trend + seasonal AR noise
    let order = SarimaOrder::airline_ar(7);
    let noise = simulate(&order, &airline_coefs(0.5, 0.3), 1.0, 364, 6).unwrap();
    let pattern = [10.0, 11.0, 11.5, 11.0, 10.5, 6.0, 5.0];
    let y: Vec<f64> = noise.iter().enumerate().map(|(t, n)| 100.0 + pattern[t % 7] + 0.05 * t as f64 + n).collect();
    let (got, diag) = suggest_order(&y, 7).unwrap();
    assert_eq!(got, order, "{:?}\n{}", diag.variances, diag.table());
}

proptest! {
    #[test]
    fn periodic_plus_affine_is_annihilated(
        pattern in prop::collection::vec(-50.0f64..50.0, 7),
        slope in -3.0f64..3.0,
        level in -100.0f64..100.0,
        weeks in 4usize..8,
    ) {
        let y: Vec<f64> = (0..7 * weeks).map(|t| level + pattern[t % 7] + slope * t as f64).collect();
        let order = SarimaOrder::airline_ar(7);
        prop_assert!(fully_difference(&y, &order).unwrap().iter().all(|v| v.abs() < 1e-9));
        let m = SarimaModel::with_coefficients(order, airline_coefs(0.3, -0.2), None, &y).unwrap();
        let f = m.forecast(14).unwrap();
        let n = y.len();
        for (i, v) in f.iter().enumerate() {
            let t = n + i;
            prop_assert!((v - (level + pattern[t % 7] + slope * t as f64)).abs() < 1e-6);
        }
    }

    #[test]
    fn forecasts_are_deterministic(seed in 0u64..1000) {
        let order = SarimaOrder::arima(1, 1, 1);
        let coefs = SarimaCoefficients { ar: vec![0.4], ma: vec![0.3], ..Default::default() };
        let y = simulate(&order, &coefs, 1.0, 80, seed).unwrap();
        let m = SarimaModel::with_coefficients(order, coefs, None, &y).unwrap();
        prop_assert_eq!(m.forecast(9).unwrap(), m.forecast(9).unwrap());
        prop_assert_eq!(m.forecast(9).unwrap(), m.forecast_from(&y, 9).unwrap());
    }
}
