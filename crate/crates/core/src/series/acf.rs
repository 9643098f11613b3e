use crate::error::{Error, Result};

/// Sample autocorrelation at lags `0..=max_lag` (biased, divide-by-n estimator).
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n < max_lag + 2 {
        return Err(Error::InsufficientData { needed: max_lag + 2, got: n });
    }
    let m = crate::util::mean(series);
    let c0: f64 = series.iter().map(|x| (x - m) * (x - m)).sum();
    if c0 <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((0..=max_lag)
        .map(|k| {
            let ck: f64 = (k..n).map(|t| (series[t] - m) * (series[t - k] - m)).sum();
            ck / c0
        })
        .collect())
}

/// Partial autocorrelation at lags `0..=max_lag`; `pacf[0] = 1`.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    Ok(pacf_from_acf(&acf(series, max_lag)?))
}

/// Durbin-Levinson recursion on an autocorrelation sequence.
pub fn pacf_from_acf(rho: &[f64]) -> Vec<f64> {
    let max_lag = rho.len().saturating_sub(1);
    let mut out = vec![1.0; max_lag + 1];
    if max_lag == 0 {
        return out;
    }
    let mut phi = vec![rho[1]];
    out[1] = rho[1];
    let mut v = 1.0 - rho[1] * rho[1];
    for k in 2..=max_lag {
        let num = rho[k] - (1..k).map(|j| phi[j - 1] * rho[k - j]).sum::<f64>();
        let kk = if v > 0.0 { num / v } else { 0.0 };
        let prev = phi.clone();
        for j in 1..k {
            phi[j - 1] = prev[j - 1] - kk * prev[k - j - 1];
        }
        phi.push(kk);
        v *= 1.0 - kk * kk;
        out[k] = kk;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn simulate_ar(coefs: &[f64], n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let burn = 500;
        let mut x = vec![0.0; n + burn];
        for t in 0..n + burn {
            let mut v: f64 = StandardNormal.sample(&mut rng);
            for (j, c) in coefs.iter().enumerate() {
                if t > j {
                    v += c * x[t - j - 1];
                }
            }
            x[t] = v;
        }
        x.split_off(burn)
    }

    #[test]
    fn lag_zero_is_one_and_pacf_base_case() {
        let x: Vec<f64> = (0..50).map(|i| ((i * 17) % 11) as f64).collect();
        let a = acf(&x, 5).unwrap();
        let p = pacf(&x, 5).unwrap();
        assert_eq!(a[0], 1.0);
        assert_eq!(p[1], a[1]);
    }

    #[test]
    fn ar1_lag_one_correlation() {
        let x = simulate_ar(&[0.8], 10_000, 5);
        let a = acf(&x, 3).unwrap();
        assert!((0.75..=0.85).contains(&a[1]), "{}", a[1]);
    }

    #[test]
    fn ar2_pacf_cuts_off() {
        let n = 10_000;
        let x = simulate_ar(&[0.5, -0.3], n, 9);
        let p = pacf(&x, 10).unwrap();
        let band = 2.0 / (n as f64).sqrt();
        assert!((p[2] + 0.3).abs() < 0.05);
        for (k, v) in p.iter().enumerate().skip(3) {
            assert!(v.abs() <= band, "pacf[{k}] = {v}");
        }
    }

    #[test]
    fn zero_variance_rejected() {
        assert!(matches!(acf(&[2.0; 20], 3), Err(Error::ZeroVariance)));
        assert!(acf(&[1.0, 2.0, 3.0], 3).is_err());
    }
}
