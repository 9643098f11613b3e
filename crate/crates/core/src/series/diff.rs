use crate::error::{Error, Result};

/// `out[t] = x[t + lag] - x[t]`; output is `lag` samples shorter than the input.
pub fn difference(series: &[f64], lag: usize) -> Result<Vec<f64>> {
    if lag == 0 {
        return Err(Error::invalid("difference lag must be positive"));
    }
    if series.len() <= lag {
        return Err(Error::InsufficientData { needed: lag + 1, got: series.len() });
    }
    Ok(series.windows(lag + 1).map(|w| w[lag] - w[0]).collect())
}

/// Inverse of [`difference`] given the first `lag` original values.
pub fn undifference(diffed: &[f64], seed: &[f64], lag: usize) -> Result<Vec<f64>> {
    if lag == 0 || seed.len() != lag {
        return Err(Error::invalid(format!("undifference needs exactly {lag} seed values, got {}", seed.len())));
    }
    let mut out = Vec::with_capacity(seed.len() + diffed.len());
    out.extend_from_slice(seed);
    for (t, d) in diffed.iter().enumerate() {
        let prev = out[t];
        out.push(prev + d);
    }
    Ok(out)
}
