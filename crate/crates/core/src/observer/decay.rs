use crate::error::{Error, Result};

/// Minimum number of samples in the fitted tail.
pub const MIN_TAIL_SAMPLES: usize = 8;
/// Values at or below this are treated as converged to zero.
pub const CONVERGED_FLOOR: f64 = 1e-14;

/// Exponential envelope `amplitude * exp(-rate t)` fitted to a norm series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub amplitude: f64,
    /// Positive for decay; `+inf` when the tail has converged to zero.
    pub rate: f64,
    /// Largest absolute log-residual over the fitted samples, so the series stays below
    /// `amplitude * exp(-rate t + residual)`.
    pub residual: f64,
    /// Number of samples used in the fit.
    pub samples: usize,
}

impl DecayFit {
    pub fn converged(&self) -> bool {
        self.rate == f64::INFINITY
    }

    fn converged_marker(samples: usize) -> Self {
        Self {
            amplitude: 0.0,
            rate: f64::INFINITY,
            residual: 0.0,
            samples,
        }
    }
}

/// Log-linear least-squares fit over the last `tail_fraction` of the samples.
///
/// Samples at or below [`CONVERGED_FLOOR`] are dropped; when fewer than
/// [`MIN_TAIL_SAMPLES`] remain, the series is reported as converged.
pub fn fit_decay(times: &[f64], values: &[f64], tail_fraction: f64) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail fraction {tail_fraction} outside (0, 1]"
        )));
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("norm series contains {v}")));
    }
    let tail_len = ((values.len() as f64) * tail_fraction).ceil() as usize;
    if tail_len < MIN_TAIL_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_TAIL_SAMPLES,
            got: tail_len,
        });
    }
    let start = values.len() - tail_len;
    let pts: Vec<(f64, f64)> = times[start..]
        .iter()
        .zip(&values[start..])
        .filter(|(_, &v)| v > CONVERGED_FLOOR)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    if pts.len() < MIN_TAIL_SAMPLES {
        return Ok(DecayFit::converged_marker(tail_len));
    }

    let k = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let lm = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let stl: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - lm)).sum();
    if stt == 0.0 {
        return Err(Error::InvalidParameter("tail samples share one instant".into()));
    }
    let slope = stl / stt;
    let intercept = lm - slope * tm;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        amplitude: intercept.exp(),
        rate: -slope,
        residual,
        samples: pts.len(),
    })
}
