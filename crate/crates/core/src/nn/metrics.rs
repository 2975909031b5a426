use serde::Serialize;

use crate::error::{Error, Result};

/// Agreement between predicted and true values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegressionMetrics {
    pub count: usize,
    pub mse: f64,
    pub mae: f64,
    /// Coefficient of determination `1 - SS_res / SS_tot`.
    pub r2: f64,
}

impl RegressionMetrics {
    pub fn compute(predicted: &[f64], truth: &[f64]) -> Result<Self> {
        if predicted.len() != truth.len() || truth.is_empty() {
            return Err(Error::Pairing(format!(
                "metrics over {} predictions and {} targets",
                predicted.len(),
                truth.len()
            )));
        }
        let n = truth.len() as f64;
        let mean = truth.iter().sum::<f64>() / n;
        let mut ss_res = 0.0;
        let mut abs = 0.0;
        let mut ss_tot = 0.0;
        for (p, t) in predicted.iter().zip(truth) {
            ss_res += (p - t) * (p - t);
            abs += (p - t).abs();
            ss_tot += (t - mean) * (t - mean);
        }
        let r2 = if ss_tot > 0.0 {
            1.0 - ss_res / ss_tot
        } else if ss_res == 0.0 {
            1.0
        } else {
            f64::NEG_INFINITY
        };
        Ok(RegressionMetrics {
            count: truth.len(),
            mse: ss_res / n,
            mae: abs / n,
            r2,
        })
    }
}
