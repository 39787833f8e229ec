//! Paired comparison of two policies evaluated on common random numbers.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PairedError {
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("a paired test needs at least 2 pairs, got {0}")]
    TooFew(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairedTest {
    pub n: usize,
    /// Mean of `a_i - b_i`.
    pub mean_difference: f64,
    pub std_error: f64,
    pub t_statistic: f64,
    /// Two-sided.
    pub p_value: f64,
}

/// Two-sided paired t-test of `mean(a - b) = 0`.
///
/// Identical samples (zero variance of the differences, zero mean) give
/// `t = 0, p = 1`; a nonzero constant difference gives `p = 0`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTest, PairedError> {
    if a.len() != b.len() {
        return Err(PairedError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(PairedError::TooFew(n));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    let (t, p) = if se == 0.0 {
        if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = mean / se;
        let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("positive degrees of freedom");
        (t, (2.0 * dist.cdf(-t.abs())).min(1.0))
    };
    Ok(PairedTest {
        n,
        mean_difference: mean,
        std_error: se,
        t_statistic: t,
        p_value: p,
    })
}
