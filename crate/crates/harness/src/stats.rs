//! Summary statistics for the result tables.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{HarnessError, Result};

/// z-value of the two-sided 95% normal interval.
pub const Z95: f64 = 1.96;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Half-width `1.96 * std / sqrt(k)` of the interval around the mean of `k` values.
pub fn ci95(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    Z95 * sample_std(xs) / (xs.len() as f64).sqrt()
}

pub fn std_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    sample_std(xs) / (xs.len() as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    /// One-sided p-value for `mean(a - b) > 0`.
    pub p: f64,
}

/// Paired t-test of `a > b`.
///
/// When every difference is identical the statistic is infinite; `p` is then
/// 0, 1 or 0.5 by the sign of the common difference.
pub fn paired_t_greater(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(HarnessError::Stats(format!(
            "{} vs {} paired values",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(HarnessError::Stats(
            "paired test needs at least two pairs".into(),
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let df = diffs.len() - 1;
    let m = mean(&diffs);
    let se = std_error(&diffs);
    if se == 0.0 {
        let (t, p) = match m.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => (f64::INFINITY, 0.0),
            Some(std::cmp::Ordering::Less) => (f64::NEG_INFINITY, 1.0),
            _ => (0.0, 0.5),
        };
        return Ok(TTest { t, df, p });
    }
    let t = m / se;
    let dist =
        StudentsT::new(0.0, 1.0, df as f64).map_err(|e| HarnessError::Stats(e.to_string()))?;
    Ok(TTest {
        t,
        df,
        p: dist.sf(t),
    })
}
