use serde::{Deserialize, Serialize};
use statrs::function::beta::inv_beta_reg;

/// Confidence level of reported intervals.
pub const CONFIDENCE: f64 = 0.95;

/// Proportion estimate from `successes` out of `trials`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation (Bessel-corrected) over `√trials`.
    pub stderr: f64,
    pub trials: u64,
    pub successes: u64,
    /// Exact (Clopper–Pearson) interval at [`CONFIDENCE`].
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Estimate {
        assert!(trials > 0 && successes <= trials);
        let t = trials as f64;
        let mean = successes as f64 / t;
        let stderr = if trials < 2 { 0.0 } else { (mean * (1.0 - mean) * t / (t - 1.0)).sqrt() / t.sqrt() };
        let (ci_low, ci_high) = clopper_pearson(successes, trials, CONFIDENCE);
        Estimate { mean, stderr, trials, successes, ci_low, ci_high }
    }
}

/// Exact binomial interval from Beta quantiles.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    let alpha = 1.0 - confidence;
    let (k, n) = (k as f64, n as f64);
    let lo = if k == 0.0 { 0.0 } else { inv_beta_reg(k, n - k + 1.0, alpha / 2.0) };
    let hi = if k == n { 1.0 } else { inv_beta_reg(k + 1.0, n - k, 1.0 - alpha / 2.0) };
    (lo, hi)
}

/// `(estimate − prediction)/stderr`. A zero stderr gives `Some(0)` when the
/// two agree exactly and `None` otherwise.
pub fn z_score(est: &Estimate, prediction: f64) -> Option<f64> {
    if est.stderr > 0.0 {
        Some((est.mean - prediction) / est.stderr)
    } else if est.mean == prediction {
        Some(0.0)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stderr_uses_bessel_correction() {
        let e = Estimate::from_counts(3, 4);
        // sample variance of {1,1,1,0} is 0.25
        assert!((e.stderr - (0.25f64 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(Estimate::from_counts(1, 1).stderr, 0.0);
    }

    #[test]
    fn clopper_pearson_reference_values() {
        // k = 0: upper = 1 − (α/2)^(1/n)
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-10);
        let (lo, hi) = clopper_pearson(10, 10, 0.95);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-10);
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson(50, 100, 0.95);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn z_scores() {
        let e = Estimate::from_counts(10, 10);
        assert_eq!(z_score(&e, 1.0), Some(0.0));
        assert_eq!(z_score(&e, 0.9), None);
        let e = Estimate::from_counts(75, 100);
        assert!(z_score(&e, 0.75).unwrap().abs() < 1e-15);
    }
}
