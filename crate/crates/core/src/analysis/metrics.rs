//! Estimate reports pairing simulation results with closed forms.

use serde::{Deserialize, Serialize};

/// Extra absolute slack under the 5σ discrepancy rule, so exact analytic
/// paths (std_error = 0) do not flag on ~1e-16 float noise.
pub const DISCREPANCY_FLOOR: f64 = 1e-12;

/// One estimated quantity with its statistical error and the closed forms it
/// is checked against.
///
/// `closed_form` is the published formula value; `closed_form_derived`, when
/// present, is an independently derived oracle for the same quantity. The
/// discrepancy flag marks published-value vs estimate disagreement beyond
/// 5 standard errors — a deliberate report, not a failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub estimate: f64,
    pub std_error: f64,
    pub sample_count: u64,
    pub closed_form: f64,
    pub closed_form_derived: Option<f64>,
    pub discrepancy: bool,
}

impl MetricsReport {
    /// Report with an explicit standard error.
    pub fn new(
        estimate: f64,
        std_error: f64,
        sample_count: u64,
        closed_form: f64,
        closed_form_derived: Option<f64>,
    ) -> Self {
        Self {
            estimate,
            std_error,
            sample_count,
            closed_form,
            closed_form_derived,
            discrepancy: discrepant(estimate, closed_form, std_error),
        }
    }

    /// Report for a binomial proportion: `successes / trials` with
    /// `√(p̂(1−p̂)/N)` standard error.
    pub fn binomial(
        successes: u64,
        trials: u64,
        closed_form: f64,
        closed_form_derived: Option<f64>,
    ) -> Self {
        assert!(trials > 0, "binomial report needs at least one trial");
        let p = successes as f64 / trials as f64;
        let std_error = (p * (1.0 - p) / trials as f64).sqrt();
        Self::new(p, std_error, trials, closed_form, closed_form_derived)
    }

    /// Report from an exact analytic path: zero standard error.
    pub fn analytic(value: f64, closed_form: f64, closed_form_derived: Option<f64>) -> Self {
        Self::new(value, 0.0, 0, closed_form, closed_form_derived)
    }

    /// Deviation of the estimate from the published closed form, in σ units
    /// (∞ when std_error is 0 and the values differ beyond the float floor).
    pub fn sigma_deviation(&self) -> f64 {
        let diff = (self.estimate - self.closed_form).abs();
        if diff <= DISCREPANCY_FLOOR {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY
        } else {
            diff / self.std_error
        }
    }
}

fn discrepant(estimate: f64, closed_form: f64, std_error: f64) -> bool {
    (estimate - closed_form).abs() > 5.0 * std_error + DISCREPANCY_FLOOR
}

/// Standard error of a binomial proportion at true probability `p`.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_follows_the_five_sigma_rule() {
        let r = MetricsReport::new(0.50, 0.01, 1000, 0.52, None);
        assert!(!r.discrepancy); // 2σ away
        let r = MetricsReport::new(0.50, 0.01, 1000, 0.56, None);
        assert!(r.discrepancy); // 6σ away
    }

    #[test]
    fn analytic_reports_do_not_flag_on_float_noise() {
        let r = MetricsReport::analytic(0.5 + 1e-16, 0.5, Some(0.5));
        assert!(!r.discrepancy);
        assert_eq!(r.std_error, 0.0);
        let r = MetricsReport::analytic(0.6, 0.5, None);
        assert!(r.discrepancy);
    }

    #[test]
    fn binomial_report_std_error() {
        let r = MetricsReport::binomial(250, 1000, 0.25, None);
        assert!((r.estimate - 0.25).abs() < 1e-15);
        assert!((r.std_error - (0.25 * 0.75 / 1000.0f64).sqrt()).abs() < 1e-15);
    }
}
