//! Log-log least-squares fitting with a verdict against a declared target.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Regression of log(output) against log(input).
#[derive(Clone, Debug)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// (log input, log output) pairs; natural logarithm.
    pub points: Vec<(f64, f64)>,
    pub verdict: Verdict,
}

/// Least squares on already-logged points.
pub fn fit_loglog(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    (slope, intercept, r_squared)
}

/// Verdict rule shared by the fit-based estimators: PASS iff the slope is
/// within tolerance of the target and r^2 >= 0.9.
pub fn verdict_slope_target(slope: f64, r_squared: f64, target: f64, tol: f64) -> Verdict {
    if r_squared < 0.9 {
        return Verdict::Inconclusive;
    }
    if (slope - target).abs() <= tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Verdict rule for decay thresholds: PASS iff slope <= bound and r^2 >= 0.9.
pub fn verdict_slope_at_most(slope: f64, r_squared: f64, bound: f64) -> Verdict {
    if r_squared < 0.9 {
        return Verdict::Inconclusive;
    }
    if slope <= bound {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (1..10)
            .map(|i| {
                let x = i as f64;
                (x.ln(), (3.0 * x.powf(-0.5)).ln())
            })
            .collect();
        let (slope, intercept, r2) = fit_loglog(&pts);
        assert!((slope + 0.5).abs() < 1e-12);
        assert!((intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verdicts() {
        assert_eq!(verdict_slope_target(1.0, 0.99, 1.02, 0.05), Verdict::Pass);
        assert_eq!(verdict_slope_target(1.0, 0.99, 1.10, 0.05), Verdict::Fail);
        assert_eq!(
            verdict_slope_target(1.0, 0.5, 1.0, 0.05),
            Verdict::Inconclusive
        );
        assert_eq!(verdict_slope_at_most(-0.53, 0.95, -0.52), Verdict::Pass);
        assert_eq!(verdict_slope_at_most(-0.50, 0.95, -0.52), Verdict::Fail);
    }
}
