//! Damping integrability scan: per-annulus integrals of |H|^s over
//! shrinking sup-norm annuli 2^-j <= max(|x|,|y|) <= 2^-(j-1), with a trend
//! verdict against the theoretical threshold s0 = -2/(d-2).
//!
//! The integrand concentrates in thin near-axis corners, so uniform area
//! sampling would miss the mass; instead the annulus is integrated on a
//! logarithmic grid (x, y) = (2^-u, 2^-v) with a geometric tail estimate in
//! v. Everything is deterministic.

use super::fit::fit_loglog;
use super::{run_units, VerificationConfig};
use crate::adapt;
use crate::newton;
use crate::poly::{CompiledPoly, Polynomial};
use crate::rat::{self, Rat};
use crate::slivers::DampingForm;
use crate::Result;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Trend {
    Convergent,
    Divergent,
    Flat,
}

#[derive(Clone, Debug)]
pub struct ScanLine {
    pub s: f64,
    /// Fitted log2 growth rate of the annulus sums (negative = decaying).
    pub log2_rate: f64,
    pub trend: Trend,
    /// What the threshold predicts for this s: None inside the exclusion
    /// band where the scan cannot resolve the answer.
    pub expected: Option<Trend>,
    /// Pass when trend matches expectation; Inconclusive inside the band.
    pub verdict: super::Verdict,
    pub annulus_log2_sums: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct IntegrabilityReport {
    pub d: Rat,
    pub d_star: Rat,
    /// -2/(d-2) when d > 2; None means no finite threshold (all s integrable).
    pub threshold: Option<f64>,
    pub lines: Vec<ScanLine>,
}

/// Exclusion band half-width around the threshold (in s).
const ETA: f64 = 0.5;
/// Flatness cut for the measured log2 rate.
const RATE_CUT: f64 = 0.02;
/// Number of dyadic annuli scanned.
const ANNULI: usize = 26;

struct Integrand {
    fs2: CompiledPoly,
    fyy: CompiledPoly,
    form: DampingForm,
    /// |H|^s exponentiation happens per point: H >= 0 everywhere.
    s: f64,
}

impl Integrand {
    fn h(&self, x: f64, y: f64) -> f64 {
        match &self.form {
            DampingForm::FStarPower { exponent } => {
                let e = rat::to_f64(exponent);
                if e == 0.0 {
                    1.0
                } else {
                    self.fs2.eval(x, y).abs().powf(e / 2.0)
                }
            }
            DampingForm::WeightedFyy { x_exponent } => {
                x.abs().powf(rat::to_f64(x_exponent)) * self.fyy.eval(x, y).abs().sqrt()
            }
            DampingForm::PlainFyy => self.fyy.eval(x, y).abs().sqrt(),
        }
    }

    fn weight(&self, x: f64, y: f64) -> f64 {
        let h = self.h(x, y);
        if h == 0.0 {
            // |H|^s with s < 0 diverges at interior zeros; the caller's tail
            // handling decides, here the point weight saturates.
            return if self.s < 0.0 { f64::INFINITY } else { 0.0 };
        }
        h.powf(self.s)
    }
}

/// Integral of |H|^s over one sup-norm annulus via the log-grid.
/// Returns +inf when the near-axis tail fails to decay geometrically.
fn annulus_integral(integrand: &Integrand, j: usize, v_cut: f64, quadrants: &[(f64, f64)]) -> f64 {
    let lo = (j - 1) as f64;
    let step = 0.125f64;
    let ln2 = std::f64::consts::LN_2;
    let mut total = 0.0f64;
    for &(sx, sy) in quadrants {
        // strip 1: u in [j-1, j], v from j-1 upward (|y| <= |x| side and above)
        // strip 2: v in [j-1, j], u from j upward (avoids double-counting)
        for strip in 0..2 {
            let (outer_lo, inner_start) = match strip {
                0 => (lo, lo),
                _ => (lo, lo + 1.0),
            };
            let mut u = outer_lo;
            while u < outer_lo + 1.0 - 1e-12 {
                let un = u + step;
                // inner integral along v (strip 0) or u (strip 1)
                let mut inner = 0.0f64;
                let mut prev_val: Option<f64> = None;
                let mut last_slice = 0.0f64;
                let mut v = inner_start;
                let mut diverged = false;
                while v < v_cut {
                    let vn = v + step;
                    let (x, y, xn, yn) = match strip {
                        0 => (
                            sx * (-u * ln2).exp(),
                            sy * (-v * ln2).exp(),
                            sx * (-un * ln2).exp(),
                            sy * (-vn * ln2).exp(),
                        ),
                        _ => (
                            sx * (-v * ln2).exp(),
                            sy * (-u * ln2).exp(),
                            sx * (-vn * ln2).exp(),
                            sy * (-un * ln2).exp(),
                        ),
                    };
                    // trapezoid on the log cell: integrand * |x| * |y| * ln2^2
                    let g = |xx: f64, yy: f64| {
                        integrand.weight(xx, yy) * xx.abs() * yy.abs() * ln2 * ln2
                    };
                    let cell = 0.25
                        * (g(x, y) + g(xn, y) + g(x, yn) + g(xn, yn))
                        * step
                        * step;
                    if !cell.is_finite() {
                        diverged = true;
                        break;
                    }
                    inner += cell;
                    last_slice = cell;
                    prev_val = Some(cell);
                    v = vn;
                }
                if diverged {
                    return f64::INFINITY;
                }
                // geometric tail beyond the cut
                if let Some(_p) = prev_val {
                    if last_slice > 0.0 {
                        // estimate the per-step decay from the final octave
                        let probe = v_cut + 8.0;
                        let (x, y) = match strip {
                            0 => (sx * (-((u + un) / 2.0) * ln2).exp(), sy * (-probe * ln2).exp()),
                            _ => (sx * (-probe * ln2).exp(), sy * (-((u + un) / 2.0) * ln2).exp()),
                        };
                        let far = integrand.weight(x, y) * x.abs() * y.abs() * ln2 * ln2 * step * step;
                        if far.is_finite() && last_slice > 0.0 {
                            let ratio_per_step = (far / last_slice).powf(step / 8.0);
                            if ratio_per_step >= 0.999 {
                                return f64::INFINITY;
                            }
                            inner += last_slice * ratio_per_step / (1.0 - ratio_per_step);
                        }
                    }
                }
                total += inner;
                u = un;
            }
        }
    }
    total
}

/// Scan |damping|^s over shrinking annuli for each s in the grid and fit the
/// dyadic growth rate. Convergence of the full integral near the origin is
/// equivalent to a negative rate.
pub fn damping_integrability_scan(
    f: &Polynomial,
    form: &DampingForm,
    cfg: &VerificationConfig,
) -> Result<IntegrabilityReport> {
    cfg.validate()?;
    let np = newton::newton_polygon(f)?;
    let d = newton::newton_distance(&np);
    let d_star = adapt::d_star(&d);
    let d_f = rat::to_f64(&d);
    let threshold = if d_f > 2.0 {
        Some(-2.0 / (d_f - 2.0))
    } else {
        None
    };
    // s-grid: symmetric probes around the threshold when one exists,
    // otherwise the configured grid negated (integrability scans probe
    // negative powers).
    let s_values: Vec<f64> = match threshold {
        Some(s0) => {
            let spread: Vec<f64> = vec![s0 + 2.0, s0 + ETA, s0 - ETA, s0 - 2.0];
            spread
        }
        None => cfg.s_grid.points().iter().map(|s| -s).collect(),
    };
    Ok(scan_at(f, form, &d, &d_star, threshold, &s_values, cfg))
}

/// Scan at explicit s-values (the CLI passes user grids through here).
pub fn damping_scan_at(
    f: &Polynomial,
    form: &DampingForm,
    s_values: &[f64],
    cfg: &VerificationConfig,
) -> Result<IntegrabilityReport> {
    cfg.validate()?;
    let np = newton::newton_polygon(f)?;
    let d = newton::newton_distance(&np);
    let d_star = adapt::d_star(&d);
    let d_f = rat::to_f64(&d);
    let threshold = if d_f > 2.0 {
        Some(-2.0 / (d_f - 2.0))
    } else {
        None
    };
    Ok(scan_at(f, form, &d, &d_star, threshold, s_values, cfg))
}

fn scan_at(
    f: &Polynomial,
    form: &DampingForm,
    d: &Rat,
    d_star: &Rat,
    threshold: Option<f64>,
    s_values: &[f64],
    cfg: &VerificationConfig,
) -> IntegrabilityReport {
    // maximal polygon weight bounds how deep the near-axis corner reaches
    let np = newton::newton_polygon(f).expect("nonzero");
    let max_weight = np
        .edges
        .iter()
        .map(|e| rat::to_f64(&e.weight))
        .fold(1.0f64, f64::max);
    let fs2 = newton::fstar_squared(&np);
    let quadrants: Vec<(f64, f64)> = if f.has_integer_x_exponents() {
        vec![(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
    } else {
        vec![(1.0, 1.0), (1.0, -1.0)]
    };
    let mut lines = Vec::new();
    for &s in s_values {
        let integrand = Integrand {
            fs2: fs2.compiled(),
            fyy: adapt::dy(f, 2).compiled(),
            form: form.clone(),
            s,
        };
        let sums = run_units(ANNULI, cfg.workers, |idx| {
            let j = idx + 1;
            let v_cut = max_weight * (j as f64 + 2.0) + 40.0;
            annulus_integral(&integrand, j, v_cut, &quadrants)
        });
        let log2_sums: Vec<f64> = sums.iter().map(|a| a.log2()).collect();
        let (rate, trend) = if log2_sums.iter().any(|v| !v.is_finite() && *v > 0.0) {
            (f64::INFINITY, Trend::Divergent)
        } else {
            // fit the latter half of the dyadic scale
            let pts: Vec<(f64, f64)> = log2_sums
                .iter()
                .enumerate()
                .skip(ANNULI / 2)
                .map(|(j, v)| ((j + 1) as f64, *v))
                .collect();
            let (slope, _, _) = fit_loglog(&pts);
            let trend = if slope <= -RATE_CUT {
                Trend::Convergent
            } else if slope >= RATE_CUT {
                Trend::Divergent
            } else {
                Trend::Flat
            };
            (slope, trend)
        };
        let expected = match threshold {
            None => Some(Trend::Convergent),
            Some(s0) => {
                if s > s0 + ETA - 1e-12 {
                    Some(Trend::Convergent)
                } else if s < s0 - ETA + 1e-12 {
                    Some(Trend::Divergent)
                } else {
                    None
                }
            }
        };
        let verdict = match expected {
            None => super::Verdict::Inconclusive,
            Some(e) => {
                if trend == e {
                    super::Verdict::Pass
                } else if trend == Trend::Flat {
                    super::Verdict::Inconclusive
                } else {
                    super::Verdict::Fail
                }
            }
        };
        lines.push(ScanLine {
            s,
            log2_rate: rate,
            trend,
            expected,
            verdict,
            annulus_log2_sums: log2_sums,
        });
    }
    IntegrabilityReport {
        d: d.clone(),
        d_star: d_star.clone(),
        threshold,
        lines,
    }
}

/// Convenience: the F*-power damping form for an adapted polynomial.
pub fn fstar_damping_form(d_star: &Rat) -> DampingForm {
    DampingForm::FStarPower {
        exponent: rat::rat(1, 2) - d_star.clone().recip(),
    }
}
