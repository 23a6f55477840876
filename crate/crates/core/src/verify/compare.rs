//! Comparability spot checks: re-validate the predicted pointwise bounds
//! recorded on sliver regions, at two shrinking radii.

use super::VerificationConfig;
use crate::adapt;
use crate::error::Error;
use crate::poly::{CompiledPoly, Var};
use crate::rat;
use crate::sampling::R2;
use crate::slivers::{
    BoundQuantity, Comparator, DampingForm, Decomposition, PredictedBound, RegionShape, Sliver,
};
use crate::Result;

/// Outcome of one bound check on one sliver.
#[derive(Clone, Debug)]
pub struct ComparabilityReport {
    pub sliver_index: usize,
    pub quantity: String,
    pub comparator: Comparator,
    /// Smallest sampled quantity/model ratio divided by c_lo (lower side)
    /// and c_hi headroom (upper side); PASS iff margin >= 1.
    pub margin: f64,
    pub worst_ratio: f64,
    pub samples_used: usize,
    pub pass: bool,
}

fn quantity_label(q: BoundQuantity) -> String {
    match q {
        BoundQuantity::DyF(m) => format!("|d^{m}F/dy^{m}|"),
        BoundQuantity::DxxOriginal => "|d^2f/dx^2|".to_string(),
        BoundQuantity::FStar => "F*".to_string(),
    }
}

/// Sample points of a sliver region at one radius scale, in the coordinates
/// the bound lives in (pre-shift regions get the psi offset added).
fn sample_region(
    dec: &Decomposition,
    sliver: &Sliver,
    radius: f64,
    seed: u64,
    n: usize,
    pre_shift: bool,
) -> Vec<(f64, f64)> {
    let r2 = R2::new(seed);
    let mut out = Vec::with_capacity(n);
    let sign = sliver.side.sign();
    let n0 = rat::to_f64(&sliver.n0);
    for i in 0..n as u64 {
        let (u, v) = r2.point(i);
        let ax = radius * (2.0f64).powf(-6.0 * u);
        let x = sign * ax;
        let y = match &sliver.shape {
            RegionShape::FullDisk => (2.0 * v - 1.0) * radius,
            RegionShape::VertexSector {
                weight_low,
                weight_high,
            } => {
                let lo = n0 * ax.powf(rat::to_f64(weight_low));
                let hi = match weight_high {
                    Some(wh) => ax.powf(rat::to_f64(wh)) / n0,
                    None => radius,
                };
                if lo >= hi {
                    continue;
                }
                let (vv, ysign) = if v < 0.5 {
                    (v * 2.0, 1.0)
                } else {
                    ((v - 0.5) * 2.0, -1.0)
                };
                ysign * lo * (hi / lo).powf(vv)
            }
            RegionShape::Band { weight } => {
                let scale = ax.powf(rat::to_f64(weight));
                let c = rat::to_f64(sliver.center.as_ref().unwrap());
                let d = rat::to_f64(sliver.half_width.as_ref().unwrap());
                (c + d * (2.0 * v - 1.0)) * scale
            }
        };
        let y = if pre_shift { y + dec.psi.eval_f64(x) } else { y };
        if y.abs() <= radius {
            out.push((x, y));
        }
    }
    out
}

/// Re-validate one recorded bound on one sliver. PASS iff the sampled
/// quantity/model ratios respect the recorded constants with margin >= 1 at
/// both radii.
pub fn check_comparability(
    dec: &Decomposition,
    sliver_index: usize,
    bound: &PredictedBound,
    cfg: &VerificationConfig,
) -> Result<ComparabilityReport> {
    let sliver = dec
        .slivers
        .get(sliver_index)
        .ok_or_else(|| Error::Invalid("sliver index out of range".into()))?;
    let (poly, take_sqrt, pre_shift) = match bound.quantity {
        BoundQuantity::DyF(m) => (adapt::dy(&dec.f, m).compiled(), false, false),
        BoundQuantity::FStar => (dec.fstar_squared.compiled(), true, false),
        BoundQuantity::DxxOriginal => (
            dec.f_pre_shift.differentiate(Var::X, 2)?.compiled(),
            false,
            true,
        ),
    };
    let alpha = rat::to_f64(&bound.alpha);
    let beta = rat::to_f64(&bound.beta);
    let radius = rat::to_f64(&dec.radius).min(cfg.radius);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut used = 0usize;
    for (si, scale) in [1.0f64, 0.25].iter().enumerate() {
        let pts = sample_region(
            dec,
            sliver,
            radius * scale,
            cfg.seed.wrapping_add(si as u64),
            cfg.samples.min(8192) / 2,
            pre_shift,
        );
        for (x, y) in pts {
            let model = x.abs().powf(alpha) * if beta == 0.0 { 1.0 } else { y.abs().powf(beta) };
            if model == 0.0 || !model.is_finite() {
                continue;
            }
            let mut val = poly.eval(x, y).abs();
            if take_sqrt {
                val = val.sqrt();
            }
            let ratio = val / model;
            if !ratio.is_finite() {
                continue;
            }
            used += 1;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
        }
    }
    if used == 0 {
        return Err(Error::EmptyRegion);
    }
    let lo_margin = bound
        .c_lo
        .as_ref()
        .map(|c| min_ratio / rat::to_f64(c))
        .unwrap_or(f64::INFINITY);
    let hi_margin = bound
        .c_hi
        .as_ref()
        .map(|c| rat::to_f64(c) / max_ratio)
        .unwrap_or(f64::INFINITY);
    let margin = lo_margin.min(hi_margin);
    let worst_ratio = if lo_margin <= hi_margin {
        min_ratio
    } else {
        max_ratio
    };
    Ok(ComparabilityReport {
        sliver_index,
        quantity: quantity_label(bound.quantity),
        comparator: bound.comparator,
        margin,
        worst_ratio,
        samples_used: used,
        pass: margin >= 1.0,
    })
}

/// Check an arbitrary polynomial quantity against a monomial model
/// c |x|^alpha |y|^beta on one sliver region, for bounds that are not part
/// of the recorded set (e.g. edge-approximation differences |R - R_M|).
/// PASS iff every sampled ratio respects the comparator with margin >= 1.
#[allow(clippy::too_many_arguments)]
pub fn check_region_bound(
    dec: &Decomposition,
    sliver_index: usize,
    quantity: &crate::poly::Polynomial,
    comparator: Comparator,
    constant: f64,
    alpha: f64,
    beta: f64,
    cfg: &VerificationConfig,
) -> Result<ComparabilityReport> {
    let sliver = dec
        .slivers
        .get(sliver_index)
        .ok_or_else(|| Error::Invalid("sliver index out of range".into()))?;
    let poly = quantity.compiled();
    let radius = rat::to_f64(&dec.radius).min(cfg.radius);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut used = 0usize;
    for (si, scale) in [1.0f64, 0.25].iter().enumerate() {
        let pts = sample_region(
            dec,
            sliver,
            radius * scale,
            cfg.seed.wrapping_add(40 + si as u64),
            cfg.samples.min(8192) / 2,
            false,
        );
        for (x, y) in pts {
            let model =
                constant * x.abs().powf(alpha) * if beta == 0.0 { 1.0 } else { y.abs().powf(beta) };
            if model == 0.0 || !model.is_finite() {
                continue;
            }
            let ratio = poly.eval(x, y).abs() / model;
            if !ratio.is_finite() {
                continue;
            }
            used += 1;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
        }
    }
    if used == 0 {
        return Err(Error::EmptyRegion);
    }
    let (margin, worst_ratio, pass) = match comparator {
        Comparator::LowerBound => (min_ratio, min_ratio, min_ratio >= 1.0),
        Comparator::UpperBound => (1.0 / max_ratio, max_ratio, max_ratio <= 1.0),
        Comparator::TwoSided => {
            let m = min_ratio.min(1.0 / max_ratio);
            (m, if min_ratio < 1.0 / max_ratio { min_ratio } else { max_ratio }, m >= 1.0)
        }
    };
    Ok(ComparabilityReport {
        sliver_index,
        quantity: "custom".to_string(),
        comparator,
        margin,
        worst_ratio,
        samples_used: used,
        pass,
    })
}

/// Check every bound recorded on every sliver of a decomposition.
pub fn check_all_bounds(
    dec: &Decomposition,
    cfg: &VerificationConfig,
) -> Result<Vec<ComparabilityReport>> {
    let mut out = Vec::new();
    for (i, s) in dec.slivers.iter().enumerate() {
        for b in &s.bounds {
            out.push(check_comparability(dec, i, b, cfg)?);
        }
    }
    Ok(out)
}

/// Damping-domination check: on every weighted (k > 2) sliver, the damping
/// function is bounded by a constant multiple of the F*-power form.
pub fn check_damping_domination(
    dec: &Decomposition,
    cfg: &VerificationConfig,
) -> Result<Vec<ComparabilityReport>> {
    let fstar_exp = 0.5 - 1.0 / rat::to_f64(&dec.d_star);
    let fs2: CompiledPoly = dec.fstar_squared.compiled();
    let fyy = adapt::dy(&dec.f, 2).compiled();
    let radius = rat::to_f64(&dec.radius).min(cfg.radius);
    let mut out = Vec::new();
    for (i, s) in dec.slivers.iter().enumerate() {
        let x_exp = match &s.damping {
            DampingForm::WeightedFyy { x_exponent } => Some(rat::to_f64(x_exponent)),
            DampingForm::PlainFyy => None,
            DampingForm::FStarPower { .. } => continue,
        };
        let mut worst: f64 = 0.0;
        let mut used = 0usize;
        for (si, scale) in [1.0f64, 0.25].iter().enumerate() {
            let pts = sample_region(
                dec,
                s,
                radius * scale,
                cfg.seed.wrapping_add(100 + si as u64),
                cfg.samples.min(8192) / 2,
                false,
            );
            for (x, y) in pts {
                let h = match x_exp {
                    Some(e) => x.abs().powf(e) * fyy.eval(x, y).abs().sqrt(),
                    None => fyy.eval(x, y).abs().sqrt(),
                };
                let fstar_pow = fs2.eval(x, y).abs().powf(fstar_exp / 2.0);
                if fstar_pow <= 0.0 || !fstar_pow.is_finite() {
                    continue;
                }
                used += 1;
                worst = worst.max(h / fstar_pow);
            }
        }
        if used == 0 {
            return Err(Error::EmptyRegion);
        }
        // bounded ratio = the inequality holds with the sampled constant
        out.push(ComparabilityReport {
            sliver_index: i,
            quantity: "|H| / F*^(1/2 - 1/d*)".to_string(),
            comparator: Comparator::UpperBound,
            margin: if worst.is_finite() && worst > 0.0 {
                1.0
            } else {
                0.0
            },
            worst_ratio: worst,
            samples_used: used,
            pass: worst.is_finite(),
        });
    }
    Ok(out)
}
