//! JSON assembly for analysis reports. Exact rationals are emitted as
//! decimal strings ("4/3"); measured quantities as IEEE doubles. Key order
//! is sorted (serde_json maps), so identical runs serialize byte-identically.

use hsurf_core::adapt::{AdaptStep, AdaptationResult, HeightValue};
use hsurf_core::classify::ClassificationReport;
use hsurf_core::newton::{BisectrixLocus, CompactEdge, LocusKind, NewtonPolygon};
use hsurf_core::poly::{LinearMap2, Polynomial, PsiSeries};
use hsurf_core::rat::{rat_str, Rat};
use hsurf_core::slivers::{
    BoundQuantity, Comparator, DampingForm, Decomposition, PredictedBound, RegionShape, Sliver,
    SliverKind,
};
use hsurf_core::verify::{ComparabilityReport, FitResult, IntegrabilityReport, Trend, Verdict};
use serde_json::{json, Value};

pub fn rq(r: &Rat) -> Value {
    Value::String(rat_str(r))
}

fn rq_opt(r: &Option<Rat>) -> Value {
    match r {
        Some(r) => rq(r),
        None => Value::Null,
    }
}

pub fn polynomial(p: &Polynomial) -> Value {
    serde_json::to_value(p).expect("polynomial serializes")
}

pub fn linear_map(t: &LinearMap2) -> Value {
    json!([[rq(&t.a11), rq(&t.a12)], [rq(&t.a21), rq(&t.a22)]])
}

pub fn psi(psi: &PsiSeries) -> Value {
    Value::Array(
        psi.shifts
            .iter()
            .map(|(c, m)| json!([rq(c), rq(m)]))
            .collect(),
    )
}

fn edge(e: &CompactEdge) -> Value {
    json!({
        "upper": [rq(&e.upper.t1), rq(&e.upper.t2)],
        "lower": [rq(&e.lower.t1), rq(&e.lower.t2)],
        "slope": rq(&e.slope),
        "weight": rq(&e.weight),
        "level": rq(&e.support_level),
    })
}

pub fn polygon(np: &NewtonPolygon) -> Value {
    json!({
        "vertices": np.vertices.iter().map(|v| json!([rq(&v.t1), rq(&v.t2)])).collect::<Vec<_>>(),
        "edges": np.edges.iter().map(edge).collect::<Vec<_>>(),
        "rays": {"vertical": np.has_vertical_ray, "horizontal": np.has_horizontal_ray},
    })
}

/// 2-column CSV of polygon vertices for plotting.
pub fn polygon_csv(np: &NewtonPolygon) -> String {
    let mut out = String::from("t1,t2\n");
    for v in &np.vertices {
        out.push_str(&format!("{},{}\n", rat_str(&v.t1), rat_str(&v.t2)));
    }
    out
}

pub fn locus(l: &BisectrixLocus) -> Value {
    let kind = match l.kind {
        LocusKind::InteriorOfEdge => "interior_of_edge",
        LocusKind::AtVertex => "at_vertex",
        LocusKind::OnVerticalRay => "on_vertical_ray",
        LocusKind::OnHorizontalRay => "on_horizontal_ray",
    };
    json!({
        "kind": kind,
        "edge_index": l.edge_index,
        "vertex_index": l.vertex_index,
        "point": [rq(&l.point.0), rq(&l.point.1)],
    })
}

fn step(s: &AdaptStep) -> Value {
    match s {
        AdaptStep::YShift { c, weight } => json!({"kind": "y_shift", "c": rq(c), "weight": rq(weight)}),
        AdaptStep::AxisSwap => json!({"kind": "axis_swap"}),
        AdaptStep::LinearPre(t) => json!({"kind": "linear_pre", "map": linear_map(t)}),
    }
}

pub fn adaptation(ar: &AdaptationResult) -> Value {
    json!({
        "T": linear_map(&ar.t),
        "psi": psi(&ar.psi),
        "psi_order": rq_opt(&ar.psi_order),
        "F": polynomial(&ar.f),
        "steps": ar.steps.iter().map(step).collect::<Vec<_>>(),
        "adapted": ar.adapted,
        "generic_adapted": ar.generic_adapted,
    })
}

pub fn height(h: &HeightValue) -> Value {
    json!({
        "h": rq(&h.h),
        "d_adapted": rq(&h.d_adapted),
        "d_star": rq(&h.d_star),
    })
}

pub fn classification(r: &ClassificationReport) -> Value {
    let witness = r.witness_b.as_ref().map(|w| {
        json!({
            "edge": edge(&w.edge),
            "side": if w.side >= 0 { "x>0" } else { "x<0" },
            "zero_order": w.zero_order,
            "psi_order": rq(&w.psi_order),
            "threshold": rq(&w.threshold),
            "slope_bound": rq(&w.slope_bound),
        })
    });
    json!({
        "height": height(&r.height),
        "p_critical": rq(&r.p_critical),
        "exceptional": {
            "a": r.exceptional_a,
            "b": r.exceptional_b,
            "witness_b": witness,
            "sampled_transforms": r.sampled_transforms,
        },
        "adaptation": adaptation(&r.adaptation),
    })
}

fn damping(d: &DampingForm) -> Value {
    match d {
        DampingForm::FStarPower { exponent } => {
            json!({"form": "fstar_power", "exponent": rq(exponent)})
        }
        DampingForm::WeightedFyy { x_exponent } => {
            json!({"form": "weighted_fyy", "x_exponent": rq(x_exponent)})
        }
        DampingForm::PlainFyy => json!({"form": "plain_fyy"}),
    }
}

fn bound(b: &PredictedBound) -> Value {
    let quantity = match b.quantity {
        BoundQuantity::DyF(m) => format!("dy^{m} F"),
        BoundQuantity::DxxOriginal => "dxx f".to_string(),
        BoundQuantity::FStar => "fstar".to_string(),
    };
    let comparator = match b.comparator {
        Comparator::LowerBound => ">=",
        Comparator::UpperBound => "<=",
        Comparator::TwoSided => "~",
    };
    json!({
        "quantity": quantity,
        "comparator": comparator,
        "alpha": rq(&b.alpha),
        "beta": rq(&b.beta),
        "c_lo": rq_opt(&b.c_lo),
        "c_hi": rq_opt(&b.c_hi),
    })
}

fn sliver(s: &Sliver) -> Value {
    let kind = match s.kind {
        SliverKind::D => "D",
        SliverKind::E => "E",
        SliverKind::F => "F",
        SliverKind::G => "G",
    };
    let shape = match &s.shape {
        RegionShape::VertexSector {
            weight_low,
            weight_high,
        } => json!({
            "kind": "vertex_sector",
            "weight_low": rq(weight_low),
            "weight_high": rq_opt(weight_high),
        }),
        RegionShape::Band { weight } => json!({"kind": "band", "weight": rq(weight)}),
        RegionShape::FullDisk => json!({"kind": "full_disk"}),
    };
    json!({
        "kind": kind,
        "side": if matches!(s.side, hsurf_core::slivers::Side::PosX) { "x>0" } else { "x<0" },
        "index": s.index,
        "vertex": [rq(&s.vertex.0), rq(&s.vertex.1)],
        "edge": s.edge.as_ref().map(edge),
        "shape": shape,
        "r": rq_opt(&s.center),
        "delta": rq_opt(&s.half_width),
        "k": s.k,
        "N0": rq(&s.n0),
        "C_r": rq_opt(&s.c_r),
        "damping": damping(&s.damping),
        "bounds": s.bounds.iter().map(bound).collect::<Vec<_>>(),
    })
}

pub fn decomposition(d: &Decomposition) -> Value {
    json!({
        "n0": rq(&d.n0),
        "radius": rq(&d.radius),
        "d": rq(&d.d),
        "d_star": rq(&d.d_star),
        "fstar_squared": polynomial(&d.fstar_squared),
        "slivers": d.slivers.iter().map(sliver).collect::<Vec<_>>(),
    })
}

pub fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

pub fn fit(f: &FitResult) -> Value {
    json!({
        "slope": f.slope,
        "intercept": f.intercept,
        "r_squared": f.r_squared,
        "points": f.points.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "verdict": verdict(f.verdict),
    })
}

pub fn comparability(rs: &[ComparabilityReport]) -> Value {
    Value::Array(
        rs.iter()
            .map(|r| {
                json!({
                    "sliver": r.sliver_index,
                    "quantity": r.quantity,
                    "margin": r.margin,
                    "worst_ratio": r.worst_ratio,
                    "samples": r.samples_used,
                    "verdict": if r.pass { "PASS" } else { "FAIL" },
                })
            })
            .collect(),
    )
}

pub fn integrability(r: &IntegrabilityReport) -> Value {
    json!({
        "d": rq(&r.d),
        "d_star": rq(&r.d_star),
        "threshold": r.threshold,
        "lines": r.lines.iter().map(|l| json!({
            "s": l.s,
            "log2_rate": if l.log2_rate.is_finite() { json!(l.log2_rate) } else { json!("inf") },
            "trend": trend(l.trend),
            "expected": l.expected.map(trend),
            "verdict": verdict(l.verdict),
            "annulus_log2_sums": l.annulus_log2_sums.iter().map(|v| {
                if v.is_finite() { json!(v) } else { json!("inf") }
            }).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn trend(t: Trend) -> &'static str {
    match t {
        Trend::Convergent => "convergent",
        Trend::Divergent => "divergent",
        Trend::Flat => "flat",
    }
}

/// ISO-8601 UTC timestamp; honors SOURCE_DATE_EPOCH for reproducible output.
pub fn timestamp() -> String {
    let epoch = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs() as i64)
                .unwrap_or(0)
        });
    let days = epoch.div_euclid(86_400);
    let secs = epoch.rem_euclid(86_400);
    // civil date from days since 1970-01-01 (Howard Hinnant's algorithm)
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if m <= 2 { y + 1 } else { y };
    format!(
        "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
        y,
        m,
        d,
        secs / 3600,
        (secs % 3600) / 60,
        secs % 60
    )
}
