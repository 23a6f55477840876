//! Exceptional-condition decisions and the critical exponent.
//!
//! Condition a) is the identical vanishing of the Hessian determinant; for
//! polynomial inputs an infinite-order zero at the origin is exactly D == 0.
//! Condition b) concerns generic adapted coordinate systems whose bisectrix
//! edge carries a high-order degenerate zero of the differentiated edge
//! polynomial while the shift order b satisfies |m_e| < 1/b. The universal
//! quantifier over coordinate systems is semi-decided by sampling generic
//! pre-transforms: a "false" is sound (a good pair was found); a "true"
//! carries the sample count as evidence strength.

use crate::adapt::{self, AdaptationResult, HeightValue};
use crate::error::Error;
use crate::newton::{self, CompactEdge, LocusKind};
use crate::poly::Polynomial;
use crate::rat::{self, Rat};
use crate::realroots::{self, UniPoly};
use crate::Result;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Default number of extra generic transforms sampled when condition b)
/// fires on the first one.
pub const DEFAULT_TRANSFORM_SAMPLES: usize = 8;

/// Trial budget for the genericizing map search.
pub const DEFAULT_TRIAL_BUDGET: u32 = 96;

/// Witness that exceptional condition b) holds for one coordinate system.
#[derive(Clone, Debug)]
pub struct ExceptionalWitnessB {
    pub edge: CompactEdge,
    /// +1 for the x > 0 side, -1 for x < 0.
    pub side: i8,
    pub zero_order: u32,
    pub psi_order: Rat,
    /// max(1, d(F) - 1).
    pub threshold: Rat,
    /// 1 / psi_order.
    pub slope_bound: Rat,
}

/// Full classification of a critical point.
#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub height: HeightValue,
    pub p_critical: Rat,
    pub exceptional_a: bool,
    pub exceptional_b: bool,
    pub witness_b: Option<ExceptionalWitnessB>,
    pub sampled_transforms: usize,
    pub adaptation: AdaptationResult,
}

/// Condition a): the Hessian determinant vanishes identically.
pub fn exceptional_a(p: &Polynomial) -> Result<bool> {
    Ok(p.hessian_determinant()?.is_zero())
}

/// Condition b) for one generic adapted coordinate system.
///
/// The degeneracy test excludes zeros of the edge polynomial itself:
/// the differentiated edge polynomial must vanish to high order at a y0
/// with F_e(1, y0) != 0. Note y0 = 0 is NOT excluded here; the canonical
/// exceptional family (y + x^a)^b + x^c needs it.
pub fn exceptional_b(ar: &AdaptationResult) -> Result<(bool, Option<ExceptionalWitnessB>)> {
    if !ar.generic_adapted {
        return Err(Error::NotGenericAdapted);
    }
    let Some(b) = ar.psi_order.clone() else {
        // psi == 0: the convention 1/b = 0 makes |m_e| < 1/b unsatisfiable.
        return Ok((false, None));
    };
    let np = newton::newton_polygon(&ar.f)?;
    let locus = newton::bisectrix_locus(&np);
    if locus.kind != LocusKind::InteriorOfEdge {
        return Ok((false, None));
    }
    let e = &np.edges[locus.edge_index.expect("interior locus")];
    // |m_e| < 1/b <=> b < M_e.
    if b >= e.weight {
        return Ok((false, None));
    }
    let d = newton::newton_distance(&np);
    let threshold = (d - Rat::one()).max(Rat::one());
    let ep = newton::edge_polynomial(&ar.f, e)?;
    let sides: &[i8] = if ep.has_integer_x_exponents() {
        &[1, -1]
    } else {
        &[1]
    };
    let mut side_orders: Vec<(i8, u32)> = Vec::new();
    for &s in sides {
        let fe = UniPoly::new(ep.restrict_x(s)?);
        if fe.is_zero() {
            continue;
        }
        let dfe = fe.derivative();
        if dfe.is_zero() {
            continue;
        }
        let (ord, _) = realroots::max_real_zero_order(&dfe, Some(&fe), false)?;
        side_orders.push((s, ord));
    }
    // The two sides mirror each other for integer weights; hold that as a
    // sanity check rather than assuming it.
    if side_orders.len() == 2 {
        debug_assert_eq!(side_orders[0].1, side_orders[1].1);
    }
    for (s, ord) in side_orders {
        if Rat::from(BigInt::from(ord)) > threshold {
            return Ok((
                true,
                Some(ExceptionalWitnessB {
                    edge: e.clone(),
                    side: s,
                    zero_order: ord,
                    psi_order: b.clone(),
                    threshold,
                    slope_bound: b.recip(),
                }),
            ));
        }
    }
    Ok((false, None))
}

/// Classify a critical point: height, critical exponent, and the two
/// exceptional conditions. When b) fires, it is re-tested on
/// `transform_samples` further generic pre-transforms and reported true only
/// if every sampled coordinate system exhibits it.
pub fn classify(p: &Polynomial, transform_samples: usize) -> Result<ClassificationReport> {
    let exceptional_a = exceptional_a(p)?;
    let samples = adapt::generic_samples(p, DEFAULT_TRIAL_BUDGET, transform_samples + 1)?;
    let mut main: Option<AdaptationResult> = None;
    let mut all_b = true;
    let mut witness = None;
    let mut used = 0usize;
    let mut h: Option<Rat> = None;
    for (t_map, q) in samples {
        let mut ar = adapt::adapt(&q, adapt::DEFAULT_MAX_STEPS)?;
        ar.t = t_map.clone();
        if !t_map.is_identity() {
            ar.steps
                .insert(0, adapt::AdaptStep::LinearPre(t_map.clone()));
        }
        if !ar.generic_adapted {
            return Err(Error::NotGenericAdapted);
        }
        let d = newton::newton_distance(&newton::newton_polygon(&ar.f)?);
        match &h {
            None => h = Some(d),
            Some(prev) => {
                // The height is a coordinate invariant; a mismatch here is a bug.
                assert_eq!(prev, &d, "height differs across generic transforms");
            }
        }
        let (flag, wit) = exceptional_b(&ar)?;
        used += 1;
        if main.is_none() {
            main = Some(ar);
            witness = wit;
        }
        if !flag {
            all_b = false;
            break; // a good coordinate system exists; b) cannot hold
        }
    }
    let adaptation = main.expect("at least one generic sample");
    let h = h.expect("at least one height");
    let height = HeightValue {
        h: h.clone(),
        d_adapted: h.clone(),
        d_star: adapt::d_star(&h),
    };
    let exceptional_b = all_b;
    Ok(ClassificationReport {
        p_critical: height.h.clone().max(rat::rint(2)),
        height,
        exceptional_a,
        exceptional_b,
        witness_b: if exceptional_b { witness } else { None },
        sampled_transforms: used,
        adaptation,
    })
}

/// A degenerate edge on or above the bisectrix that is neither of slope -1
/// nor anchored on the y-axis.
#[derive(Clone, Debug)]
pub struct DegenerateEdgeViolation {
    pub edge: CompactEdge,
    pub side: i8,
    pub zero_order: u32,
    pub d_star_minus_one: Rat,
}

/// Structural check: for every compact edge of N(F) lying entirely on or
/// above the bisectrix, if the differentiated edge polynomial has a real
/// zero y0 != 0 with F_e(1, y0) != 0 of order exceeding d* - 1, then the
/// edge must have slope -1 and its upper vertex on the y-axis. Returns the
/// violating edges; an adapted form from this crate should yield none.
pub fn check_degenerate_edges(f: &Polynomial) -> Result<Vec<DegenerateEdgeViolation>> {
    let np = newton::newton_polygon(f)?;
    let adapted_ok = adapt::is_adapted(f)?.0;
    if !(adapted_ok && np.slopes_at_least_minus_one() && np.touches_y_axis()) {
        return Err(Error::NotGenericAdapted);
    }
    let d = newton::newton_distance(&np);
    let dstar = adapt::d_star(&d);
    let threshold = &dstar - Rat::one();
    let mut violations = Vec::new();
    for e in &np.edges {
        // entirely on or above the bisectrix: the lower vertex has t2 >= t1
        if e.lower.t2 < e.lower.t1 {
            continue;
        }
        let ep = newton::edge_polynomial(f, e)?;
        let sides: &[i8] = if ep.has_integer_x_exponents() {
            &[1, -1]
        } else {
            &[1]
        };
        for &s in sides {
            let fe = UniPoly::new(ep.restrict_x(s)?);
            if fe.is_zero() {
                continue;
            }
            let dfe = fe.derivative();
            if dfe.is_zero() {
                continue;
            }
            let (ord, _) = realroots::max_real_zero_order(&dfe, Some(&fe), true)?;
            if Rat::from(BigInt::from(ord)) > threshold {
                let slope_ok = e.slope == -Rat::one();
                let on_axis = e.upper.t1.is_zero();
                if !(slope_ok && on_axis) {
                    violations.push(DegenerateEdgeViolation {
                        edge: e.clone(),
                        side: s,
                        zero_order: ord,
                        d_star_minus_one: threshold.clone(),
                    });
                }
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use crate::rat::{rat, rint};

    fn p(src: &str) -> Polynomial {
        parse(src).unwrap()
    }

    #[test]
    fn condition_a() {
        assert!(exceptional_a(&p("(x + y)^2")).unwrap());
        assert!(!exceptional_a(&p("x^2 + y^2")).unwrap());
        assert!(!exceptional_a(&p("(y - x^2)^2")).unwrap());
    }

    #[test]
    fn condition_b_paper_family() {
        let ar = adapt::adapt(&p("(y + x^2)^3 + x^7"), 32).unwrap();
        let (flag, wit) = exceptional_b(&ar).unwrap();
        assert!(flag);
        let wit = wit.unwrap();
        assert_eq!(wit.zero_order, 2);
        assert_eq!(wit.psi_order, rint(2));
        assert_eq!(wit.threshold, rat(11, 10));
        assert_eq!(wit.slope_bound, rat(1, 2));
        assert_eq!(wit.edge.slope, rat(-3, 7));
    }

    #[test]
    fn condition_b_negative_cases() {
        // F = y^2 from (y - x^2)^2: bisectrix at a vertex-side locus
        let ar = adapt::adapt(&p("(y - x^2)^2"), 32).unwrap();
        let (flag, _) = exceptional_b(&ar).unwrap();
        assert!(!flag);

        // psi == 0: the 1/b = 0 convention makes b) vacuously false
        let ar = adapt::adapt(&p("y^2 + x^4"), 32).unwrap();
        let (flag, _) = exceptional_b(&ar).unwrap();
        assert!(!flag);
    }

    #[test]
    fn classify_suite() {
        let r = classify(&p("x^2 + y^2"), 8).unwrap();
        assert_eq!(r.p_critical, rint(2));
        assert_eq!(r.height.h, rint(1));
        assert!(!r.exceptional_a && !r.exceptional_b);

        let r = classify(&p("(y + x^2)^3 + x^7"), 8).unwrap();
        assert_eq!(r.p_critical, rat(21, 10));
        assert!(r.exceptional_b);
        assert!(r.sampled_transforms >= 9);
        assert!(!r.exceptional_a);

        let r = classify(&p("(x + y)^2"), 8).unwrap();
        assert!(r.exceptional_a);
        assert_eq!(r.height.h, rint(2));
        assert_eq!(r.p_critical, rint(2));

        let r = classify(&p("x*y"), 8).unwrap();
        assert_eq!(r.height.h, rint(1));
        assert_eq!(r.p_critical, rint(2));
        assert!(!r.exceptional_a && !r.exceptional_b);

        let r = classify(&p("(y - x^2)^2"), 8).unwrap();
        assert_eq!(r.p_critical, rint(2));
        assert!(!r.exceptional_a && !r.exceptional_b);
    }

    #[test]
    fn degenerate_edge_check_empty_on_good_forms() {
        assert!(check_degenerate_edges(&p("y^2 + x^4")).unwrap().is_empty());
        // qualifying zero sits at y0 = 0, excluded by this check's y0 != 0
        assert!(check_degenerate_edges(&p("y^3 + x^7")).unwrap().is_empty());
    }

    #[test]
    fn degenerate_edge_check_rejects_non_generic_input() {
        // polygon does not touch the y-axis
        assert!(matches!(
            check_degenerate_edges(&p("x^2*y + x^5")),
            Err(Error::NotGenericAdapted)
        ));
    }
}
