//! Newton polygon geometry over exact rationals.
//!
//! The polygon of a nonzero polynomial is the convex hull of the union of
//! upper-right quadrants anchored at the exponent pairs of its nonzero terms.
//! All hull construction uses exact cross-product orientation tests; there is
//! no epsilon geometry anywhere in this module.

use crate::error::Error;
use crate::poly::Polynomial;
use crate::rat::{self, Rat};
use crate::Result;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

/// A polygon vertex in (t1, t2) exponent coordinates. Every vertex is the
/// exponent pair of a nonzero term of the source polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonVertex {
    pub t1: Rat,
    pub t2: Rat,
}

impl PolygonVertex {
    pub fn new(t1: Rat, t2: Rat) -> Self {
        PolygonVertex { t1, t2 }
    }
}

/// A compact (bounded) edge of the polygon, with negative slope m_e,
/// weight M = -1/m_e and support level alpha: t1 + M t2 = alpha on the edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactEdge {
    pub upper: PolygonVertex,
    pub lower: PolygonVertex,
    pub slope: Rat,
    pub weight: Rat,
    pub support_level: Rat,
}

/// Newton polygon: vertices ordered by strictly decreasing t2 (so t1 strictly
/// increasing), compact edges between consecutive vertices, and the two
/// unbounded rays attached at the first and last vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<PolygonVertex>,
    pub edges: Vec<CompactEdge>,
    pub has_vertical_ray: bool,
    pub has_horizontal_ray: bool,
}

/// Where the bisectrix point (d, d) sits on the polygon boundary.
///
/// A point strictly inside an unbounded ray is reported as `AtVertex` with
/// the junction vertex as reference; only interior-of-a-compact-edge matters
/// for nonadaptedness, so `AtVertex` always means adapted. The ray variants
/// stay in the enum for the serialization schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LocusKind {
    InteriorOfEdge,
    AtVertex,
    OnVerticalRay,
    OnHorizontalRay,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectrixLocus {
    pub kind: LocusKind,
    /// Index into `edges` when kind = InteriorOfEdge.
    pub edge_index: Option<usize>,
    /// Index into `vertices` when kind = AtVertex (the vertex itself, or the
    /// ray junction vertex when (d,d) sits strictly on a ray).
    pub vertex_index: Option<usize>,
    /// The point (d, d).
    pub point: (Rat, Rat),
}

impl NewtonPolygon {
    pub fn single_vertex(&self) -> Option<&PolygonVertex> {
        if self.vertices.len() == 1 {
            Some(&self.vertices[0])
        } else {
            None
        }
    }

    /// Smallest t1 over the polygon (the vertical ray's abscissa).
    pub fn t1_min(&self) -> Rat {
        self.vertices.first().expect("nonempty").t1.clone()
    }

    /// Smallest t2 over the polygon (the horizontal ray's ordinate).
    pub fn t2_min(&self) -> Rat {
        self.vertices.last().expect("nonempty").t2.clone()
    }

    /// All edge slopes are at least -1 (weights >= 1).
    pub fn slopes_at_least_minus_one(&self) -> bool {
        self.edges.iter().all(|e| e.weight >= Rat::one())
    }

    /// The polygon touches the t2-axis, i.e. the top vertex is (0, a).
    pub fn touches_y_axis(&self) -> bool {
        self.t1_min().is_zero()
    }
}

/// Exact lower-left hull of the quadrant corners {(ax, by)}.
pub fn newton_polygon(p: &Polynomial) -> Result<NewtonPolygon> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut pts: Vec<(Rat, Rat)> = p
        .terms()
        .map(|t| (t.ax, Rat::from(BigInt::from(t.by))))
        .collect();
    pts.sort();
    pts.dedup();

    // Pareto staircase: drop any point dominated by another (both coordinates
    // >=). After sorting by (t1, t2), sweep from the right keeping the
    // running minimum of t2.
    let mut staircase: Vec<(Rat, Rat)> = Vec::new();
    // For equal t1 keep only the smallest t2: the sort puts it first.
    let mut dedup_t1: Vec<(Rat, Rat)> = Vec::new();
    for pt in pts {
        match dedup_t1.last() {
            Some((last_t1, _)) if *last_t1 == pt.0 => {}
            _ => dedup_t1.push(pt),
        }
    }
    let mut min_t2: Option<Rat> = None;
    for pt in dedup_t1 {
        let keep = match &min_t2 {
            Some(m) => pt.1 < *m,
            None => true,
        };
        if keep {
            min_t2 = Some(pt.1.clone());
            staircase.push(pt);
        }
    }
    // t1 ascending, t2 strictly descending

    // Lower-left convex chain over the staircase: keep only vertices where
    // the boundary turns; collinear points stay off the vertex list.
    let mut hull: Vec<(Rat, Rat)> = Vec::new();
    for pt in staircase {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // cross of (b - a) x (pt - a): positive when b lies strictly
            // below the chord a-pt, i.e. b is a genuine hull vertex.
            let cross = (&b.0 - &a.0) * (&pt.1 - &a.1) - (&b.1 - &a.1) * (&pt.0 - &a.0);
            if cross <= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let vertices: Vec<PolygonVertex> = hull
        .into_iter()
        .map(|(t1, t2)| PolygonVertex::new(t1, t2))
        .collect();
    let mut edges = Vec::new();
    for w in vertices.windows(2) {
        let (u, l) = (&w[0], &w[1]);
        let slope = (&l.t2 - &u.t2) / (&l.t1 - &u.t1);
        let weight = -slope.clone().recip();
        let support_level = &u.t1 + &weight * &u.t2;
        edges.push(CompactEdge {
            upper: u.clone(),
            lower: l.clone(),
            slope,
            weight,
            support_level,
        });
    }
    Ok(NewtonPolygon {
        vertices,
        edges,
        has_vertical_ray: true,
        has_horizontal_ray: true,
    })
}

/// Newton distance: inf { t : (t,t) in N(R) }.
///
/// (t,t) lies in the polygon iff t >= t1_min, t >= t2_min and
/// t (1 + M_e) >= alpha_e for every compact edge, so the distance is the
/// maximum of those lower bounds.
pub fn newton_distance(np: &NewtonPolygon) -> Rat {
    let mut d = np.t1_min().max(np.t2_min());
    for e in &np.edges {
        let cand = &e.support_level / (Rat::one() + &e.weight);
        if cand > d {
            d = cand;
        }
    }
    d
}

/// Classify where (d, d) sits on the polygon boundary.
pub fn bisectrix_locus(np: &NewtonPolygon) -> BisectrixLocus {
    let d = newton_distance(np);
    let point = (d.clone(), d.clone());

    for (i, v) in np.vertices.iter().enumerate() {
        if v.t1 == d && v.t2 == d {
            return BisectrixLocus {
                kind: LocusKind::AtVertex,
                edge_index: None,
                vertex_index: Some(i),
                point,
            };
        }
    }
    for (i, e) in np.edges.iter().enumerate() {
        let on_line = &d + &e.weight * &d == e.support_level;
        if on_line && e.upper.t1 < d && d < e.lower.t1 {
            return BisectrixLocus {
                kind: LocusKind::InteriorOfEdge,
                edge_index: Some(i),
                vertex_index: None,
                point,
            };
        }
    }
    // Strictly on a ray: report the junction vertex (see LocusKind notes).
    if d == np.t1_min() {
        return BisectrixLocus {
            kind: LocusKind::AtVertex,
            edge_index: None,
            vertex_index: Some(0),
            point,
        };
    }
    debug_assert!(d == np.t2_min());
    BisectrixLocus {
        kind: LocusKind::AtVertex,
        edge_index: None,
        vertex_index: Some(np.vertices.len() - 1),
        point,
    }
}

/// Sum of the terms of p whose exponents lie on the compact edge e.
pub fn edge_polynomial(p: &Polynomial, e: &CompactEdge) -> Result<Polynomial> {
    let np = newton_polygon(p)?;
    if !np.edges.iter().any(|f| f == e) {
        return Err(Error::EdgeNotOfPolygon);
    }
    let mut out = Polynomial::zero();
    for t in p.terms() {
        let level = &t.ax + &e.weight * Rat::from(BigInt::from(t.by));
        if level == e.support_level {
            out.add_term(t.coeff, t.ax, t.by);
        }
    }
    Ok(out)
}

/// The inner polynomial of F*: sum over polygon vertices of (x^v1 y^v2)^2.
/// Callers evaluate F* as its square root.
pub fn fstar_squared(np: &NewtonPolygon) -> Polynomial {
    let mut out = Polynomial::zero();
    for v in &np.vertices {
        let by2 = rat::to_i64(&v.t2).expect("vertex t2 is an integer exponent") as u32 * 2;
        out.add_term(Rat::one(), &v.t1 + &v.t1, by2);
    }
    out
}

// ---------------------------------------------------------------------------
