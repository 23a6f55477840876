//! Sparse exact-rational bivariate polynomials.
//!
//! Exponents on x are nonnegative rationals (fractional powers of x appear
//! during adaptation with fractional-weight shifts); exponents on y are
//! nonnegative integers. Terms are keyed by (ax, by) in lexicographic order,
//! which fixes the canonical serialization.

use crate::error::Error;
use crate::rat::{self, Rat};
use crate::Result;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent pair (ax, by); lex order on (ax, by) is the canonical term order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpPair {
    pub ax: Rat,
    pub by: u32,
}

/// One term c * x^ax * y^by with c != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rat,
    pub ax: Rat,
    pub by: u32,
}

/// Sparse bivariate polynomial; no zero coefficients, no duplicate keys.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<ExpPair, Rat>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(c, Rat::zero(), 0);
        p
    }

    pub fn one() -> Self {
        Polynomial::constant(Rat::one())
    }

    /// x^1.
    pub fn x() -> Self {
        Polynomial::monomial(Rat::one(), Rat::one(), 0)
    }

    /// y^1.
    pub fn y() -> Self {
        Polynomial::monomial(Rat::one(), Rat::zero(), 1)
    }

    pub fn monomial(coeff: Rat, ax: Rat, by: u32) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(coeff, ax, by);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Rat, Rat, u32)>>(it: I) -> Self {
        let mut p = Polynomial::zero();
        for (c, ax, by) in it {
            p.add_term(c, ax, by);
        }
        p
    }

    /// Add c * x^ax * y^by, combining with an existing term.
    pub fn add_term(&mut self, coeff: Rat, ax: Rat, by: u32) {
        if coeff.is_zero() {
            return;
        }
        assert!(!ax.is_negative(), "x-exponent must be >= 0");
        let key = ExpPair { ax, by };
        let entry = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (ax, by)-lex order.
    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(k, c)| Term {
            coeff: c.clone(),
            ax: k.ax.clone(),
            by: k.by,
        })
    }

    pub fn coeff(&self, ax: &Rat, by: u32) -> Rat {
        self.terms
            .get(&ExpPair { ax: ax.clone(), by })
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// True when every x-exponent is an integer.
    pub fn has_integer_x_exponents(&self) -> bool {
        self.terms.keys().all(|k| rat::is_integer(&k.ax))
    }

    pub fn max_y_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.by).max().unwrap_or(0)
    }

    pub fn max_x_exponent(&self) -> Rat {
        self.terms
            .keys()
            .map(|k| k.ax.clone())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn neg(&self) -> Self {
        let mut out = Polynomial::zero();
        for t in self.terms() {
            out.add_term(-t.coeff, t.ax, t.by);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for t in other.terms() {
            out.add_term(t.coeff, t.ax, t.by);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Polynomial::zero();
        for t in self.terms() {
            out.add_term(t.coeff * c, t.ax, t.by);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Polynomial::zero();
        for a in self.terms() {
            for b in other.terms() {
                out.add_term(&a.coeff * &b.coeff, &a.ax + &b.ax, a.by + b.by);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Swap the roles of x and y. Requires integer x-exponents.
    pub fn swap_axes(&self) -> Result<Self> {
        if !self.has_integer_x_exponents() {
            return Err(Error::FractionalExponentLinearSub);
        }
        let mut out = Polynomial::zero();
        for t in self.terms() {
            let new_by = rat::to_i64(&t.ax)
                .and_then(|v| u32::try_from(v).ok())
                .ok_or(Error::FractionalExponentLinearSub)?;
            out.add_term(t.coeff, Rat::from(BigInt::from(t.by)), new_by);
        }
        Ok(out)
    }

    /// Termwise derivative of the given order in x or y.
    ///
    /// For x-derivatives every term must have an integer x-exponent or one at
    /// least `order`, otherwise a genuinely negative exponent would arise.
    pub fn differentiate(&self, var: Var, order: u32) -> Result<Self> {
        if order == 0 {
            return Ok(self.clone());
        }
        let mut out = Polynomial::zero();
        for t in self.terms() {
            match var {
                Var::Y => {
                    if t.by < order {
                        continue;
                    }
                    let mult = rat::falling(&Rat::from(BigInt::from(t.by)), order);
                    out.add_term(t.coeff * mult, t.ax, t.by - order);
                }
                Var::X => {
                    let ord_rat = Rat::from(BigInt::from(order));
                    if rat::is_integer(&t.ax) {
                        if t.ax < ord_rat {
                            continue; // falling factorial hits zero
                        }
                    } else if t.ax < ord_rat {
                        return Err(Error::NegativeExponentResult {
                            exponent: t.ax.clone(),
                            order,
                        });
                    }
                    let mult = rat::falling(&t.ax, order);
                    if mult.is_zero() {
                        continue;
                    }
                    out.add_term(t.coeff * mult, &t.ax - &ord_rat, t.by);
                }
            }
        }
        Ok(out)
    }

    /// Exact expansion of p(x, y + sign * psi(x)).
    pub fn substitute_y_shift(&self, psi: &PsiSeries, sign: i8) -> Self {
        let mut cur = self.clone();
        for (c, m) in &psi.shifts {
            let c = if sign >= 0 { c.clone() } else { -c.clone() };
            cur = cur.shift_one(&c, m);
        }
        cur
    }

    /// p(x, y + c x^m) for a single shift.
    fn shift_one(&self, c: &Rat, m: &Rat) -> Self {
        let mut out = Polynomial::zero();
        for t in self.terms() {
            // (y + c x^m)^by = sum_j C(by, j) y^j (c x^m)^(by-j)
            for j in 0..=t.by {
                let k = t.by - j;
                let coeff = &t.coeff * rat::binom(t.by, j) * rat::pow_u(c, k);
                let ax = &t.ax + m * Rat::from(BigInt::from(k));
                out.add_term(coeff, ax, j);
            }
        }
        out
    }

    /// Exact expansion of p(T(x,y)). Requires integer x-exponents.
    pub fn substitute_linear(&self, t_map: &LinearMap2) -> Result<Self> {
        if !self.has_integer_x_exponents() {
            return Err(Error::FractionalExponentLinearSub);
        }
        let new_x = Polynomial::from_terms([
            (t_map.a11.clone(), Rat::one(), 0),
            (t_map.a12.clone(), Rat::zero(), 1),
        ]);
        let new_y = Polynomial::from_terms([
            (t_map.a21.clone(), Rat::one(), 0),
            (t_map.a22.clone(), Rat::zero(), 1),
        ]);
        let mut out = Polynomial::zero();
        for t in self.terms() {
            let a = rat::to_i64(&t.ax).expect("checked integer") as u32;
            let part = new_x.pow(a).mul(&new_y.pow(t.by)).scale(&t.coeff);
            out = out.add(&part);
        }
        Ok(out)
    }

    /// Exact Hessian determinant p_xx p_yy - p_xy^2. Requires integer
    /// x-exponents.
    pub fn hessian_determinant(&self) -> Result<Self> {
        if !self.has_integer_x_exponents() {
            return Err(Error::FractionalExponentLinearSub);
        }
        let pxx = self.differentiate(Var::X, 2)?;
        let pyy = self.differentiate(Var::Y, 2)?;
        let pxy = self.differentiate(Var::X, 1)?.differentiate(Var::Y, 1)?;
        Ok(pxx.mul(&pyy).sub(&pxy.mul(&pxy)))
    }

    /// Order of vanishing at the origin: min over terms of ax + by.
    pub fn vanishing_order_origin(&self) -> Result<Rat> {
        self.terms()
            .map(|t| &t.ax + Rat::from(BigInt::from(t.by)))
            .min()
            .ok_or(Error::ZeroPolynomial)
    }

    /// True when the polynomial has no constant or degree-1 terms, i.e. it
    /// vanishes to second order at the origin as a critical point must.
    pub fn has_critical_point_at_origin(&self) -> bool {
        !self.terms.keys().any(|k| {
            (k.ax.is_zero() && k.by == 0)
                || (k.ax.is_one() && k.by == 0)
                || (k.ax.is_zero() && k.by == 1)
        })
    }

    /// Exact evaluation at rational (x, y). Fractional x-exponents are not
    /// representable here; use `evaluate` for those.
    pub fn eval_rational(&self, x: &Rat, y: &Rat) -> Result<Rat> {
        let mut acc = Rat::zero();
        for t in self.terms() {
            let a = rat::to_i64(&t.ax).ok_or(Error::FractionalExponentLinearSub)?;
            acc += t.coeff
                * rat::pow_u(x, a as u32)
                * rat::pow_u(y, t.by);
        }
        Ok(acc)
    }

    /// Restrict to x = s (s = 1 or -1) giving the univariate coefficient list
    /// in y. Requires integer x-exponents when s = -1.
    pub fn restrict_x(&self, s: i8) -> Result<Vec<Rat>> {
        let mut coeffs = vec![Rat::zero(); self.max_y_degree() as usize + 1];
        for t in self.terms() {
            let factor = if s >= 0 {
                Rat::one()
            } else {
                let a = rat::to_i64(&t.ax).ok_or(Error::NegativeBaseFractionalPower)?;
                if a % 2 == 0 {
                    Rat::one()
                } else {
                    -Rat::one()
                }
            };
            coeffs[t.by as usize] += t.coeff * factor;
        }
        Ok(coeffs)
    }

    /// High-precision evaluation; see the module notes on the enclosure
    /// strategy. Returns the midpoint of a rational enclosure whose relative
    /// width meets 2^-(precision_bits - 4).
    pub fn evaluate(&self, x: f64, y: f64, precision_bits: u32) -> Result<f64> {
        let precision_bits = precision_bits.max(53);
        let fractional = !self.has_integer_x_exponents();
        if fractional && x <= 0.0 {
            return Err(Error::NegativeBaseFractionalPower);
        }
        let xr = rat::from_f64(x).ok_or_else(|| Error::Invalid("non-finite x".into()))?;
        let yr = rat::from_f64(y).ok_or_else(|| Error::Invalid("non-finite y".into()))?;

        // Exact part: integer x-exponents.
        let mut exact = Rat::zero();
        let mut frac_terms: Vec<Term> = Vec::new();
        for t in self.terms() {
            if let Some(a) = rat::to_i64(&t.ax) {
                exact += &t.coeff * rat::pow_u(&xr, a as u32) * rat::pow_u(&yr, t.by);
            } else {
                frac_terms.push(t);
            }
        }
        if frac_terms.is_empty() {
            return Ok(rat::to_f64(&exact));
        }

        // Enclose each fractional term via a dyadic root enclosure and sum.
        let mut work_bits = precision_bits + 16;
        for _round in 0..3 {
            let mut lo_sum = exact.clone();
            let mut hi_sum = exact.clone();
            let mut roots: BTreeMap<BigInt, (Rat, Rat)> = BTreeMap::new();
            for t in &frac_terms {
                let q = t.ax.denom().clone();
                let enclosure = roots
                    .entry(q.clone())
                    .or_insert_with(|| nth_root_enclosure(&xr, &q, work_bits));
                let p = t.ax.numer().to_u32().ok_or_else(|| {
                    Error::Invalid("x-exponent numerator out of range".into())
                })?;
                // x^(p/q) = root^p with root > 0: monotone, so endpoint powers
                // bound the value.
                let lo_pow = rat::pow_u(&enclosure.0, p);
                let hi_pow = rat::pow_u(&enclosure.1, p);
                let ypow = rat::pow_u(&yr, t.by);
                let (a, b) = (&t.coeff * &lo_pow * &ypow, &t.coeff * &hi_pow * &ypow);
                let (tlo, thi) = if a <= b { (a, b) } else { (b, a) };
                lo_sum += tlo;
                hi_sum += thi;
            }
            let width = &hi_sum - &lo_sum;
            let mid = (&lo_sum + &hi_sum) / rat::rint(2);
            let scale = rat::abs(&mid);
            let tol = Rat::new(BigInt::one(), BigInt::one() << (precision_bits - 4) as usize);
            if width <= &scale * &tol || width <= Rat::new(BigInt::one(), BigInt::one() << 512) {
                return Ok(rat::to_f64(&mid));
            }
            work_bits *= 2;
        }
        Err(Error::Invalid(
            "evaluation enclosure did not converge (severe cancellation)".into(),
        ))
    }

    /// Compile to a fast f64 evaluator for the numeric harness.
    pub fn compiled(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }
}

/// Differentiation variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Dyadic enclosure [lo, hi] of x^(1/q) for x > 0, with hi - lo <= lo / 2^bits.
fn nth_root_enclosure(x: &Rat, q: &BigInt, bits: u32) -> (Rat, Rat) {
    let qf = q.to_u32().expect("root index fits u32");
    let xf = rat::to_f64(x);
    let seed = xf.powf(1.0 / qf as f64);
    // Bracket around the f64 seed, then bisect on dyadic rationals. The
    // comparisons r^q <=> x are exact.
    let mut lo = rat::from_f64((seed * 0.99).max(0.0)).unwrap_or_else(Rat::zero);
    let mut hi = rat::from_f64(seed * 1.01 + f64::MIN_POSITIVE).unwrap();
    while rat::pow_u(&lo, qf) > *x {
        lo /= rat::rint(2);
    }
    while rat::pow_u(&hi, qf) < *x {
        hi *= rat::rint(2);
    }
    let tol = {
        let mut t = lo.clone();
        if t.is_zero() {
            t = hi.clone();
        }
        t / Rat::from(BigInt::one() << bits as usize)
    };
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / rat::rint(2);
        if rat::pow_u(&mid, qf) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Shift series psi(x) = sum of c_k x^(M_k) with strictly increasing M_k >= 1.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PsiSeries {
    pub shifts: Vec<(Rat, Rat)>,
}

impl PsiSeries {
    pub fn empty() -> Self {
        PsiSeries::default()
    }

    pub fn single(c: Rat, m: Rat) -> Self {
        PsiSeries {
            shifts: vec![(c, m)],
        }
    }

    pub fn push(&mut self, c: Rat, m: Rat) {
        if let Some((_, last)) = self.shifts.last() {
            assert!(*last < m, "shift orders must strictly increase");
        }
        assert!(m >= Rat::one(), "shift order must be >= 1");
        assert!(!c.is_zero(), "shift coefficient must be nonzero");
        self.shifts.push((c, m));
    }

    pub fn is_zero(&self) -> bool {
        self.shifts.is_empty()
    }

    /// Vanishing order b of psi at 0; None when psi is identically zero.
    pub fn order(&self) -> Option<Rat> {
        self.shifts.first().map(|(_, m)| m.clone())
    }

    /// psi(x) as f64. Fractional components use |x|^M (the even extension);
    /// integer components use the true signed power.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.compiled().eval(x)
    }

    /// Flat f64 form for hot loops.
    pub fn compiled(&self) -> CompiledPsi {
        CompiledPsi {
            shifts: self
                .shifts
                .iter()
                .map(|(c, m)| {
                    let cf = rat::to_f64(c);
                    match rat::to_i64(m) {
                        Some(mi) => (cf, mi as i32, f64::NAN),
                        None => (cf, 0, rat::to_f64(m)),
                    }
                })
                .collect(),
        }
    }
}

/// Compiled shift series: (coefficient, integer power, fractional power).
#[derive(Clone, Debug)]
pub struct CompiledPsi {
    shifts: Vec<(f64, i32, f64)>,
}

impl CompiledPsi {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (c, mi, mf) in &self.shifts {
            if mf.is_nan() {
                acc += c * x.powi(*mi);
            } else {
                acc += c * x.abs().powf(*mf);
            }
        }
        acc
    }
}

/// Invertible 2x2 rational matrix acting as T(x,y) = (a11 x + a12 y, a21 x + a22 y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap2 {
    pub a11: Rat,
    pub a12: Rat,
    pub a21: Rat,
    pub a22: Rat,
}

impl LinearMap2 {
    pub fn new(a11: Rat, a12: Rat, a21: Rat, a22: Rat) -> Result<Self> {
        let m = LinearMap2 { a11, a12, a21, a22 };
        if m.det().is_zero() {
            return Err(Error::Invalid("linear map must be invertible".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        LinearMap2 {
            a11: Rat::one(),
            a12: Rat::zero(),
            a21: Rat::zero(),
            a22: Rat::one(),
        }
    }

    pub fn swap() -> Self {
        LinearMap2 {
            a11: Rat::zero(),
            a12: Rat::one(),
            a21: Rat::one(),
            a22: Rat::zero(),
        }
    }

    /// Shear x -> x + t y.
    pub fn shear_x(t: i64) -> Self {
        LinearMap2 {
            a11: Rat::one(),
            a12: rat::rint(t),
            a21: Rat::zero(),
            a22: Rat::one(),
        }
    }

    /// Shear y -> y + t x.
    pub fn shear_y(t: i64) -> Self {
        LinearMap2 {
            a11: Rat::one(),
            a12: Rat::zero(),
            a21: rat::rint(t),
            a22: Rat::one(),
        }
    }

    /// Rotation-like map (x, y) -> (x + t y, -t x + y).
    pub fn rotate_like(t: i64) -> Self {
        LinearMap2 {
            a11: Rat::one(),
            a12: rat::rint(t),
            a21: rat::rint(-t),
            a22: Rat::one(),
        }
    }

    pub fn det(&self) -> Rat {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    pub fn is_identity(&self) -> bool {
        self.a11.is_one() && self.a12.is_zero() && self.a21.is_zero() && self.a22.is_one()
    }

    /// Matrix product: (self o other)(v) = self(other(v)) as coordinate
    /// substitutions compose, i.e. p o (self * other) = (p o self) o other.
    pub fn compose(&self, other: &LinearMap2) -> LinearMap2 {
        LinearMap2 {
            a11: &self.a11 * &other.a11 + &self.a12 * &other.a21,
            a12: &self.a11 * &other.a12 + &self.a12 * &other.a22,
            a21: &self.a21 * &other.a11 + &self.a22 * &other.a21,
            a22: &self.a21 * &other.a12 + &self.a22 * &other.a22,
        }
    }
}

/// Flat f64 form of a polynomial for hot loops in the harness.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<CompiledTerm>,
    pub fractional: bool,
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    coeff: f64,
    x_int: i32,
    x_frac: f64, // NaN when the exponent is an exact integer
    by: i32,
}

impl CompiledPoly {
    fn new(p: &Polynomial) -> Self {
        let mut terms = Vec::with_capacity(p.num_terms());
        let mut fractional = false;
        for t in p.terms() {
            let (x_int, x_frac) = match rat::to_i64(&t.ax) {
                Some(v) => (v as i32, f64::NAN),
                None => {
                    fractional = true;
                    (0, rat::to_f64(&t.ax))
                }
            };
            terms.push(CompiledTerm {
                coeff: rat::to_f64(&t.coeff),
                x_int,
                x_frac,
                by: t.by as i32,
            });
        }
        CompiledPoly { terms, fractional }
    }

    /// Fast f64 evaluation. Fractional x-exponents use |x|^a, matching the
    /// convention that those objects live on x > 0 and extend evenly.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let xp = if t.x_frac.is_nan() {
                powi(x, t.x_int)
            } else {
                x.abs().powf(t.x_frac)
            };
            acc += t.coeff * xp * powi(y, t.by);
        }
        acc
    }
}

#[inline]
fn powi(base: f64, e: i32) -> f64 {
    // std powi is fine; wrapped for one call site to tune if needed.
    base.powi(e)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for t in self.terms() {
            let neg = t.coeff.is_negative();
            let mag = rat::abs(&t.coeff);
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || (t.ax.is_zero() && t.by == 0) {
                parts.push(rat::rat_str(&mag));
            }
            if !t.ax.is_zero() {
                if t.ax.is_one() {
                    parts.push("x".into());
                } else if rat::is_integer(&t.ax) {
                    parts.push(format!("x^{}", t.ax.numer()));
                } else {
                    parts.push(format!("x^({})", rat::rat_str(&t.ax)));
                }
            }
            if t.by > 0 {
                if t.by == 1 {
                    parts.push("y".into());
                } else {
                    parts.push(format!("y^{}", t.by));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Canonical JSON: array of {"c": "-3/2", "ax": "2", "by": "1"} in term order.
// ---------------------------------------------------------------------------

impl serde::Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(self.num_terms()))?;
        for t in self.terms() {
            #[derive(serde::Serialize)]
            struct T<'a> {
                c: &'a str,
                ax: &'a str,
                by: &'a str,
            }
            seq.serialize_element(&T {
                c: &rat::rat_str(&t.coeff),
                ax: &rat::rat_str(&t.ax),
                by: &t.by.to_string(),
            })?;
        }
        seq.end()
    }
}

impl<'de> serde::Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct T {
            c: String,
            ax: String,
            by: String,
        }
        let raw: Vec<T> = Vec::deserialize(de)?;
        let mut p = Polynomial::zero();
        for t in raw {
            let c = rat::parse_rat(&t.c)
                .ok_or_else(|| serde::de::Error::custom("bad coefficient"))?;
            let ax = rat::parse_rat(&t.ax)
                .ok_or_else(|| serde::de::Error::custom("bad x-exponent"))?;
            let by: u32 = t.by.parse().map_err(serde::de::Error::custom)?;
            p.add_term(c, ax, by);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    fn p_xx_yy() -> Polynomial {
        // x^2 + y^2
        Polynomial::from_terms([(rint(1), rint(2), 0), (rint(1), rint(0), 2)])
    }

    fn p_parab2() -> Polynomial {
        // (y - x^2)^2 = y^2 - 2 x^2 y + x^4
        Polynomial::from_terms([
            (rint(1), rint(0), 2),
            (rint(-2), rint(2), 1),
            (rint(1), rint(4), 0),
        ])
    }

    #[test]
    fn evaluate_at_origin_and_cancellation() {
        assert_eq!(p_xx_yy().evaluate(0.0, 0.0, 64).unwrap(), 0.0);
        // (y - x^2)^2 at (1,1) is exactly 0.
        assert_eq!(p_parab2().evaluate(1.0, 1.0, 64).unwrap(), 0.0);
        // y^4 + x^8 at (1,1) = 2 (F*-style evaluation takes sqrt outside).
        let fstar2 =
            Polynomial::from_terms([(rint(1), rint(0), 4), (rint(1), rint(8), 0)]);
        assert_eq!(fstar2.evaluate(1.0, 1.0, 64).unwrap(), 2.0);
    }

    #[test]
    fn evaluate_fractional_power() {
        // x^(1/2) at x = 4 -> 2, high precision.
        let p = Polynomial::monomial(rint(1), rat(1, 2), 0);
        let v = p.evaluate(4.0, 0.0, 128).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert!(matches!(
            p.evaluate(-1.0, 0.0, 64),
            Err(Error::NegativeBaseFractionalPower)
        ));
    }

    #[test]
    fn differentiate_basics() {
        // d^2/dy^2 (y^2 + x^4) = 2
        let p = Polynomial::from_terms([(rint(1), rint(0), 2), (rint(1), rint(4), 0)]);
        let d = p.differentiate(Var::Y, 2).unwrap();
        assert_eq!(d, Polynomial::constant(rint(2)));

        // d/dy ((y + x^2)^3 + x^7) = 3y^2 + 6x^2 y + 3x^4
        let inner = Polynomial::from_terms([(rint(1), rint(0), 1), (rint(1), rint(2), 0)]);
        let p = inner.pow(3).add(&Polynomial::monomial(rint(1), rint(7), 0));
        let d = p.differentiate(Var::Y, 1).unwrap();
        let expect = Polynomial::from_terms([
            (rint(3), rint(0), 2),
            (rint(6), rint(2), 1),
            (rint(3), rint(4), 0),
        ]);
        assert_eq!(d, expect);

        // d^2/dx^2 (x^2 + y^2) = 2
        let d = p_xx_yy().differentiate(Var::X, 2).unwrap();
        assert_eq!(d, Polynomial::constant(rint(2)));

        // fractional x-exponent below the order errors out
        let p = Polynomial::monomial(rint(1), rat(3, 2), 0);
        assert!(p.differentiate(Var::X, 2).is_err());
        assert!(p.differentiate(Var::X, 1).is_ok());
    }

    #[test]
    fn shift_substitution() {
        // (y - x^2)^2 with psi = x^2, sign +1 -> y^2
        let shifted = p_parab2().substitute_y_shift(&PsiSeries::single(rint(1), rint(2)), 1);
        assert_eq!(shifted, Polynomial::monomial(rint(1), rint(0), 2));

        // identity shift
        let same = p_parab2().substitute_y_shift(&PsiSeries::empty(), 1);
        assert_eq!(same, p_parab2());

        // (y + x^2)^3 + x^7 with psi = -x^2 -> y^3 + x^7
        let inner = Polynomial::from_terms([(rint(1), rint(0), 1), (rint(1), rint(2), 0)]);
        let p = inner.pow(3).add(&Polynomial::monomial(rint(1), rint(7), 0));
        let shifted = p.substitute_y_shift(&PsiSeries::single(rint(-1), rint(2)), 1);
        let expect = Polynomial::from_terms([(rint(1), rint(0), 3), (rint(1), rint(7), 0)]);
        assert_eq!(shifted, expect);
    }

    #[test]
    fn shift_round_trip() {
        let mut psi = PsiSeries::empty();
        psi.push(rat(3, 2), rint(1));
        psi.push(rat(-1, 3), rat(5, 2));
        let p = p_parab2();
        let back = p
            .substitute_y_shift(&psi, 1)
            .substitute_y_shift(&psi, -1);
        assert_eq!(back, p);
    }

    #[test]
    fn linear_substitution() {
        // x^2 under x -> x + y
        let p = Polynomial::monomial(rint(1), rint(2), 0);
        let q = p.substitute_linear(&LinearMap2::shear_x(1)).unwrap();
        let expect = Polynomial::from_terms([
            (rint(1), rint(2), 0),
            (rint(2), rint(1), 1),
            (rint(1), rint(0), 2),
        ]);
        assert_eq!(q, expect);

        // identity
        let q = p_parab2().substitute_linear(&LinearMap2::identity()).unwrap();
        assert_eq!(q, p_parab2());

        // xy under axis swap
        let xy = Polynomial::monomial(rint(1), rint(1), 1);
        let q = xy.substitute_linear(&LinearMap2::swap()).unwrap();
        assert_eq!(q, xy);
    }

    #[test]
    fn hessian_cases() {
        assert_eq!(
            p_xx_yy().hessian_determinant().unwrap(),
            Polynomial::constant(rint(4))
        );
        let xy = Polynomial::monomial(rint(1), rint(1), 1);
        assert_eq!(xy.hessian_determinant().unwrap(), Polynomial::constant(rint(-1)));
        // (x + y)^2 has identically vanishing Hessian determinant.
        let p = Polynomial::from_terms([
            (rint(1), rint(2), 0),
            (rint(2), rint(1), 1),
            (rint(1), rint(0), 2),
        ]);
        assert!(p.hessian_determinant().unwrap().is_zero());
    }

    #[test]
    fn vanishing_order() {
        assert_eq!(p_xx_yy().vanishing_order_origin().unwrap(), rint(2));
        let p = Polynomial::from_terms([(rint(1), rint(0), 3), (rint(1), rint(7), 0)]);
        assert_eq!(p.vanishing_order_origin().unwrap(), rint(3));
        let p = Polynomial::monomial(rint(1), rat(3, 2), 1);
        assert_eq!(p.vanishing_order_origin().unwrap(), rat(5, 2));
        assert!(Polynomial::zero().vanishing_order_origin().is_err());
    }

    #[test]
    fn canonical_json_round_trip() {
        let p = Polynomial::from_terms([
            (rat(-3, 2), rint(2), 1),
            (rint(1), rat(1, 2), 0),
            (rat(7, 3), rint(0), 4),
        ]);
        let s = serde_json::to_string(&p).unwrap();
        let q: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        // canonical order: lex by (ax, by)
        assert!(s.find("\"ax\":\"0\"").unwrap() < s.find("\"ax\":\"1/2\"").unwrap());
    }
}
