//! Exact univariate real-root machinery: Yun squarefree decomposition,
//! Sturm-sequence counting and isolation, and maximal real-zero-order
//! queries with exact exclusion predicates.

use crate::error::Error;
use crate::rat::{self, Rat};
use crate::Result;
use num_traits::{One, Zero};

/// Dense univariate polynomial over Q, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub coeffs: Vec<Rat>,
}

/// One factor of a squarefree decomposition: `factor` is squarefree and
/// enters the product with the given multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreePart {
    pub factor: UniPoly,
    pub multiplicity: u32,
}

/// An isolated real root: exactly one root of the relevant squarefree factor
/// lies in the open interval, and the endpoints are not roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootWitness {
    pub lo: Rat,
    pub hi: Rat,
    pub multiplicity: u32,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat::rint(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let lead = self.leading();
        self.scale(&lead.recip())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Euclidean division: (quotient, remainder).
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dlen = divisor.coeffs.len();
        if rem.len() < dlen {
            return (UniPoly::zero(), UniPoly::new(rem));
        }
        let mut quot = vec![Rat::zero(); rem.len() - dlen + 1];
        let lead = divisor.leading();
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dlen - 1] / &lead;
            if c.is_zero() {
                continue;
            }
            quot[i] = c.clone();
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let idx = i + j;
                let a = &rem[idx] - &c * d;
                rem[idx] = a;
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Exact quotient; panics if the division is not exact.
    pub fn div_exact(&self, divisor: &UniPoly) -> UniPoly {
        let (q, r) = self.div_rem(divisor);
        assert!(r.is_zero(), "division was not exact");
        q
    }

    /// Monic gcd via Euclid's algorithm.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic(); // normalize to keep coefficient sizes sane
        }
        a.monic()
    }

    /// Order of x = r as a root (0 when not a root).
    pub fn root_order(&self, r: &Rat) -> u32 {
        let mut p = self.clone();
        let mut order = 0;
        while !p.is_zero() && p.eval(r).is_zero() {
            // divide by (x - r)
            let divisor = UniPoly::new(vec![-r.clone(), Rat::one()]);
            p = p.div_exact(&divisor);
            order += 1;
        }
        order
    }

    /// Cauchy root bound: all real roots lie in (-B, B).
    pub fn root_bound(&self) -> Rat {
        if self.degree() == 0 || self.is_zero() {
            return Rat::one();
        }
        let lead = rat::abs(&self.leading());
        let max = self
            .coeffs
            .iter()
            .take(self.coeffs.len() - 1)
            .map(rat::abs)
            .max()
            .unwrap_or_else(Rat::zero);
        Rat::one() + max / lead
    }
}

/// Endpoint of a root-counting interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    NegInf,
    PosInf,
    At(Rat),
}

/// Yun's squarefree decomposition. Multiplicities are exact; factors are
/// pairwise coprime and their weighted product recovers the input up to a
/// constant.
pub fn squarefree_decomposition(u: &UniPoly) -> Result<Vec<SquarefreePart>> {
    if u.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if u.degree() == 0 {
        return Ok(vec![]);
    }
    let f = u.monic();
    let fp = f.derivative();
    let a = f.gcd(&fp);
    let mut b = f.div_exact(&a);
    let mut c = fp.div_exact(&a);
    let mut d = c.sub_poly(&b.derivative());
    let mut parts = Vec::new();
    let mut mult = 1u32;
    loop {
        let p = b.gcd(&d);
        if p.degree() > 0 {
            parts.push(SquarefreePart {
                factor: p.clone(),
                multiplicity: mult,
            });
        }
        b = b.div_exact(&p);
        if b.degree() == 0 {
            break;
        }
        c = d.div_exact(&p);
        d = c.sub_poly(&b.derivative());
        mult += 1;
    }

    Ok(parts)
}

impl UniPoly {
    fn sub_poly(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        UniPoly::new(out)
    }
}

/// Sturm chain of a squarefree polynomial.
fn sturm_chain(u: &UniPoly) -> Vec<UniPoly> {
    let mut chain = vec![u.clone(), u.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            return chain;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            return chain;
        }
        // Push -r scaled by a positive constant; only signs matter.
        let norm = rat::abs(&r.leading()).recip();
        chain.push(r.scale(&-norm));
    }
}

fn sign_at(p: &UniPoly, x: &Endpoint) -> i8 {
    match x {
        Endpoint::At(v) => rat::sign_of(&p.eval(v)),
        Endpoint::PosInf => rat::sign_of(&p.leading()),
        Endpoint::NegInf => {
            let s = rat::sign_of(&p.leading());
            if p.degree().is_multiple_of(2) {
                s
            } else {
                -s
            }
        }
    }
}

fn sign_variations(chain: &[UniPoly], x: &Endpoint) -> usize {
    let mut signs = Vec::new();
    for p in chain {
        let s = sign_at(p, x);
        if s != 0 {
            signs.push(s);
        }
    }
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Exact count of distinct real roots of a squarefree u in the open
/// interval (lo, hi); infinite endpoints allowed.
pub fn count_real_roots(u: &UniPoly, lo: &Endpoint, hi: &Endpoint) -> Result<usize> {
    if u.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if u.degree() == 0 {
        return Ok(0);
    }
    for e in [lo, hi] {
        if let Endpoint::At(v) = e {
            if u.eval(v).is_zero() {
                return Err(Error::EndpointIsRoot);
            }
        }
    }
    let chain = sturm_chain(u);
    let a = sign_variations(&chain, lo);
    let b = sign_variations(&chain, hi);
    Ok(a.saturating_sub(b))
}

/// Isolating intervals for all real roots of a squarefree u, left to right.
/// Interval endpoints are never roots.
pub fn isolate_real_roots(u: &UniPoly) -> Result<Vec<(Rat, Rat)>> {
    if u.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if u.degree() == 0 {
        return Ok(vec![]);
    }
    let chain = sturm_chain(u);
    let bound = u.root_bound();
    let lo = -bound.clone();
    let hi = bound;
    // The Cauchy bound is strict, so the outer endpoints are never roots.
    debug_assert!(!u.eval(&lo).is_zero() && !u.eval(&hi).is_zero());

    let var = |x: &Rat| sign_variations(&chain, &Endpoint::At(x.clone()));
    let mut stack = vec![(lo, hi)];
    let mut segments: Vec<(Rat, Rat)> = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let count = var(&a).saturating_sub(var(&b));
        if count == 0 {
            continue;
        }
        if count == 1 {
            segments.push((a, b));
            continue;
        }
        let mut mid = (&a + &b) / rat::rint(2);
        // keep bisection endpoints off roots
        while u.eval(&mid).is_zero() {
            mid = (&a + &mid) / rat::rint(2);
        }
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    segments.sort_by(|p, q| p.0.cmp(&q.0));
    Ok(segments)
}

/// Refine an isolating interval of a squarefree u by bisection until its
/// width is at most `width`.
pub fn refine_interval(u: &UniPoly, mut lo: Rat, mut hi: Rat, width: &Rat) -> (Rat, Rat) {
    let sign_lo = rat::sign_of(&u.eval(&lo));
    debug_assert!(sign_lo != 0);
    while &hi - &lo > *width {
        let mut mid = (&lo + &hi) / rat::rint(2);
        let mut v = u.eval(&mid);
        // A rational midpoint may be the root itself; pick another point.
        while v.is_zero() {
            mid = (&lo + &mid) / rat::rint(2);
            v = u.eval(&mid);
        }
        if rat::sign_of(&v) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Find an exact rational root of a squarefree u inside the isolating
/// interval, if one exists with denominator at most `den_budget`. The
/// interval is refined until the simplest rational inside either is the root
/// or provably has a larger denominator.
pub fn rational_root_in(
    u: &UniPoly,
    lo: &Rat,
    hi: &Rat,
    den_budget: u64,
) -> Option<Rat> {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let budget = rat::rint(den_budget as i64);
    loop {
        let cand = rat::simplest_in_interval(&lo, &hi);
        if u.eval(&cand).is_zero() {
            return Some(cand);
        }
        if cand.denom() > budget.numer() {
            return None;
        }
        // The simplest candidate is not a root: shrink the interval past it.
        let width = (&hi - &lo) / rat::rint(4);
        let (a, b) = refine_interval(u, lo, hi, &width);
        lo = a;
        hi = b;
        if &hi - &lo < Rat::new(1.into(), num_bigint::BigInt::from(den_budget).pow(2) * 4) {
            // A rational root u/v in (lo, hi) with v <= den_budget would be
            // the simplest rational once the width is below 1/(2 v^2).
            let cand = rat::simplest_in_interval(&lo, &hi);
            if u.eval(&cand).is_zero() {
                return Some(cand);
            }
            return None;
        }
    }
}

/// Maximum multiplicity over qualifying real roots of u, with an exact
/// witness interval. Roots are filtered by `exclude_zero` (drop y0 = 0) and
/// by `exclude` (keep only y0 with exclude(y0) != 0, decided via gcd).
pub fn max_real_zero_order(
    u: &UniPoly,
    exclude: Option<&UniPoly>,
    exclude_zero: bool,
) -> Result<(u32, Option<RootWitness>)> {
    if u.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut parts = squarefree_decomposition(u)?;
    parts.sort_by_key(|p| std::cmp::Reverse(p.multiplicity));
    for part in parts {
        let mut q = part.factor.clone();
        if exclude_zero && q.eval(&Rat::zero()).is_zero() {
            // q is squarefree so the factor y divides exactly once.
            q = q.div_exact(&UniPoly::new(vec![Rat::zero(), Rat::one()]));
        }
        if let Some(e) = exclude {
            if !e.is_zero() {
                let g = q.gcd(e);
                if g.degree() > 0 {
                    q = q.div_exact(&g);
                }
            } else {
                // exclude(y) = 0 identically: no root qualifies.
                continue;
            }
        }
        if q.degree() == 0 {
            continue;
        }
        let n = count_real_roots(&q, &Endpoint::NegInf, &Endpoint::PosInf)?;
        if n > 0 {
            let intervals = isolate_real_roots(&q)?;
            let (lo, hi) = intervals.into_iter().next().expect("n > 0");
            return Ok((
                part.multiplicity,
                Some(RootWitness {
                    lo,
                    hi,
                    multiplicity: part.multiplicity,
                }),
            ));
        }
    }
    Ok((0, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    fn up(coeffs: &[i64]) -> UniPoly {
        UniPoly::new(coeffs.iter().map(|&c| rint(c)).collect())
    }

    #[test]
    fn squarefree_cases() {
        // (y-1)^2 = y^2 - 2y + 1
        let parts = squarefree_decomposition(&up(&[1, -2, 1])).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].multiplicity, 2);
        assert_eq!(parts[0].factor, up(&[-1, 1]));

        // 3y^2 -> [(y, 2)] up to constant
        let parts = squarefree_decomposition(&up(&[0, 0, 3])).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].multiplicity, 2);
        assert_eq!(parts[0].factor, up(&[0, 1]));

        // y^2 + 1 already squarefree
        let parts = squarefree_decomposition(&up(&[1, 0, 1])).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].multiplicity, 1);
    }

    #[test]
    fn squarefree_reconstruction() {
        // (y-1)^2 (y+2)^3 y
        let p = up(&[-1, 1]);
        let q = up(&[2, 1]);
        let r = up(&[0, 1]);
        let prod = p.mul(&p).mul(&q).mul(&q).mul(&q).mul(&r);
        let parts = squarefree_decomposition(&prod).unwrap();
        let mut rebuilt = UniPoly::constant(Rat::one());
        for part in &parts {
            for _ in 0..part.multiplicity {
                rebuilt = rebuilt.mul(&part.factor);
            }
        }
        assert_eq!(rebuilt.monic(), prod.monic());
    }

    #[test]
    fn sturm_counting() {
        assert_eq!(
            count_real_roots(&up(&[-1, 0, 1]), &Endpoint::NegInf, &Endpoint::PosInf).unwrap(),
            2
        );
        assert_eq!(
            count_real_roots(&up(&[1, 0, 1]), &Endpoint::NegInf, &Endpoint::PosInf).unwrap(),
            0
        );
        assert_eq!(
            count_real_roots(
                &up(&[-1, 1]),
                &Endpoint::At(rint(0)),
                &Endpoint::At(rint(2))
            )
            .unwrap(),
            1
        );
        assert!(matches!(
            count_real_roots(&up(&[-1, 1]), &Endpoint::At(rint(1)), &Endpoint::At(rint(2))),
            Err(Error::EndpointIsRoot)
        ));
    }

    #[test]
    fn isolation() {
        // (y^2 - 2)(y - 3) has roots -sqrt2, sqrt2, 3
        let p = up(&[-2, 0, 1]).mul(&up(&[-3, 1]));
        let ivs = isolate_real_roots(&p).unwrap();
        assert_eq!(ivs.len(), 3);
        for (lo, hi) in &ivs {
            assert!(lo < hi);
            assert!(!p.eval(lo).is_zero() && !p.eval(hi).is_zero());
            assert_eq!(
                count_real_roots(&p, &Endpoint::At(lo.clone()), &Endpoint::At(hi.clone()))
                    .unwrap(),
                1
            );
        }
    }

    #[test]
    fn rational_root_identification() {
        // roots 3/2 and sqrt(2)
        let p = up(&[-3, 2]).mul(&up(&[-2, 0, 1]));
        let ivs = isolate_real_roots(&p).unwrap();
        let found: Vec<Option<Rat>> = ivs
            .iter()
            .map(|(lo, hi)| rational_root_in(&p, lo, hi, 1_000_000))
            .collect();
        assert!(found.contains(&Some(rat(3, 2))));
        assert_eq!(found.iter().filter(|f| f.is_none()).count(), 2);
    }

    #[test]
    fn max_zero_order_cases() {
        // (y-1)^2: order 2 witness around 1
        let (ord, w) = max_real_zero_order(&up(&[1, -2, 1]), None, false).unwrap();
        assert_eq!(ord, 2);
        let w = w.unwrap();
        assert!(w.lo < rint(1) && rint(1) < w.hi);

        // 3y^2 with exclude = y^3 + 1, keep y0 = 0: order 2 at 0
        let (ord, w) = max_real_zero_order(&up(&[0, 0, 3]), Some(&up(&[1, 0, 0, 1])), false)
            .unwrap();
        assert_eq!(ord, 2);
        let w = w.unwrap();
        assert!(w.lo < rint(0) && rint(0) < w.hi);

        // y^2 + 1: no real roots
        let (ord, w) = max_real_zero_order(&up(&[1, 0, 1]), None, false).unwrap();
        assert_eq!(ord, 0);
        assert!(w.is_none());

        // exclude_zero drops the origin root
        let (ord, _) = max_real_zero_order(&up(&[0, 0, 3]), None, true).unwrap();
        assert_eq!(ord, 0);

        // exclusion by gcd: (y-1)^3 (y-2) with exclude (y-1) -> order 1 at 2
        let p = up(&[-1, 1]);
        let u = p.mul(&p).mul(&p).mul(&up(&[-2, 1]));
        let (ord, w) = max_real_zero_order(&u, Some(&up(&[-1, 1])), false).unwrap();
        assert_eq!(ord, 1);
        let w = w.unwrap();
        assert!(w.lo < rint(2) && rint(2) < w.hi);
    }

    #[test]
    fn multiplicity_propagates_through_product() {
        // u * v^3 where v has a real root: order >= 3
        let u = up(&[1, 0, 1]); // no real roots
        let v = up(&[-5, 1]);
        let prod = u.mul(&v).mul(&v).mul(&v);
        let (ord, _) = max_real_zero_order(&prod, None, false).unwrap();
        assert_eq!(ord, 3);
    }
}
