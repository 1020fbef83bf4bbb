//! Line-bundle classes on an elliptic curve in Abel–Jacobi normal form.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;

use serde_json::{json, Value};

use crate::field_curve::{CurvePoint, EllipticCurve};

/// Group elements usable as the point part of a line class.
pub trait GroupElem: Copy + Eq + Ord + Hash + fmt::Debug {
    fn identity() -> Self;

    fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl GroupElem for CurvePoint {
    fn identity() -> CurvePoint {
        CurvePoint::Infinity
    }
}

/// An abelian group standing in for `Pic^0` of the curve.
pub trait PicGroup {
    type Elem: GroupElem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn fmt_elem(&self, a: &Self::Elem) -> String;
    /// The three nontrivial 2-torsion elements, if all are available.
    fn two_torsion(&self) -> Option<[Self::Elem; 3]>;

    fn mul(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        let mut acc = Self::Elem::identity();
        let mut base = if n < 0 { self.neg(a) } else { *a };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }
}

impl PicGroup for EllipticCurve {
    type Elem = CurvePoint;

    fn add(&self, a: &CurvePoint, b: &CurvePoint) -> CurvePoint {
        EllipticCurve::add(self, a, b)
    }

    fn neg(&self, a: &CurvePoint) -> CurvePoint {
        EllipticCurve::neg(self, a)
    }

    fn mul(&self, a: &CurvePoint, n: i64) -> CurvePoint {
        EllipticCurve::mul(self, a, n)
    }

    fn fmt_elem(&self, a: &CurvePoint) -> String {
        self.fmt_point(a)
    }

    fn two_torsion(&self) -> Option<[CurvePoint; 3]> {
        let t = self.n_torsion(2);
        if !t.complete {
            return None;
        }
        let pts: Vec<CurvePoint> = t.points.into_iter().filter(|p| !p.is_infinity()).collect();
        Some([pts[0], pts[1], pts[2]])
    }
}

/// `(degree, group-law sum of a representing divisor)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineClass<P = CurvePoint> {
    pub deg: i64,
    pub point: P,
}

impl LineClass {
    pub fn trivial() -> LineClass {
        LineClass { deg: 0, point: CurvePoint::Infinity }
    }

    /// `O(P)`.
    pub fn of_point(p: CurvePoint) -> LineClass {
        LineClass { deg: 1, point: p }
    }

    /// `O(n o)`.
    pub fn origin_multiple(n: i64) -> LineClass {
        LineClass { deg: n, point: CurvePoint::Infinity }
    }

    pub fn json(&self, e: &EllipticCurve) -> Value {
        json!({"deg": self.deg, "point": e.json_point(&self.point)})
    }
}

impl<P: GroupElem> LineClass<P> {
    pub fn identity_class() -> LineClass<P> {
        LineClass { deg: 0, point: P::identity() }
    }

    pub fn is_trivial(&self) -> bool {
        self.deg == 0 && self.point.is_identity()
    }

    pub fn tensor<G: PicGroup<Elem = P>>(&self, g: &G, other: &LineClass<P>) -> LineClass<P> {
        LineClass { deg: self.deg + other.deg, point: g.add(&self.point, &other.point) }
    }

    pub fn dual<G: PicGroup<Elem = P>>(&self, g: &G) -> LineClass<P> {
        LineClass { deg: -self.deg, point: g.neg(&self.point) }
    }

    pub fn pow<G: PicGroup<Elem = P>>(&self, g: &G, n: i64) -> LineClass<P> {
        LineClass { deg: self.deg * n, point: g.mul(&self.point, n) }
    }

    /// `self ⊗ other^{-1}`.
    pub fn minus<G: PicGroup<Elem = P>>(&self, g: &G, other: &LineClass<P>) -> LineClass<P> {
        self.tensor(g, &other.dual(g))
    }

    /// Is `L^n` trivial?
    pub fn is_torsion_of<G: PicGroup<Elem = P>>(&self, g: &G, n: i64) -> bool {
        self.pow(g, n).is_trivial()
    }

    pub fn display<'a, G: PicGroup<Elem = P>>(&'a self, g: &'a G) -> ClassDisplay<'a, G> {
        ClassDisplay { class: self, group: g }
    }
}

pub struct ClassDisplay<'a, G: PicGroup> {
    class: &'a LineClass<G::Elem>,
    group: &'a G,
}

impl<G: PicGroup> fmt::Display for ClassDisplay<'_, G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.class.deg, self.group.fmt_elem(&self.class.point))
    }
}

/// Riemann–Roch on an elliptic curve.
pub fn h0_h1<P: GroupElem>(l: &LineClass<P>) -> (i64, i64) {
    match l.deg {
        d if d > 0 => (d, 0),
        d if d < 0 => (0, -d),
        _ if l.point.is_identity() => (1, 1),
        _ => (0, 0),
    }
}

/// Pullback under translation by `a`: the point moves by `⊖(deg·a)`.
pub fn translate_class(e: &EllipticCurve, l: &LineClass, a: &CurvePoint) -> LineClass {
    LineClass { deg: l.deg, point: e.sub(&l.point, &e.mul(a, l.deg)) }
}

/// Is `O(2p - 2o)` trivial, i.e. `2(p - o) = 0` in the group?
pub fn two_p_minus_o_trivial(e: &EllipticCurve, p: &CurvePoint) -> bool {
    e.mul(p, 2).is_infinity()
}

/// Is `O(4p - 4o)` trivial?
pub fn four_p_minus_o_trivial(e: &EllipticCurve, p: &CurvePoint) -> bool {
    e.mul(p, 4).is_infinity()
}

/// Formal integer combination of points with finite support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor {
    terms: BTreeMap<CurvePoint, i64>,
}

impl Divisor {
    pub fn zero() -> Divisor {
        Divisor::default()
    }

    pub fn point(p: CurvePoint) -> Divisor {
        Divisor::zero().plus_point(p, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (CurvePoint, i64)>>(it: I) -> Divisor {
        it.into_iter().fold(Divisor::zero(), |d, (p, n)| d.plus_point(p, n))
    }

    pub fn plus_point(mut self, p: CurvePoint, n: i64) -> Divisor {
        let c = self.terms.entry(p).or_insert(0);
        *c += n;
        if *c == 0 {
            self.terms.remove(&p);
        }
        self
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        other.terms.iter().fold(self.clone(), |d, (&p, &n)| d.plus_point(p, n))
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Divisor {
        Divisor::from_terms(self.terms.iter().map(|(&p, &n)| (p, n * k)))
    }

    pub fn degree(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn coeff(&self, p: &CurvePoint) -> i64 {
        self.terms.get(p).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CurvePoint, &i64)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<CurvePoint> {
        self.terms.keys().copied().collect()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|&n| n >= 0)
    }

    /// Every point moved by `⊕a`.
    pub fn shifted(&self, e: &EllipticCurve, a: &CurvePoint) -> Divisor {
        Divisor::from_terms(self.terms.iter().map(|(p, &n)| (e.add(p, a), n)))
    }

    pub fn fmt(&self, e: &EllipticCurve) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms.iter().map(|(p, n)| format!("{n}*{}", e.fmt_point(p))).collect::<Vec<_>>().join(" + ")
    }

    pub fn json(&self, e: &EllipticCurve) -> Value {
        Value::Array(self.terms.iter().map(|(p, n)| json!({"point": e.json_point(p), "mult": n})).collect())
    }
}

pub fn class_of(e: &EllipticCurve, d: &Divisor) -> LineClass {
    let point = d.terms().fold(CurvePoint::Infinity, |acc, (p, &n)| e.add(&acc, &e.mul(p, n)));
    LineClass { deg: d.degree(), point }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_roch_small_cases() {
        assert_eq!(h0_h1(&LineClass::trivial()), (1, 1));
        assert_eq!(h0_h1(&LineClass::origin_multiple(2)), (2, 0));
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        let q = e.points()[3];
        assert_eq!(h0_h1(&LineClass::of_point(q).dual(&e)), (0, 1));
    }

    #[test]
    fn two_o_minus_two_p_trivial_at_two_torsion() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        for p in e.n_torsion(2).points {
            let d = Divisor::from_terms([(CurvePoint::Infinity, 2), (p, -2)]);
            assert!(class_of(&e, &d).is_trivial());
            assert!(two_p_minus_o_trivial(&e, &p));
        }
    }

    #[test]
    fn translation_of_origin_class() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        let a = e.points()[5];
        let l = LineClass::of_point(CurvePoint::Infinity);
        assert_eq!(translate_class(&e, &l, &a), LineClass::of_point(e.neg(&a)));
        assert_eq!(translate_class(&e, &l, &CurvePoint::Infinity), l);
    }
}
