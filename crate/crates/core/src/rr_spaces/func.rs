//! Rational functions `(A(x) + B(x) y) / C(x)` on `y^2 = x^3 + ax + b`.

use super::series::{local_param, Series};
use crate::field_curve::poly::{self, Poly};
use crate::field_curve::{CurvePoint, EllipticCurve, Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Func {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
}

fn rhs_poly(e: &EllipticCurve) -> Poly {
    let f = &e.field;
    poly::trim(vec![e.b, e.a, f.zero(), f.one()])
}

impl Func {
    pub fn constant(f: &Field, k: Fe) -> Func {
        Func { a: poly::constant(f, k), b: Vec::new(), c: poly::constant(f, f.one()) }
    }

    pub fn one(f: &Field) -> Func {
        Func::constant(f, f.one())
    }

    pub fn zero(f: &Field) -> Func {
        Func::constant(f, f.zero())
    }

    pub fn x(f: &Field) -> Func {
        Func { a: vec![f.zero(), f.one()], b: Vec::new(), c: poly::constant(f, f.one()) }
    }

    pub fn y(f: &Field) -> Func {
        Func { a: Vec::new(), b: poly::constant(f, f.one()), c: poly::constant(f, f.one()) }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_empty() && self.b.is_empty()
    }

    pub fn mul(&self, e: &EllipticCurve, o: &Func) -> Func {
        let f = &e.field;
        let r = rhs_poly(e);
        let a = poly::add(f, &poly::mul(f, &self.a, &o.a), &poly::mul(f, &poly::mul(f, &self.b, &o.b), &r));
        let b = poly::add(f, &poly::mul(f, &self.a, &o.b), &poly::mul(f, &self.b, &o.a));
        Func { a, b, c: poly::mul(f, &self.c, &o.c) }.reduced(f)
    }

    pub fn add(&self, f: &Field, o: &Func) -> Func {
        if self.c == o.c {
            return Func { a: poly::add(f, &self.a, &o.a), b: poly::add(f, &self.b, &o.b), c: self.c.clone() };
        }
        let a = poly::add(f, &poly::mul(f, &self.a, &o.c), &poly::mul(f, &o.a, &self.c));
        let b = poly::add(f, &poly::mul(f, &self.b, &o.c), &poly::mul(f, &o.b, &self.c));
        Func { a, b, c: poly::mul(f, &self.c, &o.c) }.reduced(f)
    }

    pub fn scale(&self, f: &Field, k: Fe) -> Func {
        Func { a: poly::scale(f, &self.a, k), b: poly::scale(f, &self.b, k), c: self.c.clone() }
    }

    pub fn neg(&self, f: &Field) -> Func {
        self.scale(f, f.neg(f.one()))
    }

    pub fn sub(&self, f: &Field, o: &Func) -> Func {
        self.add(f, &o.neg(f))
    }

    /// Divides by a polynomial in `x`.
    pub fn div_poly(&self, f: &Field, h: &[Fe]) -> Func {
        Func { a: self.a.clone(), b: self.b.clone(), c: poly::mul(f, &self.c, h) }.reduced(f)
    }

    /// Cancels common polynomial factors of `A`, `B` and `C`, makes `C` monic.
    pub fn reduced(mut self, f: &Field) -> Func {
        if self.is_zero() {
            return Func::zero(f);
        }
        let g = poly::gcd(f, &poly::gcd(f, &self.a, &self.b), &self.c);
        if poly::deg(&g) > 0 {
            self.a = poly::divrem(f, &self.a, &g).0;
            self.b = poly::divrem(f, &self.b, &g).0;
            self.c = poly::divrem(f, &self.c, &g).0;
        }
        let lead = *self.c.last().expect("nonzero denominator");
        let li = f.inv(lead).expect("nonzero lead");
        Func { a: poly::scale(f, &self.a, li), b: poly::scale(f, &self.b, li), c: poly::scale(f, &self.c, li) }
    }

    fn zero_bound(&self) -> i64 {
        let da = poly::deg(&self.a);
        let db = poly::deg(&self.b);
        let n = if da < 0 { i64::MIN } else { 2 * da };
        let m = if db < 0 { i64::MIN } else { 2 * db + 3 };
        n.max(m).max(0)
    }

    /// Laurent expansion at `p` in the standard uniformizer, with at least
    /// `extra` known coefficients past the valuation.
    pub fn expand(&self, e: &EllipticCurve, p: &CurvePoint, extra: usize) -> Series {
        let f = &e.field;
        let dc = poly::deg(&self.c).max(0);
        let len = (self.zero_bound() + 2 * dc) as usize + extra + 12;
        let lp = local_param(e, p, len);
        let num = lp.x.compose_poly(f, &self.a, len).add(f, &lp.x.compose_poly(f, &self.b, len).mul(f, &lp.y));
        let den = lp.x.compose_poly(f, &self.c, len);
        let inv = den.inv(f).expect("denominator is a nonzero polynomial in x");
        num.normalize().mul(f, &inv)
    }

    /// Order of vanishing at `p` (negative for poles). Panics on the zero function.
    pub fn order_at(&self, e: &EllipticCurve, p: &CurvePoint) -> i64 {
        assert!(!self.is_zero(), "order of the zero function");
        if p.is_infinity() {
            let da = poly::deg(&self.a);
            let db = poly::deg(&self.b);
            let num = match (da >= 0, db >= 0) {
                (true, true) => (-2 * da).min(-2 * db - 3),
                (true, false) => -2 * da,
                (false, true) => -2 * db - 3,
                (false, false) => unreachable!(),
            };
            return num + 2 * poly::deg(&self.c);
        }
        self.expand(e, p, 1).order().expect("expansion precision exceeds the zero bound")
    }

    /// Value at `p`, `None` at a pole.
    pub fn eval(&self, e: &EllipticCurve, p: &CurvePoint) -> Option<Fe> {
        let f = &e.field;
        if let CurvePoint::Affine(x0, y0) = *p {
            let cv = poly::eval(f, &self.c, x0);
            if !cv.is_zero() {
                let nv = f.add(poly::eval(f, &self.a, x0), f.mul(poly::eval(f, &self.b, x0), y0));
                return f.div(nv, cv);
            }
        }
        let s = self.expand(e, p, 1);
        match s.order() {
            Some(v) if v < 0 => None,
            _ => s.coeff(f, 0),
        }
    }

    /// Norm `A^2 - B^2 (x^3 + ax + b)`, vanishing at the `x`-coordinates of
    /// the zeros of the numerator.
    pub fn numerator_norm(&self, e: &EllipticCurve) -> Poly {
        let f = &e.field;
        poly::sub(f, &poly::mul(f, &self.a, &self.a), &poly::mul(f, &poly::mul(f, &self.b, &self.b), &rhs_poly(e)))
    }

    pub fn fmt(&self, f: &Field) -> String {
        let num = match (self.a.is_empty(), self.b.is_empty()) {
            (true, true) => "0".to_string(),
            (false, true) => poly::fmt_poly(f, &self.a, "x"),
            (true, false) => format!("({})*y", poly::fmt_poly(f, &self.b, "x")),
            (false, false) => format!("{} + ({})*y", poly::fmt_poly(f, &self.a, "x"), poly::fmt_poly(f, &self.b, "x")),
        };
        if poly::deg(&self.c) == 0 {
            num
        } else {
            format!("({num}) / ({})", poly::fmt_poly(f, &self.c, "x"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_coordinate_functions() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        let f = &e.field;
        assert_eq!(Func::x(f).order_at(&e, &CurvePoint::Infinity), -2);
        assert_eq!(Func::y(f).order_at(&e, &CurvePoint::Infinity), -3);
        for t in e.n_torsion(2).points.iter().filter(|p| !p.is_infinity()) {
            assert_eq!(Func::y(f).order_at(&e, t), 1);
            let (x0, _) = t.coords().unwrap();
            let g = Func { a: poly::linear(f, x0), b: Vec::new(), c: poly::constant(f, f.one()) };
            assert_eq!(g.order_at(&e, t), 2);
        }
    }

    #[test]
    fn eval_matches_expansion() {
        let e = EllipticCurve::parse_spec("61:2:12").unwrap();
        let f = &e.field;
        let g = Func::x(f).mul(&e, &Func::y(f)).add(f, &Func::constant(f, f.from_i64(3)));
        for p in e.points().iter().skip(1).take(10) {
            let (x, y) = p.coords().unwrap();
            let direct = f.add(f.mul(x, y), f.from_i64(3));
            assert_eq!(g.eval(&e, p), Some(direct));
            assert_eq!(g.expand(&e, p, 2).coeff(f, 0), Some(direct));
        }
    }
}
