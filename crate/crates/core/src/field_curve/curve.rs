use std::fmt;

use serde_json::{json, Value};

use super::field::{Fe, Field};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine(Fe, Fe),
}

impl CurvePoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn coords(&self) -> Option<(Fe, Fe)> {
        match *self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(x, y) => Some((x, y)),
        }
    }

    pub fn x(&self) -> Option<Fe> {
        self.coords().map(|c| c.0)
    }
}

/// `y^2 = x^3 + a x + b` over a prime field or a small extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EllipticCurve {
    pub field: Field,
    pub a: Fe,
    pub b: Fe,
}

impl EllipticCurve {
    pub fn new(field: Field, a: Fe, b: Fe) -> Result<EllipticCurve> {
        let f = &field;
        let disc = f.add(f.scale(f.pow(a, 3), 4), f.scale(f.square(b), 27));
        if disc.is_zero() {
            return Err(Error::Domain("singular curve: 4a^3 + 27b^2 = 0".into()));
        }
        Ok(EllipticCurve { field, a, b })
    }

    /// Parses "p:a:b".
    pub fn parse_spec(s: &str) -> Result<EllipticCurve> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("curve spec '{s}' is not p:a:b")));
        }
        let num = |t: &str| -> Result<i64> {
            t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad integer '{t}' in '{s}'")))
        };
        let p = num(parts[0])?;
        let field = Field::prime(u32::try_from(p).map_err(|_| Error::Parse(format!("bad prime in '{s}'")))?)?;
        EllipticCurve::new(field, field.from_i64(num(parts[1])?), field.from_i64(num(parts[2])?))
    }

    pub fn spec(&self) -> String {
        format!("{}:{}:{}", self.field.characteristic(), self.a.base(), self.b.base())
    }

    /// The same equation over the degree-`k` extension of the prime field.
    pub fn base_change(&self, k: usize) -> Result<EllipticCurve> {
        let field = Field::extension_of_degree(self.field.characteristic(), k)?;
        Ok(EllipticCurve { field, a: self.a, b: self.b })
    }

    pub fn rhs(&self, x: Fe) -> Fe {
        let f = &self.field;
        f.add(f.add(f.pow(x, 3), f.mul(self.a, x)), self.b)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match *p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => self.field.square(y) == self.rhs(x),
        }
    }

    pub fn point(&self, x: i64, y: i64) -> Result<CurvePoint> {
        let p = CurvePoint::Affine(self.field.from_i64(x), self.field.from_i64(y));
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(Error::Domain(format!("({x},{y}) is not on {}", self.spec())))
        }
    }

    fn check(&self, p: &CurvePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {} not on curve {}", self.fmt_point(p), self.spec())))
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match *p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x, self.field.neg(y)),
        }
    }

    /// Group law with validation of both inputs.
    pub fn add_points(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add(p, q))
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let f = &self.field;
        match (*p, *q) {
            (CurvePoint::Infinity, _) => *q,
            (_, CurvePoint::Infinity) => *p,
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => {
                let slope = if x1 == x2 {
                    if f.add(y1, y2).is_zero() {
                        return CurvePoint::Infinity;
                    }
                    let num = f.add(f.scale(f.square(x1), 3), self.a);
                    f.div(num, f.scale(y1, 2)).expect("y1 != 0 here")
                } else {
                    f.div(f.sub(y2, y1), f.sub(x2, x1)).expect("x1 != x2")
                };
                let x3 = f.sub(f.sub(f.square(slope), x1), x2);
                let y3 = f.sub(f.mul(slope, f.sub(x1, x3)), y1);
                CurvePoint::Affine(x3, y3)
            }
        }
    }

    pub fn sub(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        self.add(p, &self.neg(q))
    }

    pub fn mul(&self, p: &CurvePoint, n: i64) -> CurvePoint {
        let mut base = if n < 0 { self.neg(p) } else { *p };
        let mut e = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// All rational points over the working field, identity first, then by
    /// `(index(x), index(y))`.
    pub fn points(&self) -> Vec<CurvePoint> {
        let f = &self.field;
        let mut out = vec![CurvePoint::Infinity];
        for x in f.elements() {
            let r = self.rhs(x);
            if let Some(y) = f.sqrt(r) {
                if y.is_zero() {
                    out.push(CurvePoint::Affine(x, y));
                } else {
                    let ny = f.neg(y);
                    let (lo, hi) = if f.index(y) < f.index(ny) { (y, ny) } else { (ny, y) };
                    out.push(CurvePoint::Affine(x, lo));
                    out.push(CurvePoint::Affine(x, hi));
                }
            }
        }
        out
    }

    pub fn count_points(&self) -> u64 {
        let f = &self.field;
        1 + f
            .elements()
            .map(|x| {
                let r = self.rhs(x);
                if r.is_zero() {
                    1
                } else if f.is_square(r) {
                    2
                } else {
                    0
                }
            })
            .sum::<u64>()
    }

    pub fn order_of(&self, p: &CurvePoint) -> u64 {
        let mut q = *p;
        let mut n = 1;
        while !q.is_infinity() {
            q = self.add(&q, p);
            n += 1;
        }
        n
    }

    pub fn n_torsion(&self, n: i64) -> TorsionSet {
        let pts: Vec<CurvePoint> = self.points().into_iter().filter(|p| self.mul(p, n).is_infinity()).collect();
        let complete = pts.len() as i64 == n * n;
        TorsionSet { n, points: pts, complete }
    }

    pub fn fmt_point(&self, p: &CurvePoint) -> String {
        match *p {
            CurvePoint::Infinity => "o".into(),
            CurvePoint::Affine(x, y) => format!("({},{})", self.field.fmt_elem(x), self.field.fmt_elem(y)),
        }
    }

    pub fn json_point(&self, p: &CurvePoint) -> Value {
        match *p {
            CurvePoint::Infinity => json!("O"),
            CurvePoint::Affine(x, y) => json!([self.field.json_elem(x), self.field.json_elem(y)]),
        }
    }

    /// Parses "o", "O" or "x,y" (prime-field coordinates).
    pub fn parse_point(&self, s: &str) -> Result<CurvePoint> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        if t.eq_ignore_ascii_case("o") || t.eq_ignore_ascii_case("inf") {
            return Ok(CurvePoint::Infinity);
        }
        let parts: Vec<&str> = t.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("bad point '{s}'")));
        }
        let num = |u: &str| -> Result<i64> { u.trim().parse().map_err(|_| Error::Parse(format!("bad point '{s}'"))) };
        self.point(num(parts[0])?, num(parts[1])?)
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "y^2 = x^3 + {}x + {} over {}",
            self.field.fmt_elem(self.a),
            self.field.fmt_elem(self.b),
            self.field
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionSet {
    pub n: i64,
    pub points: Vec<CurvePoint>,
    /// True when all `n^2` geometric torsion points are rational.
    pub complete: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e7() -> EllipticCurve {
        EllipticCurve::parse_spec("7:-1:0").unwrap()
    }

    #[test]
    fn two_torsion_sum_on_x3_minus_x() {
        let e = e7();
        let p = e.point(0, 0).unwrap();
        let q = e.point(1, 0).unwrap();
        assert_eq!(e.add_points(&p, &q).unwrap(), e.point(-1, 0).unwrap());
        let t = e.n_torsion(2);
        assert_eq!(t.points.len(), 4);
        assert!(t.complete);
    }

    #[test]
    fn off_curve_point_rejected() {
        let e = e7();
        let bad = CurvePoint::Affine(e.field.from_i64(2), e.field.from_i64(2));
        assert!(e.add_points(&bad, &CurvePoint::Infinity).is_err());
    }

    #[test]
    fn count_agrees_with_enumeration() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        assert_eq!(e.points().len() as u64, e.count_points());
        let e2 = e.base_change(2).unwrap();
        assert_eq!(e2.points().len() as u64, e2.count_points());
        // #E(F_{p^2}) = (p + 1)^2 - t^2 with t = p + 1 - #E(F_p)
        let n1 = e.count_points() as i64;
        let t = 38 - n1;
        assert_eq!(e2.count_points() as i64, 38 * 38 - t * t);
    }

    #[test]
    fn singular_curve_rejected() {
        assert!(EllipticCurve::parse_spec("7:0:0").is_err());
    }
}
