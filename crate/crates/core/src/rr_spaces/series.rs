//! Truncated Laurent series and local parametrizations of the curve.

use crate::field_curve::{CurvePoint, EllipticCurve, Fe, Field};

/// `sum c[i] t^(val + i)`, known modulo `t^(val + c.len())`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub val: i64,
    pub c: Vec<Fe>,
}

impl Series {
    pub fn constant(f: &Field, k: Fe, len: usize) -> Series {
        let mut c = vec![f.zero(); len.max(1)];
        c[0] = k;
        Series { val: 0, c }
    }

    pub fn prec(&self) -> i64 {
        self.val + self.c.len() as i64
    }

    pub fn normalize(mut self) -> Series {
        let lead = self.c.iter().position(|x| !x.is_zero()).unwrap_or(self.c.len());
        self.c.drain(..lead);
        self.val += lead as i64;
        self
    }

    /// First exponent with a nonzero coefficient, if any is visible.
    pub fn order(&self) -> Option<i64> {
        self.c.iter().position(|x| !x.is_zero()).map(|i| self.val + i as i64)
    }

    /// Coefficient of `t^n`; `None` if `n` lies beyond the known precision.
    pub fn coeff(&self, f: &Field, n: i64) -> Option<Fe> {
        if n < self.val {
            Some(f.zero())
        } else if n < self.prec() {
            Some(self.c[(n - self.val) as usize])
        } else {
            None
        }
    }

    pub fn add(&self, f: &Field, o: &Series) -> Series {
        let val = self.val.min(o.val);
        let prec = self.prec().min(o.prec());
        let len = (prec - val).max(0) as usize;
        let c = (0..len)
            .map(|i| {
                let n = val + i as i64;
                f.add(self.coeff(f, n).unwrap(), o.coeff(f, n).unwrap())
            })
            .collect();
        Series { val, c }
    }

    pub fn neg(&self, f: &Field) -> Series {
        Series { val: self.val, c: self.c.iter().map(|&x| f.neg(x)).collect() }
    }

    pub fn sub(&self, f: &Field, o: &Series) -> Series {
        self.add(f, &o.neg(f))
    }

    pub fn scale(&self, f: &Field, k: Fe) -> Series {
        Series { val: self.val, c: self.c.iter().map(|&x| f.mul(x, k)).collect() }
    }

    pub fn mul(&self, f: &Field, o: &Series) -> Series {
        let a = self.clone().normalize();
        let b = o.clone().normalize();
        if a.c.is_empty() || b.c.is_empty() {
            let prec = if a.c.is_empty() { a.prec() + b.val } else { b.prec() + a.val };
            return Series { val: prec, c: Vec::new() };
        }
        let len = a.c.len().min(b.c.len());
        let mut c = vec![f.zero(); len];
        for (i, &x) in a.c.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate().take(len - i) {
                c[i + j] = f.add(c[i + j], f.mul(x, y));
            }
        }
        Series { val: a.val + b.val, c }
    }

    /// Multiplicative inverse; `None` when no nonzero coefficient is visible.
    pub fn inv(&self, f: &Field) -> Option<Series> {
        let a = self.clone().normalize();
        let lead = *a.c.first()?;
        let li = f.inv(lead)?;
        let n = a.c.len();
        let mut r = vec![f.zero(); n];
        r[0] = li;
        for k in 1..n {
            let mut s = f.zero();
            for i in 1..=k {
                s = f.add(s, f.mul(a.c[i], r[k - i]));
            }
            r[k] = f.neg(f.mul(s, li));
        }
        Some(Series { val: -a.val, c: r })
    }

    pub fn shift(&self, k: i64) -> Series {
        Series { val: self.val + k, c: self.c.clone() }
    }

    /// Evaluates a polynomial (low degree first) at this series.
    pub fn compose_poly(&self, f: &Field, poly: &[Fe], len: usize) -> Series {
        let Some((&top, rest)) = poly.split_last() else {
            return Series { val: 0, c: vec![f.zero(); len] };
        };
        let mut acc = Series::constant(f, top, len);
        for &coef in rest.iter().rev() {
            acc = acc.mul(f, self).add(f, &Series::constant(f, coef, len));
        }
        acc
    }
}

/// Local coordinates `(x(t), y(t))` at a point, with the uniformizer
/// `x - x0` at ordinary affine points, `y` at affine 2-torsion points and
/// `-x/y` at the identity.
#[derive(Clone, Debug)]
pub struct LocalParam {
    pub x: Series,
    pub y: Series,
}

pub fn local_param(e: &EllipticCurve, p: &CurvePoint, len: usize) -> LocalParam {
    let f = &e.field;
    match *p {
        CurvePoint::Affine(x0, y0) if !y0.is_zero() => {
            let mut xc = vec![f.zero(); len];
            xc[0] = x0;
            if len > 1 {
                xc[1] = f.one();
            }
            // g(t) = rhs(x0 + t) expanded as a cubic in t
            let g = [
                e.rhs(x0),
                f.add(f.scale(f.square(x0), 3), e.a),
                f.scale(x0, 3),
                f.one(),
            ];
            let mut yc = vec![f.zero(); len];
            yc[0] = y0;
            let two_y0_inv = f.inv(f.scale(y0, 2)).expect("y0 != 0");
            for n in 1..len {
                let mut s = if n < 4 { g[n] } else { f.zero() };
                for i in 1..n {
                    s = f.sub(s, f.mul(yc[i], yc[n - i]));
                }
                yc[n] = f.mul(s, two_y0_inv);
            }
            LocalParam { x: Series { val: 0, c: xc }, y: Series { val: 0, c: yc } }
        }
        CurvePoint::Affine(x0, _) => {
            // rhs(x0 + u) = d1 u + 3 x0 u^2 + u^3 = t^2
            let d1 = f.add(f.scale(f.square(x0), 3), e.a);
            let d1_inv = f.inv(d1).expect("nonsingular curve has simple 2-torsion roots");
            let c2 = f.scale(x0, 3);
            let mut u = vec![f.zero(); len];
            for n in 2..len {
                let mut s = if n == 2 { f.one() } else { f.zero() };
                for i in 2..n.saturating_sub(1) {
                    if n - i >= 2 {
                        s = f.sub(s, f.mul(c2, f.mul(u[i], u[n - i])));
                    }
                }
                for i in 2..n {
                    for j in 2..n {
                        if i + j + 2 <= n {
                            let k = n - i - j;
                            if k >= 2 {
                                s = f.sub(s, f.mul(u[i], f.mul(u[j], u[k])));
                            }
                        }
                    }
                }
                u[n] = f.mul(s, d1_inv);
            }
            let mut xc = u;
            xc[0] = x0;
            let mut yc = vec![f.zero(); len];
            if len > 1 {
                yc[1] = f.one();
            }
            LocalParam { x: Series { val: 0, c: xc }, y: Series { val: 0, c: yc } }
        }
        CurvePoint::Infinity => {
            // w = z^3 + a z w^2 + b w^3 with x = z / w, y = -1 / w
            let n = len + 8;
            let mut w = vec![f.zero(); n];
            for k in 3..n {
                let mut s = if k == 3 { f.one() } else { f.zero() };
                // a * (w^2)_{k-1}
                if k >= 7 {
                    let mut sq = f.zero();
                    for i in 3..=(k - 1 - 3) {
                        sq = f.add(sq, f.mul(w[i], w[k - 1 - i]));
                    }
                    s = f.add(s, f.mul(e.a, sq));
                }
                // b * (w^3)_k
                if k >= 9 {
                    let mut cube = f.zero();
                    for i in 3..k {
                        for j in 3..k {
                            if i + j + 3 <= k {
                                cube = f.add(cube, f.mul(w[i], f.mul(w[j], w[k - i - j])));
                            }
                        }
                    }
                    s = f.add(s, f.mul(e.b, cube));
                }
                w[k] = s;
            }
            let ws = Series { val: 0, c: w };
            let winv = ws.inv(f).expect("w has a nonzero z^3 term");
            let z = Series { val: 1, c: {
                let mut c = vec![f.zero(); n];
                c[0] = f.one();
                c
            } };
            LocalParam { x: z.mul(f, &winv), y: winv.neg(f) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_relation(e: &EllipticCurve, p: &CurvePoint) {
        let f = &e.field;
        let lp = local_param(e, p, 20);
        let lhs = lp.y.mul(f, &lp.y);
        let x3 = lp.x.mul(f, &lp.x).mul(f, &lp.x);
        let rhs = x3.add(f, &lp.x.scale(f, e.a)).add(f, &Series::constant(f, e.b, 40));
        let diff = lhs.sub(f, &rhs).normalize();
        assert!(diff.c.iter().all(|c| c.is_zero()), "relation fails at {}", e.fmt_point(p));
        assert!(diff.prec() >= 8);
    }

    #[test]
    fn parametrizations_satisfy_the_curve_equation() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        for p in e.points().iter().take(12) {
            check_relation(&e, p);
        }
        let e2 = EllipticCurve::parse_spec("61:2:12").unwrap();
        for p in e2.n_torsion(2).points {
            check_relation(&e2, &p);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Field::prime(11).unwrap();
        let s = Series { val: -2, c: (1..8).map(|i| f.from_i64(i)).collect() };
        let prod = s.mul(&f, &s.inv(&f).unwrap());
        assert_eq!(prod.val, 0);
        assert_eq!(prod.c[0], f.one());
        assert!(prod.c[1..].iter().all(|c| c.is_zero()));
    }
}
