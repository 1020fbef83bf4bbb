use super::curve::{CurvePoint, EllipticCurve};
use crate::error::{Error, Result};

/// Quotient of `E` by the subgroup generated by a point of order 3.
#[derive(Clone, Debug)]
pub struct Isogeny3 {
    pub domain: EllipticCurve,
    pub codomain: EllipticCurve,
    pub kernel: [CurvePoint; 3],
}

impl Isogeny3 {
    /// `X(P) = x(P) + sum_{Q != o} (x(P+Q) - x(Q))`, likewise for `Y`.
    pub fn map(&self, p: &CurvePoint) -> CurvePoint {
        if self.kernel.contains(p) {
            return CurvePoint::Infinity;
        }
        let e = &self.domain;
        let f = &e.field;
        let (mut x, mut y) = p.coords().expect("kernel contains the identity");
        for q in &self.kernel[1..] {
            let (xs, ys) = e.add(p, q).coords().expect("P not in kernel");
            let (xq, yq) = q.coords().expect("nonzero kernel point");
            x = f.add(x, f.sub(xs, xq));
            y = f.add(y, f.sub(ys, yq));
        }
        CurvePoint::Affine(x, y)
    }
}

pub fn velu_3_isogeny(e: &EllipticCurve, t: &CurvePoint) -> Result<Isogeny3> {
    if !e.contains(t) {
        return Err(Error::Domain("kernel generator not on curve".into()));
    }
    if t.is_infinity() || !e.mul(t, 3).is_infinity() {
        return Err(Error::Domain("kernel generator must have exact order 3".into()));
    }
    let f = &e.field;
    let (xt, yt) = t.coords().expect("nonzero point");
    let gx = f.add(f.scale(f.square(xt), 3), e.a);
    let gy = f.scale(yt, -2);
    let v = f.scale(gx, 2);
    let u = f.square(gy);
    let w = f.add(u, f.mul(xt, v));
    let codomain = EllipticCurve::new(*f, f.sub(e.a, f.scale(v, 5)), f.sub(e.b, f.scale(w, 7)))?;
    Ok(Isogeny3 { domain: *e, codomain, kernel: [CurvePoint::Infinity, *t, e.mul(t, 2)] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_lies_on_codomain_and_kernel_collapses() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        let t = e.points().into_iter().find(|p| e.order_of(p) == 3).unwrap();
        let phi = velu_3_isogeny(&e, &t).unwrap();
        for p in e.points() {
            assert!(phi.codomain.contains(&phi.map(&p)));
        }
        assert!(phi.map(&t).is_infinity());
        assert!(velu_3_isogeny(&e, &CurvePoint::Infinity).is_err());
    }
}
