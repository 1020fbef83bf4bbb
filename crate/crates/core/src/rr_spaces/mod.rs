//! Riemann–Roch spaces `L(D)` on an elliptic curve: bases, evaluation,
//! products and zero divisors of sections.

pub mod func;
pub mod series;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field_curve::linalg::{self, Matrix};
use crate::field_curve::poly::{self, Poly};
use crate::field_curve::{CurvePoint, EllipticCurve, Fe};
use crate::picard::{class_of, h0_h1, Divisor, LineClass};

pub use func::Func;
pub use series::Series;

/// Largest extension degree scanned by [`zero_divisor`].
pub const DEFAULT_MAX_EXTENSION: usize = 6;

const CERTIFY_SEED: u64 = 0x7272_5f62_6173_6973;

/// A section of `O(D)`, modelled as a rational function `f` with
/// `div(f) + D >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionFn {
    pub func: Func,
    pub div: Divisor,
}

impl SectionFn {
    pub fn new(func: Func, div: Divisor) -> SectionFn {
        SectionFn { func, div }
    }

    /// The constant section 1 of `O(D)` for effective `D`.
    pub fn unit(e: &EllipticCurve, div: Divisor) -> SectionFn {
        SectionFn { func: Func::one(&e.field), div }
    }

    pub fn is_zero(&self) -> bool {
        self.func.is_zero()
    }

    /// Vanishing order of the section at `q`; `None` for the zero section.
    pub fn order_at(&self, e: &EllipticCurve, q: &CurvePoint) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.func.order_at(e, q) + self.div.coeff(q))
    }

    /// Expansion in the local trivialization at `q`: the function's series
    /// shifted by the multiplicity of `q` in `D`.
    pub fn local_series(&self, e: &EllipticCurve, q: &CurvePoint, extra: usize) -> Series {
        let n = self.div.coeff(q);
        self.func.expand(e, q, extra + n.max(0) as usize).shift(n)
    }

    /// Value in the local trivialization at `q`.
    pub fn value_at(&self, e: &EllipticCurve, q: &CurvePoint) -> Fe {
        let n = self.div.coeff(q);
        if n == 0 {
            if let Some(v) = self.func.eval(e, q) {
                return v;
            }
        }
        self.local_series(e, q, 1).coeff(&e.field, 0).expect("expansion covers the constant term")
    }

    /// Plain function value at a point outside the support of `D`.
    pub fn eval(&self, e: &EllipticCurve, q: &CurvePoint) -> Option<Fe> {
        self.func.eval(e, q)
    }

    pub fn scale(&self, e: &EllipticCurve, k: Fe) -> SectionFn {
        SectionFn { func: self.func.scale(&e.field, k).reduced(&e.field), div: self.div.clone() }
    }

    /// Sum of two sections of the same `O(D)`.
    pub fn add(&self, e: &EllipticCurve, other: &SectionFn) -> Result<SectionFn> {
        if self.div != other.div {
            return Err(Error::Domain("adding sections of different shift divisors".into()));
        }
        Ok(SectionFn { func: self.func.add(&e.field, &other.func).reduced(&e.field), div: self.div.clone() })
    }

    /// Is `div(f) + D >= 0` at every support point of `D` and at the zeros of
    /// the denominator?
    pub fn is_regular(&self, e: &EllipticCurve) -> bool {
        if self.is_zero() {
            return true;
        }
        let f = &e.field;
        let mut pts: BTreeSet<CurvePoint> = self.div.support().into_iter().collect();
        pts.insert(CurvePoint::Infinity);
        for x0 in poly::roots(f, &self.func.c) {
            for y0 in [f.sqrt(e.rhs(x0))].into_iter().flatten() {
                pts.insert(CurvePoint::Affine(x0, y0));
                pts.insert(CurvePoint::Affine(x0, f.neg(y0)));
            }
        }
        pts.iter().all(|q| self.order_at(e, q).unwrap() >= 0)
    }

    pub fn fmt(&self, e: &EllipticCurve) -> String {
        format!("{} in L({})", self.func.fmt(&e.field), self.div.fmt(e))
    }

    pub fn json(&self, e: &EllipticCurve) -> Value {
        json!({"function": self.func.fmt(&e.field), "divisor": self.div.json(e)})
    }
}

fn check_rational(e: &EllipticCurve, d: &Divisor) -> Result<()> {
    for p in d.support() {
        if !e.contains(&p) {
            return Err(Error::Domain(format!("divisor point {} is not on {}", e.fmt_point(&p), e.spec())));
        }
    }
    Ok(())
}

/// Multiplicity of the factor `x - x0` in the denominator used for `D`.
fn pole_exponents(d: &Divisor) -> Vec<(Fe, i64)> {
    let mut out: Vec<(Fe, i64)> = Vec::new();
    for (p, &n) in d.terms() {
        let CurvePoint::Affine(x0, y0) = *p else { continue };
        if n <= 0 {
            continue;
        }
        let need = if y0.is_zero() { (n + 1) / 2 } else { n };
        match out.iter_mut().find(|(x, _)| *x == x0) {
            Some(slot) => slot.1 = slot.1.max(need),
            None => out.push((x0, need)),
        }
    }
    out
}

/// Basis of `L(D)`, certified linearly independent by evaluation.
pub fn rr_basis(e: &EllipticCurve, d: &Divisor) -> Result<Vec<SectionFn>> {
    check_rational(e, d)?;
    if d.degree() < 0 {
        return Err(Error::Domain(format!("rr_basis needs deg D >= 0, got {}", d.degree())));
    }
    let f = &e.field;
    let exps = pole_exponents(d);
    let mut h: Poly = poly::constant(f, f.one());
    for &(x0, k) in &exps {
        h = poly::mul(f, &h, &poly::pow(f, &poly::linear(f, x0), k as u32));
    }
    let pole_budget = d.coeff(&CurvePoint::Infinity) + 2 * exps.iter().map(|&(_, k)| k).sum::<i64>();
    if pole_budget < 0 {
        return certify(e, d, Vec::new());
    }
    let nx = (pole_budget / 2 + 1) as usize;
    let ny = if pole_budget >= 3 { ((pole_budget - 3) / 2 + 1) as usize } else { 0 };
    let ncols = nx + ny;

    // Local vanishing conditions at the affine points involved.
    let mut pts: BTreeSet<CurvePoint> = d.support().into_iter().filter(|p| !p.is_infinity()).collect();
    for &(x0, _) in &exps {
        if let Some(y0) = f.sqrt(e.rhs(x0)) {
            pts.insert(CurvePoint::Affine(x0, y0));
            pts.insert(CurvePoint::Affine(x0, f.neg(y0)));
        }
    }
    let mut rows: Matrix = Vec::new();
    for q in &pts {
        let (xq, yq) = q.coords().unwrap();
        let k = exps.iter().find(|(x, _)| *x == xq).map_or(0, |&(_, k)| k);
        let ord_h = if yq.is_zero() { 2 * k } else { k };
        let need = ord_h - d.coeff(q);
        if need <= 0 {
            continue;
        }
        let len = need as usize + 2;
        let lp = series::local_param(e, q, len);
        let mut xpow = Series::constant(f, f.one(), len);
        let mut xs = Vec::with_capacity(nx);
        for _ in 0..nx {
            xs.push(xpow.clone());
            xpow = xpow.mul(f, &lp.x);
        }
        let cols: Vec<Series> = xs.iter().cloned().chain(xs.iter().take(ny).map(|s| s.mul(f, &lp.y))).collect();
        for n in 0..need {
            rows.push(cols.iter().map(|s| s.coeff(f, n).expect("series precision")).collect());
        }
    }
    let kernel = if rows.is_empty() {
        (0..ncols)
            .map(|j| {
                let mut v = vec![f.zero(); ncols];
                v[j] = f.one();
                v
            })
            .collect()
    } else {
        linalg::nullspace(f, &rows, ncols)
    };
    let basis = kernel
        .into_iter()
        .map(|v| {
            let a = poly::trim(v[..nx].to_vec());
            let b = poly::trim(v[nx..].to_vec());
            SectionFn { func: Func { a, b, c: h.clone() }.reduced(f), div: d.clone() }
        })
        .collect();
    certify(e, d, basis)
}

/// Rational points outside `avoid`, in a seeded random order.
pub fn sample_points(e: &EllipticCurve, avoid: &[CurvePoint], seed: u64) -> Vec<CurvePoint> {
    let mut pts: Vec<CurvePoint> = e.points().into_iter().filter(|p| !avoid.contains(p)).collect();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    pts
}

/// Evaluation matrix `[s_j(P_i)]` at points outside every shift divisor.
pub fn evaluation_matrix(e: &EllipticCurve, sections: &[SectionFn], pts: &[CurvePoint]) -> Matrix {
    let f = &e.field;
    pts.iter()
        .map(|p| sections.iter().map(|s| s.eval(e, p).unwrap_or(f.zero())).collect())
        .collect()
}

fn certify(e: &EllipticCurve, d: &Divisor, basis: Vec<SectionFn>) -> Result<Vec<SectionFn>> {
    let expected = h0_h1(&class_of(e, d)).0 as usize;
    if basis.len() != expected {
        return Err(Error::Verification(format!(
            "L({}) has {} computed sections, Riemann-Roch predicts {expected}",
            d.fmt(e),
            basis.len()
        )));
    }
    if basis.is_empty() {
        return Ok(basis);
    }
    let mut avoid = d.support();
    avoid.push(CurvePoint::Infinity);
    let needed = d.degree().max(0) as usize + 1;
    let pool = sample_points(e, &avoid, CERTIFY_SEED);
    if pool.len() < basis.len() {
        return Err(Error::FieldTooSmall(format!(
            "only {} rational points avoid the support of {}; use a field extension",
            pool.len(),
            d.fmt(e)
        )));
    }
    let first = &pool[..needed.min(pool.len())];
    if linalg::rank(&e.field, &evaluation_matrix(e, &basis, first)) == basis.len()
        || linalg::rank(&e.field, &evaluation_matrix(e, &basis, &pool)) == basis.len()
    {
        Ok(basis)
    } else {
        Err(Error::Verification(format!("basis of L({}) failed the independence check", d.fmt(e))))
    }
}

/// Product section of `O(D1 + D2)`.
pub fn multiply_sections(e: &EllipticCurve, s: &SectionFn, t: &SectionFn) -> SectionFn {
    SectionFn { func: s.func.mul(e, &t.func), div: s.div.add(&t.div) }
}

/// Zeros of a section over a finite extension, with the curve they live on.
#[derive(Clone, Debug)]
pub struct ZeroLocus {
    pub curve: EllipticCurve,
    pub divisor: Divisor,
    pub extension_degree: usize,
}

impl ZeroLocus {
    /// Abel–Jacobi class of the zero divisor, on the extension curve.
    pub fn class(&self) -> LineClass {
        class_of(&self.curve, &self.divisor)
    }
}

/// Effective divisor of zeros of `s`, found over `F_{p^k}` for the smallest
/// `k <= kmax` that accounts for all `deg D` zeros.
pub fn zero_divisor(e: &EllipticCurve, s: &SectionFn, kmax: usize) -> Result<ZeroLocus> {
    if s.is_zero() {
        return Err(Error::Domain("zero divisor of the zero section".into()));
    }
    let target = s.div.degree();
    let norm = s.func.numerator_norm(e);
    for k in (1..=kmax).filter(|k| k % e.field.degree() == 0) {
        let ek = if k == e.field.degree() { *e } else { e.base_change(k)? };
        let fk = &ek.field;
        let mut cands: BTreeSet<CurvePoint> = s.div.support().into_iter().collect();
        cands.insert(CurvePoint::Infinity);
        for x0 in poly::roots(fk, &norm) {
            if let Some(y0) = fk.sqrt(ek.rhs(x0)) {
                cands.insert(CurvePoint::Affine(x0, y0));
                cands.insert(CurvePoint::Affine(x0, fk.neg(y0)));
            }
        }
        let mut div = Divisor::zero();
        for q in &cands {
            let m = s.func.order_at(&ek, q) + s.div.coeff(q);
            if m < 0 {
                return Err(Error::Domain(format!("section has a pole at {}", ek.fmt_point(q))));
            }
            if m > 0 {
                div = div.plus_point(*q, m);
            }
        }
        if div.degree() == target {
            return Ok(ZeroLocus { curve: ek, divisor: div, extension_degree: k });
        }
    }
    Err(Error::FieldTooSmall(format!("zeros of {} not all found over F_(p^k), k <= {kmax}", s.fmt(e))))
}

/// Element of `L(D)` with prescribed plain values at points outside `D`.
pub fn interpolate(e: &EllipticCurve, d: &Divisor, data: &[(CurvePoint, Fe)]) -> Result<SectionFn> {
    let basis = rr_basis(e, d)?;
    let pts: Vec<CurvePoint> = data.iter().map(|(p, _)| *p).collect();
    let m = evaluation_matrix(e, &basis, &pts);
    let rhs: Vec<Fe> = data.iter().map(|(_, v)| *v).collect();
    let coeffs = linalg::solve(&e.field, &m, &rhs)
        .ok_or_else(|| Error::Domain(format!("no section of L({}) takes the requested values", d.fmt(e))))?;
    Ok(combine(e, d, &basis, &coeffs))
}

/// `sum c_j s_j` for sections of the same `O(D)`.
pub fn combine(e: &EllipticCurve, d: &Divisor, basis: &[SectionFn], coeffs: &[Fe]) -> SectionFn {
    let f = &e.field;
    let func = basis
        .iter()
        .zip(coeffs)
        .fold(Func::zero(f), |acc, (s, &c)| acc.add(f, &s.func.scale(f, c)))
        .reduced(f);
    SectionFn { func, div: d.clone() }
}

/// Sections in `span(basis)` vanishing (in the local frame) at every point
/// of `pts`.
pub fn vanishing_subspace(e: &EllipticCurve, basis: &[SectionFn], pts: &[CurvePoint]) -> Vec<SectionFn> {
    let Some(d) = basis.first().map(|s| s.div.clone()) else {
        return Vec::new();
    };
    let rows: Matrix = pts.iter().map(|q| basis.iter().map(|s| s.value_at(e, q)).collect()).collect();
    linalg::nullspace(&e.field, &rows, basis.len())
        .into_iter()
        .map(|v| combine(e, &d, basis, &v))
        .collect()
}

/// Divisor `[P] - [o]`, with class `(0, P)`.
pub fn degree_zero_divisor(p: &CurvePoint) -> Divisor {
    Divisor::point(*p).plus_point(CurvePoint::Infinity, -1)
}

/// A nonzero function with divisor exactly `d` (which must be principal).
pub fn function_with_divisor(e: &EllipticCurve, d: &Divisor) -> Result<Func> {
    if !class_of(e, d).is_trivial() {
        return Err(Error::Domain(format!("{} is not principal", d.fmt(e))));
    }
    let basis = rr_basis(e, &d.scale(-1))?;
    Ok(basis[0].func.clone())
}

/// The four shift divisors of `(f0, f1, f2, f3)` determine `tau` and `p`.
pub fn infer_tau_and_p(e: &EllipticCurve, fs: &[SectionFn; 4]) -> Result<(CurvePoint, CurvePoint)> {
    let o = CurvePoint::Infinity;
    let bad = |what: &str| Error::Domain(format!("inconsistent shift divisors: {what}"));
    let d0 = &fs[0].div;
    if d0.degree() != 1 || !d0.is_effective() || d0.support().len() != 1 {
        return Err(bad("f0 must be a section of O(tau)"));
    }
    let tau = d0.support()[0];
    let twice_p = fs[1].div.sub(d0).plus_point(o, 1);
    let p = match twice_p.terms().collect::<Vec<_>>().as_slice() {
        [(&q, &2)] => q,
        [] => o,
        _ => return Err(bad("f1 must be a section of O(2p + tau - o)")),
    };
    let expect2 = Divisor::from_terms([(o, 1), (tau, 1)]);
    let expect3 = Divisor::from_terms([(o, 3), (p, -2), (tau, 1)]);
    if fs[2].div != expect2 {
        return Err(bad("f2 must be a section of O(o + tau)"));
    }
    if fs[3].div != expect3 {
        return Err(bad("f3 must be a section of O(3o - 2p + tau)"));
    }
    let _ = e;
    Ok((tau, p))
}

/// `dim ker` of `(a, b, c, d) -> f0 a + f1 b + f2 c + f3 d` from
/// `H0(L*(o)) + H0(L*(2o-2p)) + H0(L*) + H0(L*(2p-2o))` to `H0(L*(o+tau))`.
pub fn alpha_star_kernel(e: &EllipticCurve, fs: &[SectionFn; 4], l: &LineClass) -> Result<usize> {
    if l.deg != 0 {
        return Err(Error::Domain("alpha_star_kernel needs a degree-0 class".into()));
    }
    let (tau, p) = infer_tau_and_p(e, fs)?;
    let o = CurvePoint::Infinity;
    let dual = degree_zero_divisor(&e.neg(&l.point));
    let sources = [
        dual.clone().plus_point(o, 1),
        dual.clone().plus_point(o, 2).plus_point(p, -2),
        dual.clone(),
        dual.clone().plus_point(p, 2).plus_point(o, -2),
    ];
    let target = dual.plus_point(o, 1).plus_point(tau, 1);
    let mut columns: Vec<SectionFn> = Vec::new();
    let mut avoid: BTreeSet<CurvePoint> = target.support().into_iter().collect();
    avoid.extend([o, p, tau, e.neg(&l.point)]);
    for (src, fi) in sources.iter().zip(fs.iter()) {
        let basis = rr_basis(e, src)?;
        if basis.is_empty() {
            continue;
        }
        let shift = src.add(&fi.div);
        // Identify O(shift) with O(target) through a function of divisor shift - target.
        let phi = function_with_divisor(e, &shift.sub(&target))?;
        for b in &basis {
            let prod = multiply_sections(e, fi, b);
            columns.push(SectionFn { func: prod.func.mul(e, &phi), div: target.clone() });
        }
        avoid.extend(src.support());
        avoid.extend(fi.div.support());
    }
    if columns.is_empty() {
        return Ok(0);
    }
    let avoid: Vec<CurvePoint> = avoid.into_iter().collect();
    let pts = sample_points(e, &avoid, CERTIFY_SEED ^ 0xa1);
    let needed = target.degree() as usize + 3;
    if pts.len() < needed {
        return Err(Error::FieldTooSmall("not enough evaluation points for the multiplication map".into()));
    }
    let rank = linalg::rank(&e.field, &evaluation_matrix(e, &columns, &pts[..needed]));
    Ok(columns.len() - rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b37() -> EllipticCurve {
        EllipticCurve::parse_spec("37:0:1").unwrap()
    }

    #[test]
    fn trivial_divisor_has_constant_basis() {
        let e = b37();
        let b = rr_basis(&e, &Divisor::zero()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].func, Func::one(&e.field));
    }

    #[test]
    fn dimension_matches_degree() {
        let e = b37();
        let pts = e.points();
        let tau = pts[4];
        assert_eq!(rr_basis(&e, &Divisor::point(tau).scale(3)).unwrap().len(), 3);
        let d = Divisor::from_terms([(pts[2], 2), (pts[7], 1), (CurvePoint::Infinity, -1)]);
        let basis = rr_basis(&e, &d).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(basis.iter().all(|s| s.is_regular(&e)));
    }

    #[test]
    fn zero_divisor_of_unit_section() {
        let e = b37();
        let tau = e.points()[4];
        let s = SectionFn::unit(&e, Divisor::point(tau));
        let z = zero_divisor(&e, &s, 1).unwrap();
        assert_eq!(z.divisor, Divisor::point(tau));
        let cube = multiply_sections(&e, &multiply_sections(&e, &s, &s), &s);
        assert_eq!(zero_divisor(&e, &cube, 1).unwrap().divisor, Divisor::point(tau).scale(3));
    }

    #[test]
    fn section_vanishing_at_a_point() {
        let e = b37();
        let pts = e.points();
        let (tau, q) = (pts[4], pts[9]);
        let d = Divisor::from_terms([(CurvePoint::Infinity, 1), (tau, 1)]);
        let basis = rr_basis(&e, &d).unwrap();
        let sq = vanishing_subspace(&e, &basis, &[q]);
        assert_eq!(sq.len(), 1);
        let z = zero_divisor(&e, &sq[0], 2).unwrap();
        assert_eq!(z.divisor.coeff(&q), 1);
        assert_eq!(z.class(), class_of(&e, &d));
    }
}
