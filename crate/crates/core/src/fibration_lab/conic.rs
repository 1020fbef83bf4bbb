//! Conic bundles `u0 u2 - u1^2 = 0` with `u = A y`, and the singular points
//! of their total space.
//!
//! Entry `A[i][k]` is a section of `O(C_k - R_i)` for divisors `C_k` (twists
//! of the `y` coordinates) and `R_i` (twists of the `u` coordinates) with
//! `R_0 + R_2 = 2 R_1`. Under that convention the local series of the entries
//! at any point give the equation in a local frame.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field_curve::{linalg, CurvePoint, EllipticCurve, Fe, Field};
use crate::rr_spaces::{zero_divisor, Func, SectionFn};

type Mat3 = [[Fe; 3]; 3];

#[derive(Clone, Debug)]
pub struct ConicBundle {
    pub curve: EllipticCurve,
    pub entries: [[SectionFn; 3]; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularityKind {
    A1,
    /// Hessian of rank 2 or less: worse than a node.
    WorseThanA1,
    /// The fibre is a double line.
    NonReducedFibre,
}

impl SingularityKind {
    pub fn name(&self) -> &'static str {
        match self {
            SingularityKind::A1 => "A1",
            SingularityKind::WorseThanA1 => "worse than A1",
            SingularityKind::NonReducedFibre => "non-reduced fibre",
        }
    }
}

/// `u1 = c0 u0 + c2 u2` at a degenerate fibre, and whether
/// `u0 u2 - (c0 u0 + c2 u2)^2` is a product of two distinct linear forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitTest {
    pub c0: Fe,
    pub c2: Fe,
    /// `1 - 4 c0 c2`.
    pub discriminant: Fe,
    pub distinct: bool,
}

#[derive(Clone, Debug)]
pub struct DegenerateFibre {
    pub base: CurvePoint,
    pub fibre_rank: usize,
    /// Normalized kernel point of the fibre's quadratic form (rank 2 only).
    pub vertex: Option<[Fe; 3]>,
    /// Whether the total space is singular at the vertex.
    pub singular: bool,
    pub hessian_rank: Option<usize>,
    pub kind: Option<SingularityKind>,
    pub split_test: Option<SplitTest>,
}

#[derive(Clone, Debug)]
pub struct SingularityReport {
    /// Curve over which the degenerate fibres were found.
    pub curve: EllipticCurve,
    pub extension_degree: usize,
    pub degenerate: Vec<DegenerateFibre>,
    /// Rank of the fibre over a rational point outside the degenerate locus.
    pub generic_fibre_rank: Option<usize>,
}

impl SingularityReport {
    pub fn singular_points(&self) -> impl Iterator<Item = &DegenerateFibre> {
        self.degenerate.iter().filter(|d| d.singular || d.fibre_rank < 2)
    }

    pub fn node_count(&self) -> usize {
        self.singular_points().filter(|d| d.kind == Some(SingularityKind::A1)).count()
    }

    /// Only `A1` points: the conic bundle condition needed for the double cover.
    pub fn only_nodes(&self) -> bool {
        self.singular_points().all(|d| d.kind == Some(SingularityKind::A1))
    }

    pub fn json(&self) -> Value {
        let e = &self.curve;
        let f = &e.field;
        let fibres: Vec<Value> = self
            .degenerate
            .iter()
            .map(|d| {
                json!({
                    "base": e.json_point(&d.base),
                    "fibre_rank": d.fibre_rank,
                    "vertex": d.vertex.map(|v| v.iter().map(|x| f.json_elem(*x)).collect::<Vec<_>>()),
                    "total_space_singular": d.singular,
                    "hessian_rank": d.hessian_rank,
                    "type": d.kind.map(|k| k.name()),
                    "split_test": d.split_test.map(|s| json!({
                        "c0": f.json_elem(s.c0),
                        "c2": f.json_elem(s.c2),
                        "discriminant": f.json_elem(s.discriminant),
                        "distinct_lines": s.distinct,
                    })),
                })
            })
            .collect();
        json!({
            "field": f.spec(),
            "degenerate_fibres": fibres,
            "nodes": self.node_count(),
            "only_nodes": self.only_nodes(),
            "generic_fibre_rank": self.generic_fibre_rank,
        })
    }
}

fn zero3(f: &Field) -> Mat3 {
    [[f.zero(); 3]; 3]
}

fn mat_mul(f: &Field, a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = zero3(f);
    for i in 0..3 {
        for j in 0..3 {
            for (k, bk) in b.iter().enumerate() {
                out[i][j] = f.add(out[i][j], f.mul(a[i][k], bk[j]));
            }
        }
    }
    out
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut t = *a;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            t[j][i] = *x;
        }
    }
    t
}

fn mat_add(f: &Field, a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = f.add(a[i][j], b[i][j]);
        }
    }
    out
}

fn to_matrix(a: &Mat3) -> linalg::Matrix {
    a.iter().map(|r| r.to_vec()).collect()
}

fn quad(f: &Field, q: &Mat3, v: &[Fe; 3]) -> Fe {
    let mut s = f.zero();
    for i in 0..3 {
        for j in 0..3 {
            s = f.add(s, f.mul(q[i][j], f.mul(v[i], v[j])));
        }
    }
    s
}

/// Scales so that the first nonzero coordinate is 1.
pub fn normalize_projective(f: &Field, v: [Fe; 3]) -> [Fe; 3] {
    match v.iter().find(|x| !x.is_zero()) {
        Some(&lead) => {
            let li = f.inv(lead).expect("nonzero");
            v.map(|x| f.mul(x, li))
        }
        None => v,
    }
}

impl ConicBundle {
    /// Matrix of the form `u0 u2 - u1^2` in the `u` coordinates.
    fn u_form(f: &Field) -> Mat3 {
        let half = f.inv(f.from_u64(2)).expect("odd characteristic");
        let mut m = zero3(f);
        m[0][2] = half;
        m[2][0] = half;
        m[1][1] = f.neg(f.one());
        m
    }

    /// Coefficients of `t^0, t^1, t^2` of `A` in the local frame at `x`,
    /// where `ek` is the curve `x` lives on.
    pub fn local_entries(&self, ek: &EllipticCurve, x: &CurvePoint) -> Result<[Mat3; 3]> {
        let f = &ek.field;
        let mut out = [zero3(f); 3];
        for i in 0..3 {
            for k in 0..3 {
                let s = &self.entries[i][k];
                if s.is_zero() {
                    continue;
                }
                let ser = s.local_series(ek, x, 6);
                for (n, m) in out.iter_mut().enumerate() {
                    m[i][k] = ser.coeff(f, n as i64).ok_or_else(|| {
                        Error::Verification(format!("local series precision too low at {}", ek.fmt_point(x)))
                    })?;
                }
                if ser.val < 0 {
                    return Err(Error::Domain(format!(
                        "entry ({i},{k}) has a pole at {} in its frame",
                        ek.fmt_point(x)
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Coefficients `Q0, Q1, Q2` of the symmetric matrix of the local equation.
    pub fn local_form(&self, ek: &EllipticCurve, x: &CurvePoint) -> Result<[Mat3; 3]> {
        let f = &ek.field;
        let [a0, a1, a2] = self.local_entries(ek, x)?;
        let m = ConicBundle::u_form(f);
        let sand = |l: &Mat3, r: &Mat3| mat_mul(f, &transpose(l), &mat_mul(f, &m, r));
        let q0 = sand(&a0, &a0);
        let q1 = mat_add(f, &sand(&a1, &a0), &sand(&a0, &a1));
        let q2 = mat_add(f, &mat_add(f, &sand(&a2, &a0), &sand(&a1, &a1)), &sand(&a0, &a2));
        Ok([q0, q1, q2])
    }

    /// `det A` as a section; its zeros are the degenerate fibres.
    pub fn determinant(&self) -> SectionFn {
        let e = &self.curve;
        let f = &e.field;
        let a = &self.entries;
        let mut det = Func::zero(f);
        for (p, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)]
        {
            let term = a[0][p[0]].func.mul(e, &a[1][p[1]].func).mul(e, &a[2][p[2]].func);
            det = if sign > 0 { det.add(f, &term) } else { det.sub(f, &term) };
        }
        let div = a[0][0].div.add(&a[1][1].div).add(&a[2][2].div);
        SectionFn::new(det.reduced(f), div)
    }

    fn analyse_fibre(&self, ek: &EllipticCurve, x: &CurvePoint) -> Result<DegenerateFibre> {
        let f = &ek.field;
        let [q0, q1, q2] = self.local_form(ek, x)?;
        let rank = linalg::rank(f, &to_matrix(&q0));
        let mut out = DegenerateFibre {
            base: *x,
            fibre_rank: rank,
            vertex: None,
            singular: false,
            hessian_rank: None,
            kind: None,
            split_test: None,
        };
        if rank == 3 {
            return Ok(out);
        }
        if rank < 2 {
            out.singular = true;
            out.kind = Some(SingularityKind::NonReducedFibre);
            return Ok(out);
        }
        let kv = linalg::nullspace(f, &to_matrix(&q0), 3).remove(0);
        let k = normalize_projective(f, [kv[0], kv[1], kv[2]]);
        out.vertex = Some(k);
        out.split_test = split_test(f, &self.local_entries(ek, x)?[0]);
        if !quad(f, &q1, &k).is_zero() {
            return Ok(out);
        }
        out.singular = true;
        // Affine chart where the vertex has a unit coordinate; variables are
        // the two remaining coordinates and the uniformizer.
        let j = k.iter().position(|c| !c.is_zero()).expect("nonzero vertex");
        let idx: Vec<usize> = (0..3).filter(|&i| i != j).collect();
        let two = f.from_u64(2);
        let q1k: Vec<Fe> = (0..3).map(|r| (0..3).fold(f.zero(), |s, c| f.add(s, f.mul(q1[r][c], k[c])))).collect();
        let mut h = vec![vec![f.zero(); 3]; 3];
        for (r, &a) in idx.iter().enumerate() {
            for (c, &b) in idx.iter().enumerate() {
                h[r][c] = f.mul(two, q0[a][b]);
            }
            h[r][2] = f.mul(two, q1k[a]);
            h[2][r] = h[r][2];
        }
        h[2][2] = f.mul(two, quad(f, &q2, &k));
        let hr = linalg::rank(f, &h);
        out.hessian_rank = Some(hr);
        out.kind = Some(if hr == 3 { SingularityKind::A1 } else { SingularityKind::WorseThanA1 });
        Ok(out)
    }

    /// Jacobian criterion fibre by fibre over the zeros of `det A`.
    pub fn singularities(&self, kmax: usize) -> Result<SingularityReport> {
        let det = self.determinant();
        if det.is_zero() {
            return Err(Error::Domain("every fibre of the conic bundle is degenerate".into()));
        }
        let zl = zero_divisor(&self.curve, &det, kmax)?;
        let ek = zl.curve;
        let mut degenerate = Vec::new();
        for x in zl.divisor.support() {
            degenerate.push(self.analyse_fibre(&ek, &x)?);
        }
        let support = zl.divisor.support();
        let generic_fibre_rank = match self.curve.points().into_iter().find(|x| !support.contains(x)) {
            Some(x) => Some(linalg::rank(&self.curve.field, &to_matrix(&self.local_form(&self.curve, &x)?[0]))),
            None => None,
        };
        Ok(SingularityReport { curve: ek, extension_degree: zl.extension_degree, degenerate, generic_fibre_rank })
    }
}

/// Solves `u1 = c0 u0 + c2 u2` among the rows of `A(x)`.
fn split_test(f: &Field, a0: &Mat3) -> Option<SplitTest> {
    // columns: unknowns c0, c2; rows: the three y-coefficients
    let m: linalg::Matrix = (0..3).map(|k| vec![a0[0][k], a0[2][k]]).collect();
    let rhs: Vec<Fe> = (0..3).map(|k| a0[1][k]).collect();
    let sol = linalg::solve(f, &m, &rhs)?;
    let (c0, c2) = (sol[0], sol[1]);
    let discriminant = f.sub(f.one(), f.mul(f.from_u64(4), f.mul(c0, c2)));
    Some(SplitTest { c0, c2, discriminant, distinct: !discriminant.is_zero() })
}
