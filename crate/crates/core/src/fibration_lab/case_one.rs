//! A conic bundle on the source of a 3-isogeny that is invariant under
//! translation by the kernel, built from three sections and their
//! translates.
//!
//! Translation pullback is `(t_a^* s)(x) = s(x - a)`, which moves the divisor
//! of `s` by `+a`. The `y` coordinates are twisted by `C_k = 7 (k a)` and the
//! `u` coordinates by the invariant divisors `R_0 = 2 O(p)`,
//! `R_1 = O(p) + O(-p)`, `R_2 = 2 O(-p)`, where `O(q)` is the kernel orbit of
//! `q`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::conic::{ConicBundle, SingularityKind, SingularityReport};
use super::LabOptions;
use crate::error::{Error, Result};
use crate::field_curve::{velu_3_isogeny, CurvePoint, EllipticCurve, Fe, Field, Isogeny3};
use crate::picard::Divisor;
use crate::rr_spaces::{rr_basis, SectionFn};

#[derive(Clone, Debug)]
pub struct CaseOneInstance {
    pub curve: EllipticCurve,
    pub isogeny: Isogeny3,
    /// A point `p` of the source with `3 p` the point defining `V1` below.
    pub p_tilde: CurvePoint,
    pub bundle: ConicBundle,
    pub seed: u64,
    pub attempts: u32,
}

/// Identities checked at every rational point where all sections are finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceCheck {
    pub points_checked: usize,
    /// `A[i][k](x) = A[i][0](x - k a)`.
    pub translates: bool,
    /// `P^T q(x - a) P = q(x)` for the cyclic shift `P`.
    pub invariant: bool,
    /// Diagonal and off-diagonal coefficients agree with the `lambda`/`mu`
    /// formulas and their translates.
    pub lambda_mu: bool,
}

#[derive(Clone, Debug)]
pub struct CaseOneReport {
    pub instance: CaseOneInstance,
    pub invariance: InvarianceCheck,
    pub singularities: SingularityReport,
    pub nodes: usize,
    pub nodes_over_kernel: bool,
    pub quotient_nodes: usize,
    /// Images of the node base points on the target curve.
    pub images: Vec<CurvePoint>,
}

impl CaseOneReport {
    pub fn passes(&self) -> bool {
        self.invariance.translates
            && self.invariance.invariant
            && self.invariance.lambda_mu
            && self.nodes == 3
            && self.nodes_over_kernel
            && self.singularities.only_nodes()
            && self.quotient_nodes == 1
    }

    pub fn json(&self) -> Value {
        let inst = &self.instance;
        let e = &inst.curve;
        let b = &inst.isogeny.codomain;
        json!({
            "curve": e.spec(),
            "target": b.spec(),
            "kernel": inst.isogeny.kernel.iter().map(|k| e.json_point(k)).collect::<Vec<_>>(),
            "p_tilde": e.json_point(&inst.p_tilde),
            "seed": inst.seed,
            "attempts": inst.attempts,
            "invariance": {
                "points_checked": self.invariance.points_checked,
                "translates": self.invariance.translates,
                "invariant": self.invariance.invariant,
                "lambda_mu": self.invariance.lambda_mu,
            },
            "singularities": self.singularities.json(),
            "nodes": self.nodes,
            "nodes_over_kernel": self.nodes_over_kernel,
            "quotient_nodes": self.quotient_nodes,
            "images": self.images.iter().map(|q| b.json_point(q)).collect::<Vec<_>>(),
            "passes": self.passes(),
        })
    }
}

fn orbit(e: &EllipticCurve, kernel: &[CurvePoint; 3], q: &CurvePoint) -> Divisor {
    kernel.iter().fold(Divisor::zero(), |d, k| d.plus_point(e.add(q, k), 1))
}

/// Section of `L(target)` equal to `x -> s(x - shift)`, fixed by one value
/// and checked at every other rational point.
fn translate(e: &EllipticCurve, s: &SectionFn, shift: &CurvePoint, target: &Divisor) -> Result<SectionFn> {
    let f = &e.field;
    let basis = rr_basis(e, target)?;
    if basis.len() != 1 {
        return Err(Error::Verification(format!("expected a one-dimensional space, got {}", basis.len())));
    }
    let g = &basis[0];
    for x in e.points() {
        let (Some(gv), Some(sv)) = (g.eval(e, &x), s.eval(e, &e.sub(&x, shift))) else { continue };
        if gv.is_zero() || sv.is_zero() {
            continue;
        }
        let k = f.div(sv, gv).expect("nonzero");
        return Ok(g.scale(e, k));
    }
    Err(Error::FieldTooSmall("no rational point to normalize a translate".into()))
}

fn sym_coeffs(f: &Field, a: &[[Fe; 3]; 3]) -> [[Fe; 3]; 3] {
    // q = A^T M A for u0 u2 - u1^2, as a symmetric matrix
    let half = f.inv(f.from_u64(2)).expect("odd characteristic");
    let mut q = [[f.zero(); 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            let t = f.sub(
                f.mul(half, f.add(f.mul(a[0][j], a[2][k]), f.mul(a[2][j], a[0][k]))),
                f.mul(a[1][j], a[1][k]),
            );
            q[j][k] = t;
        }
    }
    q
}

fn eval_entries(e: &EllipticCurve, bundle: &ConicBundle, x: &CurvePoint) -> Option<[[Fe; 3]; 3]> {
    let mut out = [[e.field.zero(); 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            out[i][k] = bundle.entries[i][k].eval(e, x)?;
        }
    }
    Some(out)
}

fn check_invariance(inst: &CaseOneInstance) -> InvarianceCheck {
    let e = &inst.curve;
    let f = &e.field;
    let ker = &inst.isogeny.kernel;
    let (ta, tb) = (ker[1], ker[2]);
    let mut out = InvarianceCheck { points_checked: 0, translates: true, invariant: true, lambda_mu: true };
    let col0 = |x: &CurvePoint, i: usize| inst.bundle.entries[i][0].eval(e, x);
    for x in &e.points() {
        let shifted = [*x, e.sub(x, &ta), e.sub(x, &tb)];
        let all: Option<Vec<[[Fe; 3]; 3]>> = shifted.iter().map(|s| eval_entries(e, &inst.bundle, s)).collect();
        let Some(vals) = all else { continue };
        out.points_checked += 1;
        let a = &vals[0];
        // translates of the first column
        for i in 0..3 {
            for k in 1..3 {
                if col0(&e.sub(x, &ker[k]), i) != Some(a[i][k]) {
                    out.translates = false;
                }
            }
        }
        let q: Vec<[[Fe; 3]; 3]> = vals.iter().map(|m| sym_coeffs(f, m)).collect();
        // coefficient (j, k) at x - a is coefficient (j + 1, k + 1) at x
        let perm = [1, 2, 0];
        for j in 0..3 {
            for k in 0..3 {
                if q[1][j][k] != q[0][perm[j]][perm[k]] {
                    out.invariant = false;
                }
            }
        }
        // lambda = a00 a20 - a10^2, mu = a00 t*a20 + t*a00 a20 - 2 a10 t*a10,
        // with t* evaluated as the column-zero sections at x - a
        let at = |i: usize, pt: &CurvePoint| col0(pt, i).expect("finite at checked points");
        let lam = |pt: &CurvePoint| f.sub(f.mul(at(0, pt), at(2, pt)), f.square(at(1, pt)));
        let mu = |pt: &CurvePoint| {
            let s = e.sub(pt, &ta);
            f.sub(
                f.add(f.mul(at(0, pt), at(2, &s)), f.mul(at(0, &s), at(2, pt))),
                f.scale(f.mul(at(1, pt), at(1, &s)), 2),
            )
        };
        let two = f.from_u64(2);
        let defined = [*x, e.sub(x, &ta), e.sub(x, &tb), e.sub(&e.sub(x, &ta), &ta), e.sub(&e.sub(x, &tb), &ta)]
            .iter()
            .all(|pt| (0..3).all(|i| col0(pt, i).is_some()));
        if defined {
            let expected = [
                (0, 0, lam(x)),
                (1, 1, lam(&e.sub(x, &ta))),
                (2, 2, lam(&e.sub(x, &tb))),
                (0, 1, mu(x)),
                (0, 2, mu(&e.sub(x, &tb))),
                (1, 2, mu(&e.sub(x, &ta))),
            ];
            for (j, k, v) in expected {
                let coeff = if j == k { q[0][j][k] } else { f.mul(two, q[0][j][k]) };
                if coeff != v {
                    out.lambda_mu = false;
                }
            }
        }
    }
    out
}

fn genericity(predicate: &str) -> Error {
    Error::Genericity { attempts: 0, predicate: predicate.to_string() }
}

fn build_bundle(e: &EllipticCurve, ker: &[CurvePoint; 3], p: &CurvePoint, scalars: [Fe; 3]) -> Result<ConicBundle> {
    let mp = e.neg(p);
    let (op, om) = (orbit(e, ker, p), orbit(e, ker, &mp));
    let rows = [op.scale(2), op.add(&om), om.scale(2)];
    let cols: [Divisor; 3] = std::array::from_fn(|k| Divisor::point(ker[k]).scale(7));
    let mut entries: Vec<Vec<SectionFn>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let d0 = cols[0].sub(row);
        let basis = rr_basis(e, &d0)?;
        if basis.len() != 1 {
            return Err(Error::Verification(format!("L({}) should be one-dimensional", d0.fmt(e))));
        }
        let s0 = basis[0].scale(e, scalars[i]);
        let mut r = vec![s0.clone()];
        for k in 1..3 {
            r.push(translate(e, &s0, &ker[k], &cols[k].sub(row))?);
        }
        entries.push(r);
    }
    let entries = std::array::from_fn(|i| std::array::from_fn(|k| entries[i][k].clone()));
    Ok(ConicBundle { curve: *e, entries })
}

fn kernel_orbits(e: &EllipticCurve, ker: &[CurvePoint; 3], pts: &[CurvePoint]) -> usize {
    let mut seen: BTreeSet<CurvePoint> = BTreeSet::new();
    let mut orbits = 0;
    for x in pts {
        if seen.contains(x) {
            continue;
        }
        orbits += 1;
        for k in ker {
            seen.insert(e.add(x, k));
        }
    }
    orbits
}

/// Builds the invariant conic for the kernel generated by `t` and certifies
/// invariance and the node count.
pub fn case_one_invariant_conic(
    e: &EllipticCurve,
    t: &CurvePoint,
    seed: u64,
    opts: &LabOptions,
) -> Result<CaseOneReport> {
    let isogeny = velu_3_isogeny(e, t)?;
    let ker = isogeny.kernel;
    let f = &e.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // case I on the target needs 4 (phi(p) - o) nontrivial, i.e. 4p outside the kernel
    let mut cands: Vec<CurvePoint> = e.points().into_iter().filter(|p| !ker.contains(&e.mul(p, 4))).collect();
    cands.shuffle(&mut rng);
    if cands.is_empty() {
        return Err(Error::FieldTooSmall(format!(
            "every rational point p of {} has 4p in the kernel; case I is not realizable over this field",
            e.spec()
        )));
    }
    let mut last = String::new();
    for attempt in 1..=opts.retries.max(1) {
        let p = cands[(attempt as usize - 1) % cands.len()];
        let scalars = [f.random_nonzero(&mut rng), f.random_nonzero(&mut rng), f.random_nonzero(&mut rng)];
        let bundle = build_bundle(e, &ker, &p, scalars)?;
        let instance = CaseOneInstance { curve: *e, isogeny: isogeny.clone(), p_tilde: p, bundle, seed, attempts: attempt };
        match certify(instance, opts) {
            Ok(r) => return Ok(r),
            Err(Error::Genericity { predicate, .. }) => last = predicate,
            Err(other) => return Err(other),
        }
    }
    Err(Error::Genericity { attempts: opts.retries.max(1), predicate: last })
}

fn certify(instance: CaseOneInstance, opts: &LabOptions) -> Result<CaseOneReport> {
    let e = instance.curve;
    let ker = instance.isogeny.kernel;
    if instance.bundle.determinant().is_zero() {
        return Err(genericity("the conic bundle has a smooth fibre"));
    }
    let sing = instance.bundle.singularities(opts.field_ext_max)?;
    let bases: BTreeSet<CurvePoint> = sing.degenerate.iter().map(|d| d.base).collect();
    let kernel_set: BTreeSet<CurvePoint> = ker.iter().copied().collect();
    if bases != kernel_set {
        return Err(genericity("degenerate fibres lie exactly over the kernel"));
    }
    if sing.degenerate.iter().any(|d| d.kind == Some(SingularityKind::NonReducedFibre)) {
        return Err(genericity("no degenerate fibre is a double line"));
    }
    if sing.degenerate.iter().any(|d| d.split_test.is_some_and(|s| !s.distinct)) {
        return Err(genericity("(u0 u2 - (c0 u0 + c2 u2)^2) splits into distinct lines"));
    }
    let invariance = check_invariance(&instance);
    let node_bases: Vec<CurvePoint> = sing
        .singular_points()
        .filter(|d| d.kind == Some(SingularityKind::A1))
        .map(|d| d.base)
        .collect();
    let nodes = node_bases.len();
    let nodes_over_kernel = node_bases.iter().copied().collect::<BTreeSet<_>>() == kernel_set;
    // Translation permutes the nodes, so the quotient has one node per orbit.
    let quotient_nodes = kernel_orbits(&e, &ker, &node_bases);
    let images = node_bases.iter().map(|x| instance.isogeny.map(x)).collect();
    Ok(CaseOneReport { instance, invariance, singularities: sing, nodes, nodes_over_kernel, quotient_nodes, images })
}

/// First rational point of exact order 3, if any.
pub fn order_three_point(e: &EllipticCurve) -> Option<CurvePoint> {
    e.points().into_iter().find(|p| !p.is_infinity() && e.mul(p, 3).is_infinity())
}
