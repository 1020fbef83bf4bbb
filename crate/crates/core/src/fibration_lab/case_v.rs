//! The conic bundle of a case-V surface with `2 tau = 0`, its branch cubic,
//! the critical points of the fibration and the checks built on them.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::conic::{normalize_projective, ConicBundle, SingularityReport};
use super::LabOptions;
use crate::error::{Error, Result};
use crate::field_curve::{linalg, CurvePoint, EllipticCurve, Fe, Field};
use crate::picard::Divisor;
use crate::rr_spaces::{combine, rr_basis, zero_divisor, Func, SectionFn};
use crate::strata_engine::{fibration_invariants, moduli_table};

/// Coefficients giving the conic `y0^2 - y1^2 - f0^2 y2^2`.
pub const NORMALIZED_COEFFICIENTS: [[i64; 3]; 3] = [[1, 1, 0], [0, 0, 1], [1, -1, 0]];

#[derive(Clone, Debug)]
pub struct CaseVInstance {
    /// Curve over the prime field.
    pub base: EllipticCurve,
    /// Working curve: `base`, or its quadratic extension when `-1` is not a
    /// square mod `p`.
    pub curve: EllipticCurve,
    pub tau: CurvePoint,
    /// The section 1 of `O(tau)`.
    pub f0: SectionFn,
    /// `sigma_2(x_i x_j)` row by row; the last column is weighted by `f0`.
    pub coefficients: [[Fe; 3]; 3],
    pub a: Fe,
    pub b: Fe,
    /// `c^2 = a^2 - b^2`.
    pub c: Fe,
    pub sqrt_minus_one: Fe,
    /// Element of `L(3 tau)`.
    pub lambda: SectionFn,
    pub seed: u64,
    pub attempts: u32,
}

fn genericity(predicate: &str) -> Error {
    Error::Genericity { attempts: 0, predicate: predicate.to_string() }
}

/// Working curve for an instance over `e`: `e` itself if `sqrt(-1)` is
/// rational, else the quadratic extension.
fn working_curve(e: &EllipticCurve) -> Result<(EllipticCurve, Fe)> {
    if let Some(i) = e.field.sqrt_minus_one() {
        return Ok((*e, i));
    }
    let e2 = e.base_change(2)?;
    let i = e2.field.sqrt_minus_one().expect("-1 is a square in F_(p^2)");
    Ok((e2, i))
}

pub fn build_case_v(e: &EllipticCurve, tau: &CurvePoint, seed: u64, opts: &LabOptions) -> Result<CaseVInstance> {
    let f = &e.field;
    let coeffs = NORMALIZED_COEFFICIENTS.map(|r| r.map(|v| f.from_i64(v)));
    build_case_v_with(e, tau, coeffs, seed, opts)
}

/// As [`build_case_v`], with an arbitrary invertible coefficient matrix for
/// the conic. The critical-point analysis always uses the normalized conic.
pub fn build_case_v_with(
    e: &EllipticCurve,
    tau: &CurvePoint,
    coefficients: [[Fe; 3]; 3],
    seed: u64,
    opts: &LabOptions,
) -> Result<CaseVInstance> {
    if e.field.degree() != 1 {
        return Err(Error::Domain("case-V instances are built over a prime field".into()));
    }
    if !e.contains(tau) || tau.is_infinity() || !e.mul(tau, 2).is_infinity() {
        return Err(Error::Domain(format!("tau = {} must be a rational point of exact order 2", e.fmt_point(tau))));
    }
    let f = &e.field;
    let m: linalg::Matrix = coefficients.iter().map(|r| r.to_vec()).collect();
    if linalg::det(f, &m).is_zero() {
        return Err(Error::Domain("det(a_ij) = 0: the conic would degenerate everywhere".into()));
    }
    let (work, i) = working_curve(e)?;
    let three_tau = Divisor::point(*tau).plus_point(*tau, 2);
    let basis = rr_basis(e, &three_tau)?;
    let f0 = SectionFn::unit(e, Divisor::point(*tau));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    for attempt in 1..=opts.retries.max(1) {
        let a = f.random_nonzero(&mut rng);
        let b = f.random_nonzero(&mut rng);
        let coeffs: Vec<Fe> = basis.iter().map(|_| f.random(&mut rng)).collect();
        let lambda = combine(e, &three_tau, &basis, &coeffs);
        let wf = &work.field;
        let c2 = f.sub(f.square(a), f.square(b));
        let c = wf.sqrt(c2).unwrap_or(wf.zero());
        let inst = CaseVInstance {
            base: *e,
            curve: work,
            tau: *tau,
            f0: f0.clone(),
            coefficients,
            a,
            b,
            c,
            sqrt_minus_one: i,
            lambda,
            seed,
            attempts: attempt,
        };
        match inst.check_generic(opts.field_ext_max) {
            Ok(()) => return Ok(inst),
            Err(Error::Genericity { predicate, .. }) => last = predicate,
            Err(other) => return Err(other),
        }
    }
    Err(Error::Genericity { attempts: opts.retries.max(1), predicate: last })
}

/// Coordinates of the critical points of one family at a base point, from
/// `f0` evaluated there.
type PointRule = fn(&Field, &CaseVInstance, Fe) -> [Fe; 3];

struct FamilySpec {
    name: &'static str,
    section: &'static str,
    /// `(coefficient of lambda, constant)` of the section `k lambda + m f0^3`.
    coeffs: fn(&Field, &CaseVInstance) -> (Fe, Fe),
    point: PointRule,
}

fn family_specs() -> [FamilySpec; 6] {
    [
        FamilySpec {
            name: "A1",
            section: "lambda + b f0^3",
            coeffs: |_, s| (s.curve.field.one(), s.b),
            point: |f, _, v| [f.zero(), v, f.one()],
        },
        FamilySpec {
            name: "A2",
            section: "lambda - b f0^3",
            coeffs: |f, s| (f.one(), f.neg(s.b)),
            point: |f, _, v| [f.zero(), f.neg(v), f.one()],
        },
        FamilySpec {
            name: "B1",
            section: "lambda - a sqrt(-1) f0^3",
            coeffs: |f, s| (f.one(), f.neg(f.mul(s.a, s.sqrt_minus_one))),
            point: |f, s, v| [f.mul(s.sqrt_minus_one, v), f.zero(), f.one()],
        },
        FamilySpec {
            name: "B2",
            section: "lambda + a sqrt(-1) f0^3",
            coeffs: |f, s| (f.one(), f.mul(s.a, s.sqrt_minus_one)),
            point: |f, s, v| [f.neg(f.mul(s.sqrt_minus_one, v)), f.zero(), f.one()],
        },
        FamilySpec {
            name: "C1",
            section: "c lambda + a b f0^3",
            coeffs: |f, s| (s.c, f.mul(s.a, s.b)),
            point: |f, s, v| [f.neg(f.mul(s.b, v)), f.mul(s.a, v), s.c],
        },
        FamilySpec {
            name: "C2",
            section: "c lambda - a b f0^3",
            coeffs: |f, s| (s.c, f.neg(f.mul(s.a, s.b))),
            point: |f, s, v| [f.mul(s.b, v), f.neg(f.mul(s.a, v)), s.c],
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CritPoint {
    pub family: &'static str,
    pub base: CurvePoint,
    /// Fibre coordinates in the `y0^2 - y1^2 + f0^2 y2^2` model.
    pub coords: [Fe; 3],
}

#[derive(Clone, Debug)]
pub struct CritFamily {
    pub name: &'static str,
    pub section: &'static str,
    pub points: Vec<CritPoint>,
    /// Smallest `k` with all zeros of the section over `F_(p^k)`.
    pub extension_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptyLocus {
    pub locus: &'static str,
    pub fibres_scanned: usize,
    pub solutions: usize,
}

/// Every rational fibre scanned point by point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreScan {
    pub fibres: usize,
    pub solutions: usize,
    /// The solutions are exactly the rational critical points listed.
    pub matches_families: bool,
}

#[derive(Clone, Debug)]
pub struct CritReport {
    /// Curve over which all the points are defined.
    pub curve: EllipticCurve,
    pub node: CritPoint,
    pub families: Vec<CritFamily>,
    pub total: usize,
    pub distinct: bool,
    pub empty_loci: Vec<EmptyLocus>,
    pub scan: FibreScan,
}

impl CritReport {
    pub fn family_sizes(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.families.iter().map(|f| f.points.len())).collect()
    }

    pub fn points(&self) -> Vec<&CritPoint> {
        std::iter::once(&self.node).chain(self.families.iter().flat_map(|f| f.points.iter())).collect()
    }

    pub fn json(&self) -> Value {
        let e = &self.curve;
        let f = &e.field;
        let pt = |p: &CritPoint| {
            json!({
                "base": e.json_point(&p.base),
                "coords": p.coords.iter().map(|x| f.json_elem(*x)).collect::<Vec<_>>(),
            })
        };
        json!({
            "field": f.spec(),
            "node_preimage": pt(&self.node),
            "families": self.families.iter().map(|fam| json!({
                "name": fam.name,
                "section": fam.section,
                "extension_degree": fam.extension_degree,
                "points": fam.points.iter().map(pt).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "family_sizes": self.family_sizes(),
            "total": self.total,
            "distinct": self.distinct,
            "empty_loci": self.empty_loci.iter().map(|l| json!({
                "locus": l.locus,
                "fibres_scanned": l.fibres_scanned,
                "solutions": l.solutions,
            })).collect::<Vec<_>>(),
            "rational_fibre_scan": {
                "fibres": self.scan.fibres,
                "solutions": self.scan.solutions,
                "matches_families": self.scan.matches_families,
            },
        })
    }
}

impl CaseVInstance {
    /// The conic bundle built from `a_ij`.
    pub fn conic_bundle(&self) -> ConicBundle {
        let e = &self.base;
        let f = &e.field;
        let entries = std::array::from_fn(|i| {
            std::array::from_fn(|k| {
                let div = if k == 2 { self.f0.div.clone() } else { Divisor::zero() };
                SectionFn::new(Func::constant(f, self.coefficients[i][k]), div)
            })
        });
        ConicBundle { curve: *e, entries }
    }

    pub fn conic_singularities(&self, kmax: usize) -> Result<SingularityReport> {
        self.conic_bundle().singularities(kmax)
    }

    /// `k lambda + m f0^3` as a section of `O(3 tau)` on the working curve.
    fn family_section(&self, k: Fe, m: Fe) -> SectionFn {
        let f = &self.curve.field;
        let func = self.lambda.func.scale(f, k).add(f, &Func::constant(f, m)).reduced(f);
        SectionFn::new(func, self.lambda.div.clone())
    }

    /// `(f0, lambda)` in the local frames at `x`.
    fn frame_values(&self, ek: &EllipticCurve, x: &CurvePoint) -> (Fe, Fe) {
        (self.f0.value_at(ek, x), self.lambda.value_at(ek, x))
    }

    /// Conic, rank condition on the gradients, and the cubic unless the point
    /// is singular on its conic fibre; `y0^2 - y1^2 + f0^2 y2^2` model.
    fn on_critical_locus(&self, f: &Field, f0: Fe, lam: Fe, y: &[Fe; 3]) -> bool {
        let (a, b) = (self.a, self.b);
        let f02 = f.square(f0);
        let conic = f.add(f.sub(f.square(y[0]), f.square(y[1])), f.mul(f02, f.square(y[2])));
        if !conic.is_zero() {
            return false;
        }
        let row0 = [y[0], f.neg(y[1]), f.mul(f02, y[2])];
        // off the singular locus of the conic the point must lie on the cubic
        if row0.iter().any(|v| !v.is_zero()) {
            let cube = |v: Fe| f.mul(v, f.square(v));
            let cubic = f.add(f.add(f.mul(a, cube(y[0])), f.mul(b, cube(y[1]))), f.mul(lam, cube(y[2])));
            if !cubic.is_zero() {
                return false;
            }
        }
        let row1 = [f.mul(a, f.square(y[0])), f.mul(b, f.square(y[1])), f.mul(lam, f.square(y[2]))];
        (0..3).all(|i| {
            (i + 1..3).all(|j| f.sub(f.mul(row0[i], row1[j]), f.mul(row0[j], row1[i])).is_zero())
        })
    }

    fn check_generic(&self, kmax: usize) -> Result<()> {
        self.crit_points_inner(kmax, false).map(|_| ())
    }

    pub fn crit_points(&self, kmax: usize) -> Result<CritReport> {
        self.crit_points_inner(kmax, true)
    }

    fn crit_points_inner(&self, kmax: usize, scan: bool) -> Result<CritReport> {
        let w = &self.curve;
        let wf = &w.field;
        let bf = &self.base.field;
        if self.a.is_zero() || self.b.is_zero() || self.c.is_zero() {
            return Err(genericity("abc != 0 with c^2 = a^2 - b^2 over the working field"));
        }
        if !wf.square(self.c).eq(&wf.sub(wf.square(self.a), wf.square(self.b))) {
            return Err(genericity("abc != 0 with c^2 = a^2 - b^2 over the working field"));
        }
        if self.lambda.value_at(&self.base, &self.tau).is_zero() {
            return Err(genericity("lambda does not vanish at tau"));
        }
        let specs = family_specs();
        let sections: Vec<SectionFn> = specs
            .iter()
            .map(|s| {
                let (k, m) = (s.coeffs)(wf, self);
                self.family_section(k, m)
            })
            .collect();
        let mut degrees = Vec::new();
        for s in &sections {
            match zero_divisor(w, s, kmax) {
                Ok(z) => degrees.push(z.extension_degree),
                Err(Error::FieldTooSmall(_)) => return Err(genericity("all critical points over F_(p^k), k <= field-ext-max")),
                Err(other) => return Err(other),
            }
        }
        let common = degrees.iter().fold(1usize, |acc, &k| lcm(acc, k));
        let ek = if common == wf.degree() {
            *w
        } else if wf.degree() == 1 && common <= kmax {
            self.base.base_change(common)?
        } else {
            return Err(genericity("all critical points over F_(p^k), k <= field-ext-max"));
        };
        let kf = &ek.field;
        let mut families = Vec::new();
        let mut bases: BTreeSet<CurvePoint> = BTreeSet::new();
        let mut count = 0;
        for ((spec, s), &deg) in specs.iter().zip(&sections).zip(&degrees) {
            let z = zero_divisor(&ek, s, ek.field.degree())?;
            let mut points = Vec::new();
            for (x, &mult) in z.divisor.terms() {
                if mult != 1 {
                    return Err(genericity("each family divisor is reduced"));
                }
                if *x == self.tau {
                    return Err(genericity("family divisors avoid tau"));
                }
                let (f0, lam) = self.frame_values(&ek, x);
                let coords = normalize_projective(kf, (spec.point)(kf, self, f0));
                if !self.on_critical_locus(kf, f0, lam, &coords) {
                    return Err(Error::Verification(format!(
                        "family {} point over {} fails the critical-point system",
                        spec.name,
                        ek.fmt_point(x)
                    )));
                }
                bases.insert(*x);
                count += 1;
                points.push(CritPoint { family: spec.name, base: *x, coords });
            }
            families.push(CritFamily { name: spec.name, section: spec.section, points, extension_degree: deg });
        }
        if bases.len() != count {
            return Err(genericity("family divisors pairwise disjoint"));
        }
        let node = CritPoint { family: "Q", base: self.tau, coords: [kf.zero(), kf.zero(), kf.one()] };
        let (f0t, lamt) = self.frame_values(&ek, &self.tau);
        if !self.on_critical_locus(kf, f0t, lamt, &node.coords) {
            return Err(Error::Verification("the node preimage is not critical".into()));
        }
        let total = count + 1;
        let empty_loci = self.empty_loci(bf);
        let scan = if scan {
            self.rational_scan(&families, &node)
        } else {
            FibreScan { fibres: 0, solutions: 0, matches_families: true }
        };
        Ok(CritReport { curve: ek, node, families, total, distinct: true, empty_loci, scan })
    }

    /// The four coordinate loci that carry no critical point, checked on
    /// every rational fibre.
    fn empty_loci(&self, f: &Field) -> Vec<EmptyLocus> {
        let e = &self.base;
        let pts = e.points();
        let loci: [(&'static str, [Fe; 3], bool); 4] = [
            ("y0=y2=0", [f.zero(), f.one(), f.zero()], false),
            ("y1=y2=0", [f.one(), f.zero(), f.zero()], false),
            ("y2=by1+ay0=0", [self.b, f.neg(self.a), f.zero()], false),
            ("y0=y1=0 off tau", [f.zero(), f.zero(), f.one()], true),
        ];
        loci.iter()
            .map(|(name, y, skip_tau)| {
                let mut scanned = 0;
                let mut solutions = 0;
                for x in &pts {
                    if *skip_tau && *x == self.tau {
                        continue;
                    }
                    scanned += 1;
                    let (f0, lam) = self.frame_values(e, x);
                    if self.on_critical_locus(f, f0, lam, y) {
                        solutions += 1;
                    }
                }
                EmptyLocus { locus: name, fibres_scanned: scanned, solutions }
            })
            .collect()
    }

    /// Solves the critical-point system on every point of every rational
    /// fibre and compares with the rational members of the families.
    fn rational_scan(&self, families: &[CritFamily], node: &CritPoint) -> FibreScan {
        let e = &self.base;
        let f = &e.field;
        let mut found: BTreeSet<(CurvePoint, [u32; 3])> = BTreeSet::new();
        let elems: Vec<Fe> = f.elements().collect();
        let pts = e.points();
        for x in &pts {
            let (f0, lam) = self.frame_values(e, x);
            let mut consider = |y: [Fe; 3]| {
                if self.on_critical_locus(f, f0, lam, &y) {
                    found.insert((*x, y.map(|v| v.0[0])));
                }
            };
            for &y1 in &elems {
                for &y2 in &elems {
                    consider([f.one(), y1, y2]);
                }
            }
            for &y2 in &elems {
                consider([f.zero(), f.one(), y2]);
            }
            consider([f.zero(), f.zero(), f.one()]);
        }
        let expected: BTreeSet<(CurvePoint, [u32; 3])> = std::iter::once(node)
            .chain(families.iter().flat_map(|fam| fam.points.iter()))
            .filter(|p| is_prime_point(&p.base) && p.coords.iter().all(|c| c.is_in_prime_field()))
            .map(|p| (p.base, p.coords.map(|v| v.0[0])))
            .collect();
        FibreScan { fibres: pts.len(), solutions: found.len(), matches_families: found == expected }
    }

    pub fn json(&self) -> Value {
        let e = &self.base;
        let f = &e.field;
        let wf = &self.curve.field;
        json!({
            "curve": e.spec(),
            "tau": e.json_point(&self.tau),
            "seed": self.seed,
            "attempts": self.attempts,
            "working_field": wf.spec(),
            "coefficients": self.coefficients.iter().map(|r| r.iter().map(|x| f.json_elem(*x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "a": f.json_elem(self.a),
            "b": f.json_elem(self.b),
            "c": wf.json_elem(self.c),
            "sqrt_minus_one": wf.json_elem(self.sqrt_minus_one),
            "lambda": self.lambda.json(e),
            "f0": self.f0.json(e),
        })
    }
}

fn is_prime_point(p: &CurvePoint) -> bool {
    match p {
        CurvePoint::Infinity => true,
        CurvePoint::Affine(x, y) => x.is_in_prime_field() && y.is_in_prime_field(),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[derive(Clone, Debug)]
pub struct SingularFibre {
    pub base: CurvePoint,
    pub kind: &'static str,
    pub euler: i64,
    pub contribution: i64,
}

/// The topological Euler number count over the singular fibres.
#[derive(Clone, Debug)]
pub struct ZeuthenSegre {
    pub chi_top_surface: i64,
    pub chi_top_fibre: i64,
    pub chi_top_base: i64,
    pub fibres: Vec<SingularFibre>,
    pub nodal_fibres: usize,
    pub sum: i64,
    pub holds: bool,
    pub assumption: &'static str,
}

impl ZeuthenSegre {
    pub fn json(&self, e: &EllipticCurve) -> Value {
        json!({
            "chi_top_surface": self.chi_top_surface,
            "chi_top_fibre": self.chi_top_fibre,
            "chi_top_base": self.chi_top_base,
            "singular_fibres": self.fibres.len(),
            "nodal_fibres": self.nodal_fibres,
            "breakdown": self.fibres.iter().map(|s| json!({
                "base": e.json_point(&s.base),
                "kind": s.kind,
                "chi_top": s.euler,
                "contribution": s.contribution,
            })).collect::<Vec<_>>(),
            "sum": self.sum,
            "identity": format!("{} = {}*{} + {}", self.chi_top_surface, self.chi_top_base, self.chi_top_fibre, self.sum),
            "holds": self.holds,
            "assumption": self.assumption,
        })
    }
}

pub fn zeuthen_segre_check(report: &CritReport) -> Result<ZeuthenSegre> {
    let (chi, k2) = fibration_invariants(2, 1, 1);
    let chi_top_surface = 12 * chi - k2;
    let genus = 2;
    let chi_top_fibre = 2 - 2 * genus;
    let mut fibres = Vec::new();
    // one singular point per fibre, since the 19 base points are distinct
    let bases: BTreeSet<CurvePoint> = report.points().iter().map(|p| p.base).collect();
    if bases.len() != report.total {
        return Err(Error::Verification(format!(
            "{} critical points over only {} fibres",
            report.total,
            bases.len()
        )));
    }
    for p in report.points() {
        let kind = if p.family == "Q" { "fibre through the node preimage" } else { "irreducible one-nodal" };
        let euler = chi_top_fibre + 1;
        fibres.push(SingularFibre { base: p.base, kind, euler, contribution: euler - chi_top_fibre });
    }
    let sum: i64 = fibres.iter().map(|s| s.contribution).sum();
    let chi_top_base = 0;
    let holds = chi_top_surface == chi_top_base * chi_top_fibre + sum;
    Ok(ZeuthenSegre {
        chi_top_surface,
        chi_top_fibre,
        chi_top_base,
        nodal_fibres: fibres.len() - 1,
        fibres,
        sum,
        holds,
        assumption: "each nodal fibre is taken to be irreducible; not re-verified",
    })
}

/// `H^3 - 4 H^2 Psi` on `P(V2)` for the class of the six curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutRecord {
    pub h_cubed: i64,
    pub h_squared_psi: i64,
    pub value: i64,
    /// Critical points on each of the six curves.
    pub points_per_curve: Vec<(&'static str, usize)>,
}

#[derive(Clone, Debug)]
pub struct BicanonicalKernel {
    pub coefficient_dimension: usize,
    pub points: usize,
    pub rank: usize,
    pub kernel: usize,
    pub witness: Option<Vec<Fe>>,
    pub bezout: BezoutRecord,
    /// `h^1(T_S)` when the kernel vanishes.
    pub h1_tangent: Option<i64>,
    pub stratum_dimension: Option<i64>,
}

impl BicanonicalKernel {
    pub fn json(&self, f: &Field) -> Value {
        json!({
            "coefficient_dimension": self.coefficient_dimension,
            "points": self.points,
            "rank": self.rank,
            "kernel": self.kernel,
            "witness": self.witness.as_ref().map(|w| w.iter().map(|x| f.json_elem(*x)).collect::<Vec<_>>()),
            "bezout": {
                "h_cubed": self.bezout.h_cubed,
                "h_squared_psi": self.bezout.h_squared_psi,
                "value": self.bezout.value,
                "points_per_curve": self.bezout.points_per_curve.iter().map(|(n, c)| json!({"curve": n, "points": c})).collect::<Vec<_>>(),
            },
            "h1_tangent": self.h1_tangent,
            "stratum_dimension": self.stratum_dimension,
        })
    }
}

/// Linear forms `alpha y0 + beta y1 + gamma y2` through all critical points.
type OnCurve<'a> = Box<dyn Fn(Fe, &[Fe; 3]) -> bool + 'a>;

pub fn bicanonical_kernel(inst: &CaseVInstance, report: &CritReport) -> Result<BicanonicalKernel> {
    let e = &inst.base;
    let ek = &report.curve;
    let kf = &ek.field;
    let two_o = Divisor::point(CurvePoint::Infinity).plus_point(CurvePoint::Infinity, 1);
    let twists = [two_o.clone(), two_o.clone(), two_o.add(&Divisor::point(inst.tau))];
    let bases: Vec<Vec<SectionFn>> = twists.iter().map(|d| rr_basis(e, d)).collect::<Result<_>>()?;
    let coefficient_dimension: usize = bases.iter().map(|b| b.len()).sum();
    let pts = report.points();
    let rows: linalg::Matrix = pts
        .iter()
        .map(|p| {
            bases
                .iter()
                .enumerate()
                .flat_map(|(k, basis)| basis.iter().map(move |s| (k, s)))
                .map(|(k, s)| kf.mul(s.value_at(ek, &p.base), p.coords[k]))
                .collect()
        })
        .collect();
    let rank = linalg::rank(kf, &rows);
    let kernel = coefficient_dimension - rank;
    let witness = if kernel > 0 { linalg::nullspace(kf, &rows, coefficient_dimension).into_iter().next() } else { None };

    let h_cubed: i64 = twists.iter().map(|d| d.degree()).sum();
    let h_squared_psi = 1;
    let value = h_cubed - 4 * h_squared_psi;
    let (a, b, c, i) = (inst.a, inst.b, inst.c, inst.sqrt_minus_one);
    let curves: [(&'static str, OnCurve<'_>); 6] = [
        ("A1", Box::new(|f0, y| y[0].is_zero() && kf.sub(y[1], kf.mul(f0, y[2])).is_zero())),
        ("A2", Box::new(|f0, y| y[0].is_zero() && kf.add(y[1], kf.mul(f0, y[2])).is_zero())),
        ("B1", Box::new(move |f0, y| y[1].is_zero() && kf.sub(y[0], kf.mul(i, kf.mul(f0, y[2]))).is_zero())),
        ("B2", Box::new(move |f0, y| y[1].is_zero() && kf.add(y[0], kf.mul(i, kf.mul(f0, y[2]))).is_zero())),
        (
            "C1",
            Box::new(move |f0, y| {
                kf.add(kf.mul(b, y[1]), kf.mul(a, y[0])).is_zero()
                    && kf.add(kf.mul(c, y[0]), kf.mul(b, kf.mul(f0, y[2]))).is_zero()
            }),
        ),
        (
            "C2",
            Box::new(move |f0, y| {
                kf.add(kf.mul(b, y[1]), kf.mul(a, y[0])).is_zero()
                    && kf.sub(kf.mul(c, y[0]), kf.mul(b, kf.mul(f0, y[2]))).is_zero()
            }),
        ),
    ];
    let points_per_curve = curves
        .iter()
        .map(|(name, on)| {
            let n = pts.iter().filter(|p| on(inst.f0.value_at(ek, &p.base), &p.coords)).count();
            (*name, n)
        })
        .collect();
    let table = moduli_table()?;
    let v2 = table.row("V,2").map(|r| r.dimension.value);
    // h^2(T_S) = h^0(Omega^1 (x) omega_S) = p_g once the kernel vanishes
    let (chi, k2) = fibration_invariants(2, 1, 1);
    let p_g = 2;
    Ok(BicanonicalKernel {
        coefficient_dimension,
        points: pts.len(),
        rank,
        kernel,
        witness,
        bezout: BezoutRecord { h_cubed, h_squared_psi, value, points_per_curve },
        h1_tangent: if kernel == 0 { Some(10 * chi - 2 * k2 + p_g) } else { None },
        stratum_dimension: v2,
    })
}
