//! Decomposition type of `V2(-2o)` from the splitting type of `V1` and the
//! extension class, with an independent check through multiplication maps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bundle_calc::{Atom, BundleExpr};
use crate::error::{Error, Result};
use crate::field_curve::{CurvePoint, EllipticCurve, Fe};
use crate::picard::{h0_h1, Divisor, LineClass, PicGroup};
use crate::rr_spaces::{self, alpha_star_kernel, combine, rr_basis, SectionFn};

/// Splitting type of the rank-2 bundle `V1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum V1Type {
    /// `O(p) ⊕ O(2o - p)`.
    Split(CurvePoint),
    /// `F_2(eta)` with `eta` 2-torsion.
    Indec(CurvePoint),
}

/// Which of `f1, f2, f3` vanish at `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub zero: [bool; 3],
}

impl Pattern {
    pub const fn new(f1: bool, f2: bool, f3: bool) -> Pattern {
        Pattern { zero: [f1, f2, f3] }
    }

    pub fn m(&self) -> usize {
        self.zero.iter().filter(|&&z| z).count()
    }

    pub fn all() -> Vec<Pattern> {
        (0..8u8).map(|b| Pattern::new(b & 1 != 0, b & 2 != 0, b & 4 != 0)).collect()
    }

    pub fn code(&self) -> String {
        self.zero.iter().map(|&z| if z { '0' } else { '*' }).collect()
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Inverse of [`Pattern::code`]: three characters, `0` for a vanishing
    /// section and `*` otherwise.
    fn from_str(s: &str) -> Result<Pattern> {
        let cs: Vec<char> = s.trim().chars().collect();
        if cs.len() != 3 || cs.iter().any(|c| *c != '0' && *c != '*') {
            return Err(Error::Parse(format!("pattern '{s}' must be three of '0' or '*'")));
        }
        Ok(Pattern::new(cs[0] == '0', cs[1] == '0', cs[2] == '0'))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionClass {
    Split { pattern: Pattern, sections: Option<Box<[SectionFn; 4]>> },
    /// Cokernel datum `q` of `v` and whether the image of `v` lies in the
    /// copy of `F_2` inside `F_3`.
    Indec { q: CurvePoint, im_v_in_w: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StratumLabel {
    I,
    IIa,
    IIb,
    IIc,
    IIIa,
    IIIb,
    IIIc,
    IVa,
    IVb,
    IVc,
    V,
    VI,
    VIIa,
    VIIb,
}

impl StratumLabel {
    pub const ALL: [StratumLabel; 14] = [
        StratumLabel::I,
        StratumLabel::IIa,
        StratumLabel::IIb,
        StratumLabel::IIc,
        StratumLabel::IIIa,
        StratumLabel::IIIb,
        StratumLabel::IIIc,
        StratumLabel::IVa,
        StratumLabel::IVb,
        StratumLabel::IVc,
        StratumLabel::V,
        StratumLabel::VI,
        StratumLabel::VIIa,
        StratumLabel::VIIb,
    ];

    /// The eleven labels with split `V1`.
    pub const SPLIT: [StratumLabel; 11] = [
        StratumLabel::I,
        StratumLabel::IIa,
        StratumLabel::IIb,
        StratumLabel::IIc,
        StratumLabel::IIIa,
        StratumLabel::IIIb,
        StratumLabel::IIIc,
        StratumLabel::IVa,
        StratumLabel::IVb,
        StratumLabel::IVc,
        StratumLabel::V,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StratumLabel::I => "I",
            StratumLabel::IIa => "IIa",
            StratumLabel::IIb => "IIb",
            StratumLabel::IIc => "IIc",
            StratumLabel::IIIa => "IIIa",
            StratumLabel::IIIb => "IIIb",
            StratumLabel::IIIc => "IIIc",
            StratumLabel::IVa => "IVa",
            StratumLabel::IVb => "IVb",
            StratumLabel::IVc => "IVc",
            StratumLabel::V => "V",
            StratumLabel::VI => "VI",
            StratumLabel::VIIa => "VIIa",
            StratumLabel::VIIb => "VIIb",
        }
    }

    /// Torsion type and vanishing pattern of a representative extension.
    pub fn split_representative(&self) -> Option<(TorsionType, Pattern)> {
        use StratumLabel::*;
        let (t, pat) = match self {
            I => (TorsionType::Generic, Pattern::new(false, false, false)),
            IIa | IIb => (TorsionType::Four, Pattern::new(false, false, false)),
            IIc => (TorsionType::Four, Pattern::new(false, true, false)),
            IIIa => (TorsionType::Generic, Pattern::new(true, false, false)),
            IIIb => (TorsionType::Generic, Pattern::new(false, false, true)),
            IIIc => (TorsionType::Generic, Pattern::new(false, true, false)),
            IVa => (TorsionType::Generic, Pattern::new(true, true, false)),
            IVb => (TorsionType::Generic, Pattern::new(false, true, true)),
            IVc => (TorsionType::Generic, Pattern::new(true, false, true)),
            V => (TorsionType::Two, Pattern::new(false, false, false)),
            VI | VIIa | VIIb => return None,
        };
        Some((t, pat))
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StratumLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<StratumLabel> {
        StratumLabel::ALL
            .iter()
            .copied()
            .find(|l| l.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown stratum label '{s}'")))
    }
}

/// Torsion behaviour of `u = p - o` in the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TorsionType {
    /// `4u != 0`.
    Generic,
    /// `4u = 0`, `2u != 0`.
    Four,
    /// `2u = 0`.
    Two,
}

impl TorsionType {
    pub fn of(e: &EllipticCurve, p: &CurvePoint) -> TorsionType {
        if e.mul(p, 2).is_infinity() {
            TorsionType::Two
        } else if e.mul(p, 4).is_infinity() {
            TorsionType::Four
        } else {
            TorsionType::Generic
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TorsionType::Generic => "4u!=0",
            TorsionType::Four => "4u=0,2u!=0",
            TorsionType::Two => "2u=0",
        }
    }
}

/// Labels and bundles for `V2(-2o)`; more than one entry when the
/// decomposition type is not determined by the input data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub candidates: Vec<(StratumLabel, BundleExpr)>,
    pub certificate: Vec<String>,
}

impl Classification {
    pub fn labels(&self) -> Vec<StratumLabel> {
        self.candidates.iter().map(|(l, _)| *l).collect()
    }

    pub fn json(&self, e: &EllipticCurve) -> Value {
        json!({
            "labels": self.candidates.iter().map(|(l, _)| l.name()).collect::<Vec<_>>(),
            "bundles": self.candidates.iter().map(|(_, b)| b.canonical(e)).collect::<Vec<_>>(),
            "certificate": self.certificate,
        })
    }
}

/// The three classes `O(2o - 2p)`, `O`, `O(2p - 2o)` at which `h^1` can jump.
pub fn special_classes(e: &EllipticCurve, p: &CurvePoint) -> [LineClass; 3] {
    let two_u = e.mul(p, 2);
    [
        LineClass { deg: 0, point: e.neg(&two_u) },
        LineClass::trivial(),
        LineClass { deg: 0, point: two_u },
    ]
}

/// `V2(-2o)` of a stratum from `2p - 2o` and `tau - o`, written as group
/// elements. `two_u` is ignored when `V1` is indecomposable.
pub fn v2_bundle<G: PicGroup>(g: &G, label: StratumLabel, two_u: &G::Elem, tau: &G::Elem) -> BundleExpr<G::Elem> {
    use StratumLabel::*;
    let plus = LineClass { deg: 0, point: *two_u };
    let minus = plus.dual(g);
    let triv = LineClass::identity_class();
    let t = LineClass { deg: 1, point: *tau };
    let e2 = |det| BundleExpr::from_atoms([Atom::E { rank: 2, twist_deg: 0, det }]);
    match label {
        I | VI => BundleExpr::e_at(3, *tau),
        IIa => BundleExpr::f(2, minus).direct_sum(&BundleExpr::line(t)),
        IIb | IIIc | VIIb => e2(t).direct_sum(&BundleExpr::line(triv)),
        IIc | IVb => BundleExpr::lines([minus, triv, t.tensor(g, &plus)]),
        IIIa => e2(t.tensor(g, &minus)).direct_sum(&BundleExpr::line(plus)),
        IIIb => e2(t.tensor(g, &plus)).direct_sum(&BundleExpr::line(minus)),
        IVa => BundleExpr::lines([plus, triv, t.tensor(g, &minus)]),
        IVc => BundleExpr::lines([plus, minus, t]),
        V => BundleExpr::lines([triv, triv, t]),
        VIIa => BundleExpr::f(2, triv).direct_sum(&BundleExpr::line(t)),
    }
}

pub fn classify_v2(e: &EllipticCurve, v1: &V1Type, tau: &CurvePoint, xi: &ExtensionClass) -> Result<Classification> {
    use StratumLabel::*;
    match (v1, xi) {
        (V1Type::Split(p), ExtensionClass::Split { pattern, .. }) => {
            if pattern.m() == 3 {
                return Err(Error::InvalidExtension("all of f1, f2, f3 vanish at tau: V2 is not locally free".into()));
            }
            let two_u = e.mul(p, 2);
            let torsion = TorsionType::of(e, p);
            let mut cert = vec![format!("torsion: {}", torsion.name()), format!("pattern: {} (m = {})", pattern.code(), pattern.m())];
            let labels = match torsion {
                TorsionType::Two => {
                    cert.push("O(2o-2p) trivial".into());
                    vec![V]
                }
                _ => {
                    let four = torsion == TorsionType::Four;
                    cert.push(if four { "O(4o-4p) trivial, O(2o-2p) not".into() } else { "O(4o-4p) not trivial".into() });
                    match pattern.zero {
                        [false, false, false] if four => vec![IIa, IIb],
                        [false, false, false] => vec![I],
                        [false, true, false] if four => vec![IIc],
                        [true, false, false] => vec![IIIa],
                        [false, false, true] => vec![IIIb],
                        [false, true, false] => vec![IIIc],
                        [true, true, false] => vec![IVa],
                        [false, true, true] => vec![IVb],
                        [true, false, true] => vec![IVc],
                        [true, true, true] => unreachable!(),
                    }
                }
            };
            let candidates = labels.into_iter().map(|l| (l, v2_bundle(e, l, &two_u, tau))).collect();
            for (i, z) in pattern.zero.iter().enumerate() {
                if *z {
                    cert.push(format!("f{} vanishes at tau: P{}(-2o) is a direct summand", i + 1, i + 1));
                }
            }
            Ok(Classification { candidates, certificate: cert })
        }
        (V1Type::Indec(_), ExtensionClass::Indec { q, im_v_in_w }) => {
            let special = *im_v_in_w || q.is_infinity() || q == tau;
            let labels = if special { vec![VIIa, VIIb] } else { vec![VI] };
            let candidates = labels.into_iter().map(|l| (l, v2_bundle(e, l, &CurvePoint::Infinity, tau))).collect();
            let cert = vec![if special {
                "alpha* has a 1-dimensional kernel at L = O".to_string()
            } else {
                "s_o and s_q independent: h1(V2(-2o) ⊗ L) = 0 for all L".to_string()
            }];
            Ok(Classification { candidates, certificate: cert })
        }
        _ => Err(Error::Domain("V1 type and extension class do not match".into())),
    }
}

/// `h^1` at the three special classes predicted by the case tables for a
/// split `V1` with `2u != 0`.
pub fn table_h1(torsion: TorsionType, pattern: Pattern, which: usize) -> Option<i64> {
    let [z1, z2, z3] = pattern.zero;
    let four = match torsion {
        TorsionType::Two => return None,
        TorsionType::Four => true,
        TorsionType::Generic => false,
    };
    Some(match which {
        0 | 2 => {
            let own = if which == 0 { z1 } else { z3 };
            match (four, own, z1 && z3) {
                (false, false, _) => 0,
                (false, true, _) => 1,
                (true, _, false) => 1,
                (true, _, true) => 2,
            }
        }
        1 => i64::from(z2),
        _ => return None,
    })
}

/// One row of the case tables: the class index, torsion type, a pattern
/// realizing it and the tabulated value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub class_index: usize,
    pub torsion: TorsionType,
    pub pattern: Pattern,
    pub h1: i64,
}

/// The ten distinct rows.
pub fn table_rows() -> Vec<TableRow> {
    let row = |class_index, torsion, pattern: Pattern| TableRow {
        class_index,
        torsion,
        pattern,
        h1: table_h1(torsion, pattern, class_index).unwrap(),
    };
    use TorsionType::*;
    let n = |a, b, c| Pattern::new(a, b, c);
    vec![
        row(0, Generic, n(false, false, false)),
        row(0, Generic, n(true, false, false)),
        row(0, Four, n(true, false, false)),
        row(0, Four, n(true, false, true)),
        row(2, Generic, n(false, false, false)),
        row(2, Generic, n(false, false, true)),
        row(2, Four, n(false, false, true)),
        row(2, Four, n(true, false, true)),
        row(1, Generic, n(false, false, false)),
        row(1, Generic, n(false, true, false)),
    ]
}

/// Candidate bundles for a rank-3 bundle from its nonzero `h^1(V ⊗ L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recognition {
    Unique(BundleExpr),
    Candidates(Vec<BundleExpr>),
}

impl Recognition {
    pub fn contains(&self, b: &BundleExpr) -> bool {
        match self {
            Recognition::Unique(u) => u == b,
            Recognition::Candidates(cs) => cs.contains(b),
        }
    }

    pub fn bundles(&self) -> Vec<BundleExpr> {
        match self {
            Recognition::Unique(u) => vec![u.clone()],
            Recognition::Candidates(cs) => cs.clone(),
        }
    }
}

pub fn recognize_rank3(e: &EllipticCurve, profile: &BTreeMap<LineClass, i64>, det: &LineClass) -> Result<Recognition> {
    let peaks: Vec<(LineClass, i64)> = profile.iter().filter(|(_, &v)| v != 0).map(|(l, v)| (*l, *v)).collect();
    if peaks.iter().any(|(l, v)| l.deg != 0 || *v < 0) {
        return Err(Error::Classification("profile must be supported on degree-0 classes with non-negative values".into()));
    }
    let e2 = |d: LineClass| BundleExpr::from_atoms([Atom::E { rank: 2, twist_deg: 0, det: d }]);
    match peaks.as_slice() {
        [] => Ok(Recognition::Unique(BundleExpr::from_atoms([Atom::E {
            rank: 3,
            twist_deg: 0,
            det: *det,
        }]))),
        [(m, 1)] => {
            let inv = m.dual(e);
            let delta = det.tensor(e, &m.pow(e, 3));
            Ok(Recognition::Candidates(vec![
                e2(delta).tensor_line(e, &inv).direct_sum(&BundleExpr::line(inv)),
                BundleExpr::f(2, inv).direct_sum(&BundleExpr::line(delta.tensor(e, &inv))),
            ]))
        }
        [(m, 2)] => {
            let inv = m.dual(e);
            let delta = det.tensor(e, &m.pow(e, 3));
            Ok(Recognition::Unique(BundleExpr::lines([inv, inv, delta.tensor(e, &inv)])))
        }
        [(m1, 1), (m2, 1)] => Ok(Recognition::Unique(BundleExpr::lines([
            m1.dual(e),
            m2.dual(e),
            det.tensor(e, m1).tensor(e, m2),
        ]))),
        _ => Err(Error::Classification(format!("no rank-3 bundle of degree 1 has h1 profile {:?}", peaks))),
    }
}

/// `h^1(V ⊗ L)` of a symbolic bundle at every rational degree-0 class.
pub fn symbolic_profile(e: &EllipticCurve, v: &BundleExpr) -> Result<BTreeMap<LineClass, i64>> {
    let mut out = BTreeMap::new();
    for pt in e.points() {
        let l = LineClass { deg: 0, point: pt };
        let h1 = v.cohomology(e, &l)?.1;
        if h1 != 0 {
            out.insert(l, h1);
        }
    }
    Ok(out)
}

/// `h^1(V2(-2o) ⊗ L)` from the multiplication map, at every rational
/// degree-0 class.
pub fn oracle_profile(e: &EllipticCurve, sections: &[SectionFn; 4]) -> Result<BTreeMap<LineClass, i64>> {
    let mut out = BTreeMap::new();
    for pt in e.points() {
        let l = LineClass { deg: 0, point: pt };
        let k = alpha_star_kernel(e, sections, &l)? as i64;
        if k != 0 {
            out.insert(l, k);
        }
    }
    Ok(out)
}

/// `dim ker (f0, s_q) : H0(O(o)) ⊕ <s_q> -> H0(O(o + tau))`; the image line
/// is zero when `im v` lies in the `F_2` subbundle.
pub fn indec_oracle_h1(e: &EllipticCurve, tau: &CurvePoint, q: &CurvePoint, im_v_in_w: bool) -> Result<i64> {
    let o = CurvePoint::Infinity;
    let target = Divisor::from_terms([(o, 1), (*tau, 1)]);
    let f0 = SectionFn::unit(e, Divisor::point(*tau));
    let one = rr_basis(e, &Divisor::point(o))?;
    let mut cols = vec![rr_spaces::multiply_sections(e, &f0, &one[0])];
    if !im_v_in_w {
        let basis = rr_basis(e, &target)?;
        let sq = rr_spaces::vanishing_subspace(e, &basis, &[*q]);
        if sq.len() != 1 {
            return Err(Error::Verification(format!("expected a unique section vanishing at {}", e.fmt_point(q))));
        }
        cols.push(sq[0].clone());
    }
    let mut avoid = vec![o, *tau];
    avoid.push(*q);
    let pts = rr_spaces::sample_points(e, &avoid, 0x1de);
    let needed = 5.min(pts.len());
    let m = rr_spaces::evaluation_matrix(e, &cols, &pts[..needed]);
    Ok((cols.len() - crate::field_curve::linalg::rank(&e.field, &m)) as i64 + i64::from(im_v_in_w))
}

/// A concrete extension datum for a split `V1`.
#[derive(Clone, Debug)]
pub struct SplitInstance {
    pub curve: EllipticCurve,
    pub p: CurvePoint,
    pub tau: CurvePoint,
    pub sections: [SectionFn; 4],
    pub pattern: Pattern,
    /// Seed that reproduces `sections` through [`sections_with_pattern`].
    pub seed: u64,
}

impl SplitInstance {
    pub fn torsion(&self) -> TorsionType {
        TorsionType::of(&self.curve, &self.p)
    }

    pub fn extension_class(&self) -> ExtensionClass {
        ExtensionClass::Split { pattern: self.pattern, sections: Some(Box::new(self.sections.clone())) }
    }

    pub fn json(&self) -> Value {
        let e = &self.curve;
        json!({
            "curve": e.spec(),
            "p": e.json_point(&self.p),
            "tau": e.json_point(&self.tau),
            "pattern": self.pattern.code(),
            "seed": self.seed,
            "sections": self.sections.iter().map(|s| s.json(e)).collect::<Vec<_>>(),
        })
    }
}

/// Reads `f1, f2, f3` at `tau` in the local frame.
pub fn pattern_of(e: &EllipticCurve, sections: &[SectionFn; 4], tau: &CurvePoint) -> Pattern {
    let z = |s: &SectionFn| s.is_zero() || s.order_at(e, tau).unwrap() >= 1;
    Pattern::new(z(&sections[1]), z(&sections[2]), z(&sections[3]))
}

/// Shift divisors of `(f0, f1, f2, f3)`.
pub fn shift_divisors(p: &CurvePoint, tau: &CurvePoint) -> [Divisor; 4] {
    let o = CurvePoint::Infinity;
    [
        Divisor::point(*tau),
        Divisor::from_terms([(*p, 2), (*tau, 1), (o, -1)]),
        Divisor::from_terms([(o, 1), (*tau, 1)]),
        Divisor::from_terms([(o, 3), (*p, -2), (*tau, 1)]),
    ]
}

fn random_coeffs<R: Rng>(e: &EllipticCurve, rng: &mut R, n: usize) -> Vec<Fe> {
    (0..n).map(|_| e.field.random_nonzero(rng)).collect()
}

/// Sections with the prescribed vanishing pattern at `tau`, drawn at random.
pub fn sections_with_pattern(
    e: &EllipticCurve,
    p: &CurvePoint,
    tau: &CurvePoint,
    pattern: Pattern,
    seed: u64,
    retries: u32,
) -> Result<[SectionFn; 4]> {
    let divs = shift_divisors(p, tau);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = SectionFn::unit(e, divs[0].clone());
    let mut out = vec![f0];
    for (i, d) in divs.iter().enumerate().skip(1) {
        let basis = rr_basis(e, d)?;
        let want_zero = pattern.zero[i - 1];
        let span = if want_zero { rr_spaces::vanishing_subspace(e, &basis, &[*tau]) } else { basis };
        let mut found = None;
        for _ in 0..retries.max(1) {
            let c = random_coeffs(e, &mut rng, span.len());
            let s = combine(e, d, &span, &c);
            if s.is_zero() {
                continue;
            }
            let vanishes = s.order_at(e, tau).unwrap() >= 1;
            if vanishes == want_zero {
                found = Some(s);
                break;
            }
        }
        out.push(found.ok_or_else(|| Error::Genericity {
            attempts: retries,
            predicate: format!("f{i} {} at tau", if want_zero { "vanishing" } else { "nonvanishing" }),
        })?);
    }
    Ok(out.try_into().expect("four sections"))
}

/// Rational points `p` with the given torsion type, in curve order.
pub fn points_with_torsion(e: &EllipticCurve, t: TorsionType) -> Vec<CurvePoint> {
    e.points().into_iter().filter(|p| TorsionType::of(e, p) == t).collect()
}

/// Seeded concrete instance for a torsion type and vanishing pattern.
pub fn split_instance(e: &EllipticCurve, torsion: TorsionType, pattern: Pattern, seed: u64, retries: u32) -> Result<SplitInstance> {
    if pattern.m() == 3 {
        return Err(Error::InvalidExtension("all of f1, f2, f3 vanish at tau".into()));
    }
    let ps = points_with_torsion(e, torsion);
    if ps.is_empty() {
        return Err(Error::Unsupported(format!("{} has no rational point with {}", e.spec(), torsion.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = e.points();
    let mut last = None;
    for attempt in 0..retries.max(1) {
        let p = ps[rng.gen_range(0..ps.len())];
        let tau = pts[rng.gen_range(0..pts.len())];
        if tau.is_infinity() || tau == p || tau == e.neg(&p) {
            continue;
        }
        let section_seed = seed.wrapping_add(attempt as u64);
        match sections_with_pattern(e, &p, &tau, pattern, section_seed, retries) {
            Ok(sections) => return Ok(SplitInstance { curve: *e, p, tau, sections, pattern, seed: section_seed }),
            Err(err) => last = Some(err),
        }
    }
    Err(last.unwrap_or(Error::Genericity { attempts: retries, predicate: "tau distinct from o and ±p".into() }))
}

/// Representative instance for one of the eleven split labels.
pub fn instance_for_label(e: &EllipticCurve, label: StratumLabel, seed: u64, retries: u32) -> Result<SplitInstance> {
    let (t, pat) = label
        .split_representative()
        .ok_or_else(|| Error::Domain(format!("{label} has indecomposable V1")))?;
    split_instance(e, t, pat, seed, retries)
}

/// Outcome of comparing the symbolic classification with the oracle.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub classification: Classification,
    pub oracle_profile: BTreeMap<LineClass, i64>,
    pub recognized: Recognition,
    pub matching: Vec<StratumLabel>,
    pub table_checks: Vec<(usize, i64, i64)>,
    pub diffs: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty()
    }

    pub fn json(&self, e: &EllipticCurve) -> Value {
        json!({
            "classification": self.classification.json(e),
            "oracle_profile": self.oracle_profile.iter()
                .map(|(l, v)| json!({"class": l.json(e), "h1": v}))
                .collect::<Vec<_>>(),
            "recognized": self.recognized.bundles().iter().map(|b| b.canonical(e)).collect::<Vec<_>>(),
            "matching_labels": self.matching.iter().map(|l| l.name()).collect::<Vec<_>>(),
            "table_checks": self.table_checks.iter()
                .map(|(i, want, got)| json!({"class_index": i, "table": want, "oracle": got}))
                .collect::<Vec<_>>(),
            "passed": self.passed(),
            "diffs": self.diffs,
        })
    }
}

/// Classifies symbolically, recomputes the `h^1` profile through
/// multiplication maps, recognizes the bundle and compares.
pub fn verify_classification(e: &EllipticCurve, p: &CurvePoint, tau: &CurvePoint, sections: &[SectionFn; 4]) -> Result<VerificationReport> {
    let pattern = pattern_of(e, sections, tau);
    let xi = ExtensionClass::Split { pattern, sections: Some(Box::new(sections.clone())) };
    let classification = classify_v2(e, &V1Type::Split(*p), tau, &xi)?;
    let det = LineClass::of_point(*tau);
    let oracle = oracle_profile(e, sections)?;
    let recognized = recognize_rank3(e, &oracle, &det)?;
    let mut diffs = Vec::new();
    let matching: Vec<StratumLabel> = classification
        .candidates
        .iter()
        .filter(|(_, b)| recognized.contains(b))
        .map(|(l, _)| *l)
        .collect();
    if matching.is_empty() {
        diffs.push(format!(
            "classifier {:?} not among recognized {:?}",
            classification.candidates.iter().map(|(_, b)| b.canonical(e)).collect::<Vec<_>>(),
            recognized.bundles().iter().map(|b| b.canonical(e)).collect::<Vec<_>>()
        ));
    }
    for (label, b) in &classification.candidates {
        if b.rank() != 3 || b.deg() != 1 || b.det(e) != det {
            diffs.push(format!("{label}: rank {}, degree {}, det {}", b.rank(), b.deg(), b.det(e).display(e)));
        }
        if matching.contains(label) {
            let sym = symbolic_profile(e, b)?;
            if sym != oracle {
                diffs.push(format!("{label}: symbolic h1 profile {sym:?} differs from oracle {oracle:?}"));
            }
        }
    }
    let torsion = TorsionType::of(e, p);
    let mut table_checks = Vec::new();
    for (i, l) in special_classes(e, p).iter().enumerate() {
        if let Some(want) = table_h1(torsion, pattern, i) {
            let got = oracle.get(l).copied().unwrap_or(0);
            if want != got {
                diffs.push(format!("table row at class {i}: expected {want}, oracle {got}"));
            }
            table_checks.push((i, want, got));
        }
    }
    if torsion == TorsionType::Two {
        let got = oracle.get(&LineClass::trivial()).copied().unwrap_or(0);
        if got != 2 || oracle.len() != 1 {
            diffs.push(format!("2u = 0: expected h1 = 2 at O only, oracle {oracle:?}"));
        }
    }
    Ok(VerificationReport { classification, oracle_profile: oracle, recognized, matching, table_checks, diffs })
}

/// One coefficient of the branch equation in the `e = 2` case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientBound {
    pub i: i64,
    pub j: i64,
    pub deg: i64,
    pub h0: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Certificate {
    pub coefficients: Vec<CoefficientBound>,
    pub verdict: String,
}

/// Degrees and `h^0` of `T^-1 ⊗ M^i ⊗ L^j`, `i + j = 6`; the two
/// coefficients with `i < 2` vanish, so `x0^2` divides the branch equation.
pub fn exclude_e2(e: &EllipticCurve, t: &LineClass, m: &LineClass, l: &LineClass) -> Result<E2Certificate> {
    if l.deg != 0 || l.is_trivial() {
        return Err(Error::Domain("L must be a nontrivial degree-0 class".into()));
    }
    let coefficients: Vec<CoefficientBound> = (0..=6)
        .map(|i| {
            let c = t.dual(e).tensor(e, &m.pow(e, i)).tensor(e, &l.pow(e, 6 - i));
            CoefficientBound { i, j: 6 - i, deg: c.deg, h0: h0_h1(&c).0 }
        })
        .collect();
    let vanish = coefficients.iter().filter(|c| c.i < 2).all(|c| c.h0 == 0);
    let verdict = if vanish {
        "a06 = a15 = 0: x0^2 divides the branch equation, non-reduced branch, e = 2 excluded".to_string()
    } else {
        "inconclusive: a low coefficient bundle has sections".to_string()
    };
    Ok(E2Certificate { coefficients, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_pattern_and_torsion_is_handled() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        let tau = e.points()[3];
        for t in [TorsionType::Generic, TorsionType::Four, TorsionType::Two] {
            let Some(&p) = points_with_torsion(&e, t).first() else { continue };
            for pat in Pattern::all() {
                let xi = ExtensionClass::Split { pattern: pat, sections: None };
                let r = classify_v2(&e, &V1Type::Split(p), &tau, &xi);
                if pat.m() == 3 {
                    assert!(matches!(r, Err(Error::InvalidExtension(_))));
                } else {
                    for (_, b) in r.unwrap().candidates {
                        assert_eq!((b.rank(), b.deg()), (3, 1));
                        assert_eq!(b.det(&e), LineClass::of_point(tau));
                    }
                }
            }
        }
    }

    #[test]
    fn recognition_examples() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        let tau = e.points()[3];
        let det = LineClass::of_point(tau);
        let empty = BTreeMap::new();
        assert_eq!(recognize_rank3(&e, &empty, &det).unwrap(), Recognition::Unique(BundleExpr::e_at(3, tau)));
        let two = BTreeMap::from([(LineClass::trivial(), 2)]);
        assert_eq!(
            recognize_rank3(&e, &two, &det).unwrap(),
            Recognition::Unique(BundleExpr::lines([LineClass::trivial(), LineClass::trivial(), det]))
        );
        let one = BTreeMap::from([(LineClass::trivial(), 1)]);
        let Recognition::Candidates(c) = recognize_rank3(&e, &one, &det).unwrap() else { panic!() };
        assert!(c.contains(&BundleExpr::f(2, LineClass::trivial()).direct_sum(&BundleExpr::line(det))));
    }

    #[test]
    fn e2_certificate() {
        let e = EllipticCurve::parse_spec("37:0:1").unwrap();
        let l = LineClass { deg: 0, point: e.n_torsion(2).points[1] };
        let c = exclude_e2(&e, &LineClass::origin_multiple(3), &LineClass::origin_multiple(2), &l).unwrap();
        assert_eq!(c.coefficients[0].deg, -3);
        assert_eq!(c.coefficients[1].deg, -1);
        assert!(c.verdict.contains("excluded"));
    }
}
