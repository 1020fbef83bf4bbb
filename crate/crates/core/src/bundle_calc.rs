//! Symbolic vector bundles on an elliptic curve: sums of line classes and
//! Atiyah's indecomposables, with the operations the classification needs.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field_curve::CurvePoint;
use crate::picard::{h0_h1, GroupElem, LineClass, PicGroup};

/// One direct summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom<P = CurvePoint> {
    Line(LineClass<P>),
    /// `F_rank ⊗ twist`.
    F { rank: u32, twist: LineClass<P> },
    /// The indecomposable of rank `rank`, degree `1 + rank * twist_deg` and
    /// the given determinant.
    E { rank: u32, twist_deg: i64, det: LineClass<P> },
    /// `S^power` of an indecomposable of rank `base_rank`, twisted. Only its
    /// numerical data is kept; cohomology is read off the slope.
    SymE { power: u32, base_rank: u32, rank: u64, deg: i64, det: LineClass<P> },
}

impl<P: GroupElem> Atom<P> {
    pub fn rank(&self) -> u64 {
        match *self {
            Atom::Line(_) => 1,
            Atom::F { rank, .. } | Atom::E { rank, .. } => rank as u64,
            Atom::SymE { rank, .. } => rank,
        }
    }

    pub fn deg(&self) -> i64 {
        match *self {
            Atom::Line(l) => l.deg,
            Atom::F { rank, twist } => rank as i64 * twist.deg,
            Atom::E { rank, twist_deg, .. } => 1 + rank as i64 * twist_deg,
            Atom::SymE { deg, .. } => deg,
        }
    }

    pub fn det<G: PicGroup<Elem = P>>(&self, e: &G) -> LineClass<P> {
        match *self {
            Atom::Line(l) => l,
            Atom::F { rank, twist } => twist.pow(e, rank as i64),
            Atom::E { det, .. } | Atom::SymE { det, .. } => det,
        }
    }

    pub fn tensor_line<G: PicGroup<Elem = P>>(&self, e: &G, l: &LineClass<P>) -> Atom<P> {
        match *self {
            Atom::Line(m) => Atom::Line(m.tensor(e, l)),
            Atom::F { rank, twist } => Atom::F { rank, twist: twist.tensor(e, l) },
            Atom::E { rank, twist_deg, det } => {
                Atom::E { rank, twist_deg: twist_deg + l.deg, det: det.tensor(e, &l.pow(e, rank as i64)) }
            }
            Atom::SymE { power, base_rank, rank, deg, det } => Atom::SymE {
                power,
                base_rank,
                rank,
                deg: deg + rank as i64 * l.deg,
                det: det.tensor(e, &l.pow(e, rank as i64)),
            },
        }
    }

    pub fn cohomology(&self) -> Result<(i64, i64)> {
        match *self {
            Atom::Line(l) => Ok(h0_h1(&l)),
            Atom::F { rank, twist } => {
                let d = rank as i64 * twist.deg;
                Ok(match twist.deg {
                    t if t > 0 => (d, 0),
                    t if t < 0 => (0, -d),
                    _ if twist.is_trivial() => (1, 1),
                    _ => (0, 0),
                })
            }
            Atom::E { .. } | Atom::SymE { .. } => match self.deg() {
                d if d > 0 => Ok((d, 0)),
                d if d < 0 => Ok((0, -d)),
                _ => Err(Error::Unsupported(format!("cohomology of slope-zero {self:?}"))),
            },
        }
    }

    pub fn canonical<G: PicGroup<Elem = P>>(&self, e: &G) -> String {
        match *self {
            Atom::Line(l) => format!("O({})", l.display(e)),
            Atom::F { rank, twist } => format!("F{rank}({})", twist.display(e)),
            Atom::E { rank, twist_deg, det } => format!("E{rank}[{twist_deg}]({})", det.display(e)),
            Atom::SymE { power, base_rank, rank, deg, det } => {
                format!("S{power}E{base_rank}[r{rank},d{deg}]({})", det.display(e))
            }
        }
    }
}

/// A direct sum of atoms, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BundleExpr<P = CurvePoint> {
    atoms: Vec<Atom<P>>,
}

impl<P> Default for BundleExpr<P> {
    fn default() -> Self {
        BundleExpr { atoms: Vec::new() }
    }
}

impl<P: GroupElem> BundleExpr<P> {
    pub fn zero() -> BundleExpr<P> {
        BundleExpr::default()
    }

    pub fn from_atoms<I: IntoIterator<Item = Atom<P>>>(atoms: I) -> BundleExpr<P> {
        let mut atoms: Vec<Atom<P>> = atoms.into_iter().collect();
        atoms.sort();
        BundleExpr { atoms }
    }

    pub fn line(l: LineClass<P>) -> BundleExpr<P> {
        BundleExpr::from_atoms([Atom::Line(l)])
    }

    pub fn lines<I: IntoIterator<Item = LineClass<P>>>(ls: I) -> BundleExpr<P> {
        BundleExpr::from_atoms(ls.into_iter().map(Atom::Line))
    }

    pub fn trivial(n: usize) -> BundleExpr<P> {
        BundleExpr::lines(std::iter::repeat_n(LineClass::identity_class(), n))
    }

    /// `F_r ⊗ twist`.
    pub fn f(rank: u32, twist: LineClass<P>) -> BundleExpr<P> {
        if rank == 1 {
            return BundleExpr::line(twist);
        }
        BundleExpr::from_atoms([Atom::F { rank, twist }])
    }

    /// The rank-`r` indecomposable of degree 1 and determinant `O(x)`.
    pub fn e_at(rank: u32, x: P) -> BundleExpr<P> {
        let det = LineClass { deg: 1, point: x };
        if rank == 1 {
            return BundleExpr::line(det);
        }
        BundleExpr::from_atoms([Atom::E { rank, twist_deg: 0, det }])
    }

    pub fn atoms(&self) -> &[Atom<P>] {
        &self.atoms
    }

    pub fn is_sum_of_lines(&self) -> bool {
        self.atoms.iter().all(|a| matches!(a, Atom::Line(_)))
    }

    pub fn line_summands(&self) -> Vec<LineClass<P>> {
        self.atoms
            .iter()
            .filter_map(|a| if let Atom::Line(l) = a { Some(*l) } else { None })
            .collect()
    }

    pub fn rank(&self) -> u64 {
        self.atoms.iter().map(Atom::rank).sum()
    }

    pub fn deg(&self) -> i64 {
        self.atoms.iter().map(Atom::deg).sum()
    }

    pub fn det<G: PicGroup<Elem = P>>(&self, e: &G) -> LineClass<P> {
        self.atoms.iter().fold(LineClass::identity_class(), |acc, a| acc.tensor(e, &a.det(e)))
    }

    pub fn direct_sum(&self, other: &BundleExpr<P>) -> BundleExpr<P> {
        BundleExpr::from_atoms(self.atoms.iter().chain(other.atoms.iter()).copied())
    }

    pub fn tensor_line<G: PicGroup<Elem = P>>(&self, e: &G, l: &LineClass<P>) -> BundleExpr<P> {
        BundleExpr::from_atoms(self.atoms.iter().map(|a| a.tensor_line(e, l)))
    }

    /// Tensor product; one of the factors must be a sum of lines.
    pub fn tensor<G: PicGroup<Elem = P>>(&self, e: &G, other: &BundleExpr<P>) -> Result<BundleExpr<P>> {
        let (lines, rest) = if other.is_sum_of_lines() {
            (other, self)
        } else if self.is_sum_of_lines() {
            (self, other)
        } else {
            return Err(Error::Unsupported(format!(
                "tensor of {} and {}",
                self.canonical(e),
                other.canonical(e)
            )));
        };
        Ok(lines
            .line_summands()
            .iter()
            .fold(BundleExpr::zero(), |acc, l| acc.direct_sum(&rest.tensor_line(e, l))))
    }

    pub fn dual<G: PicGroup<Elem = P>>(&self, e: &G) -> Result<BundleExpr<P>> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| match *a {
                Atom::Line(l) => Ok(Atom::Line(l.dual(e))),
                Atom::F { rank, twist } => Ok(Atom::F { rank, twist: twist.dual(e) }),
                Atom::E { rank: 2, twist_deg, det } => Ok(Atom::E { rank: 2, twist_deg: -1 - twist_deg, det: det.dual(e) }),
                other => Err(Error::Unsupported(format!("dual of {}", other.canonical(e)))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BundleExpr::from_atoms(atoms))
    }

    /// `(h0, h1)` of `self ⊗ l`.
    pub fn cohomology<G: PicGroup<Elem = P>>(&self, e: &G, l: &LineClass<P>) -> Result<(i64, i64)> {
        self.atoms.iter().try_fold((0, 0), |(h0, h1), a| {
            let (a0, a1) = a.tensor_line(e, l).cohomology()?;
            Ok((h0 + a0, h1 + a1))
        })
    }

    pub fn h0<G: PicGroup<Elem = P>>(&self, e: &G) -> Result<i64> {
        Ok(self.cohomology(e, &LineClass::identity_class())?.0)
    }

    pub fn h1<G: PicGroup<Elem = P>>(&self, e: &G) -> Result<i64> {
        Ok(self.cohomology(e, &LineClass::identity_class())?.1)
    }

    /// Multiset difference `self - other`; `None` unless `other` is contained.
    pub fn minus(&self, other: &BundleExpr<P>) -> Option<BundleExpr<P>> {
        let mut left = self.atoms.clone();
        for a in &other.atoms {
            let i = left.iter().position(|b| b == a)?;
            left.remove(i);
        }
        Some(BundleExpr { atoms: left })
    }

    pub fn canonical<G: PicGroup<Elem = P>>(&self, e: &G) -> String {
        if self.atoms.is_empty() {
            return "0".into();
        }
        self.atoms.iter().map(|a| a.canonical(e)).collect::<Vec<_>>().join(" ⊕ ")
    }

    pub fn display<'a, G: PicGroup<Elem = P>>(&'a self, e: &'a G) -> BundleDisplay<'a, G> {
        BundleDisplay { bundle: self, curve: e }
    }
}

pub struct BundleDisplay<'a, G: PicGroup> {
    bundle: &'a BundleExpr<G::Elem>,
    curve: &'a G,
}

impl<G: PicGroup> fmt::Display for BundleDisplay<'_, G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bundle.canonical(self.curve))
    }
}

/// The three nontrivial 2-torsion classes, which must be rational.
pub fn two_torsion_classes<G: PicGroup>(g: &G) -> Result<[LineClass<G::Elem>; 3]> {
    let pts = g.two_torsion().ok_or_else(|| Error::Unsupported("2-torsion is not fully rational".into()))?;
    Ok(pts.map(|point| LineClass { deg: 0, point }))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn sym_atom<G: PicGroup>(e: &G, a: &Atom<G::Elem>, k: u32) -> Result<BundleExpr<G::Elem>> {
    if k == 0 {
        return Ok(BundleExpr::trivial(1));
    }
    if k == 1 {
        return Ok(BundleExpr::from_atoms([*a]));
    }
    match *a {
        Atom::Line(l) => Ok(BundleExpr::line(l.pow(e, k as i64))),
        Atom::F { rank: 2, twist } => Ok(BundleExpr::f(k + 1, twist.pow(e, k as i64))),
        Atom::E { rank: 2, det, .. } if k == 2 => {
            let ls = two_torsion_classes(e)?;
            Ok(BundleExpr::lines(ls.iter().map(|l| l.tensor(e, &det))))
        }
        Atom::E { rank: 2, det, .. } if k == 3 => {
            let w = a.tensor_line(e, &det);
            Ok(BundleExpr::from_atoms([w, w]))
        }
        Atom::E { rank, .. } => {
            let r = rank as u64;
            let sym_rank = binomial(r + k as u64 - 1, k as u64);
            let exponent = binomial(r + k as u64 - 1, r) as i64;
            Ok(BundleExpr::from_atoms([Atom::SymE {
                power: k,
                base_rank: rank,
                rank: sym_rank,
                deg: a.deg() * exponent,
                det: a.det(e).pow(e, exponent),
            }]))
        }
        other => Err(Error::Unsupported(format!("S^{k} of {}", other.canonical(e)))),
    }
}

/// `S^k V` for the supported shapes: sums of lines, `F_2` twists, rank-2
/// indecomposables for `k <= 3`, and mixed sums through
/// `S^k(A ⊕ B) = ⊕ S^i A ⊗ S^(k-i) B` whenever each product has a line factor.
pub fn sym_power<G: PicGroup>(e: &G, v: &BundleExpr<G::Elem>, k: u32) -> Result<BundleExpr<G::Elem>> {
    let Some((first, rest)) = v.atoms.split_first() else {
        return Ok(if k == 0 { BundleExpr::trivial(1) } else { BundleExpr::zero() });
    };
    if rest.is_empty() {
        return sym_atom(e, first, k);
    }
    let tail = BundleExpr { atoms: rest.to_vec() };
    let mut out = BundleExpr::zero();
    for i in 0..=k {
        let a = sym_atom(e, first, i)?;
        let b = sym_power(e, &tail, k - i)?;
        out = out.direct_sum(&a.tensor(e, &b)?);
    }
    Ok(out)
}

/// Kinds of singular genus-2 fibres counted in the `K^2` formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FibreKind {
    I,
    II,
    III,
    IV,
    V,
}

/// Number of singular fibres of each kind and index `k >= 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HorikawaCounts {
    counts: BTreeMap<(FibreKind, u32), u64>,
}

impl HorikawaCounts {
    pub fn new() -> HorikawaCounts {
        HorikawaCounts::default()
    }

    /// Sets the count; `k` is ignored for kind `V`.
    pub fn with(mut self, kind: FibreKind, k: u32, n: u64) -> HorikawaCounts {
        let k = if kind == FibreKind::V { 0 } else { k.max(1) };
        if n == 0 {
            self.counts.remove(&(kind, k));
        } else {
            self.counts.insert((kind, k), n);
        }
        self
    }

    pub fn get(&self, kind: FibreKind, k: u32) -> u64 {
        let k = if kind == FibreKind::V { 0 } else { k };
        self.counts.get(&(kind, k)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (FibreKind, u32, u64)> + '_ {
        self.counts.iter().map(|(&(kind, k), &n)| (kind, k, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_curve::EllipticCurve;

    fn b37() -> EllipticCurve {
        EllipticCurve::parse_spec("37:0:1").unwrap()
    }

    #[test]
    fn sym_square_of_f2_is_f3() {
        let e = b37();
        let f2 = BundleExpr::f(2, LineClass::trivial());
        assert_eq!(sym_power(&e, &f2, 2).unwrap(), BundleExpr::f(3, LineClass::trivial()));
        assert_eq!(f2.dual(&e).unwrap(), f2);
    }

    #[test]
    fn sym_powers_of_rank_two_indecomposable() {
        let e = b37();
        let tau = e.points()[5];
        let w = BundleExpr::e_at(2, tau);
        let s2 = sym_power(&e, &w, 2).unwrap();
        assert_eq!((s2.rank(), s2.deg()), (3, 3));
        assert_eq!(s2.det(&e), LineClass::of_point(tau).pow(&e, 3));
        let s3 = sym_power(&e, &w, 3).unwrap();
        assert_eq!((s3.rank(), s3.deg()), (4, 6));
        assert_eq!(s3.det(&e), LineClass::of_point(tau).pow(&e, 6));
    }

    #[test]
    fn trivial_plus_tau_cohomology() {
        let e = b37();
        let tau = e.points()[5];
        let v = BundleExpr::lines([LineClass::trivial(), LineClass::trivial(), LineClass::of_point(tau)]);
        assert_eq!(v.cohomology(&e, &LineClass::trivial()).unwrap(), (3, 2));
        let f3 = BundleExpr::f(3, LineClass::trivial());
        let l = LineClass { deg: 0, point: tau };
        assert_eq!(f3.cohomology(&e, &l).unwrap(), (0, 0));
        assert_eq!(BundleExpr::e_at(3, tau).cohomology(&e, &l).unwrap(), (1, 0));
    }

    #[test]
    fn unsupported_tensor_is_an_error() {
        let e = b37();
        let w = BundleExpr::e_at(2, CurvePoint::Infinity);
        assert!(w.tensor(&e, &w).is_err());
        assert!(sym_power(&e, &BundleExpr::f(3, LineClass::trivial()), 2).is_err());
    }
}
