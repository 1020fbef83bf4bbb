//! Parameter counts for the strata: the sextic-coefficient bundle of each
//! decomposition type, its sections, the moduli table, and the numerical
//! formulas for genus-2 fibrations.
//!
//! Everything is evaluated over [`RelationGroup`], so a subcase is just the
//! lattice of relations that hold among `u = p - o` and `v = tau - o`.

pub mod lattice;

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use crate::bundle_calc::{sym_power, Atom, BundleExpr, FibreKind, HorikawaCounts};
use crate::classifier::{v2_bundle, StratumLabel};
use crate::error::{Error, Result};
use crate::picard::LineClass;

pub use lattice::{fmt_relation, parse_relation, Relation, RelationGroup, RelationLattice, RelationList, SymPoint};

/// Dimension of the general fibre of the map from parameters to moduli in
/// case V, i.e. `dim Z - 1` for the group of commuting automorphism pairs.
/// Recomputed by `fibration_lab::automorphism_pairs`.
pub const CASE_V_FIBRE_DIMENSION: i64 = 1;

/// An integer that is either known exactly or only bounded above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bound {
    pub value: i64,
    pub exact: bool,
}

impl Bound {
    pub fn exact(value: i64) -> Bound {
        Bound { value, exact: true }
    }

    pub fn at_most(value: i64) -> Bound {
        Bound { value, exact: false }
    }

    pub fn plus(self, o: Bound) -> Bound {
        Bound { value: self.value + o.value, exact: self.exact && o.exact }
    }

    pub fn json(&self) -> Value {
        json!({"value": self.value, "exact": self.exact})
    }

    /// `12` or `<=12`.
    pub fn ascii(&self) -> String {
        if self.exact {
            self.value.to_string()
        } else {
            format!("<={}", self.value)
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.value)
        } else {
            write!(f, "≤{}", self.value)
        }
    }
}

/// `(chi(O_S), K_S^2)` of a genus-2 fibration from `deg V1`, `deg tau` and
/// the genus of the base.
pub fn fibration_invariants(deg_v1: i64, deg_tau: i64, b: i64) -> (i64, i64) {
    (deg_v1 + b - 1, 2 * deg_v1 + deg_tau + 8 * (b - 1))
}

/// `K^2` from the arithmetic genus, the base genus and the singular-fibre counts.
pub fn horikawa_k2(p_a: i64, b: i64, nu: &HorikawaCounts) -> i64 {
    let mut k2 = 2 * p_a - 4 + 6 * b;
    for (kind, k, n) in nu.iter() {
        let k = k as i64;
        let n = n as i64;
        k2 += n * match kind {
            FibreKind::I | FibreKind::III => 2 * k - 1,
            FibreKind::II | FibreKind::IV => 2 * k,
            FibreKind::V => 1,
        };
    }
    k2
}

/// `10 chi - 2 K^2 + p_g`, a lower bound for the dimension of every
/// component of the moduli space.
pub fn moduli_lower_bound(chi: i64, k2: i64, p_g: i64) -> i64 {
    10 * chi - 2 * k2 + p_g
}

fn base_relations(label: StratumLabel) -> Vec<Relation> {
    use StratumLabel::*;
    match label {
        IIa | IIb | IIc => vec![[4, 0]],
        V => vec![[2, 0]],
        // V1 indecomposable: u plays no role
        VI | VIIa | VIIb => vec![[1, 0]],
        _ => Vec::new(),
    }
}

fn is_indecomposable_v1(label: StratumLabel) -> bool {
    matches!(label, StratumLabel::VI | StratumLabel::VIIa | StratumLabel::VIIb)
}

/// Strata whose defining sequence for the sextic bundle splits.
pub fn a6_splits(label: StratumLabel) -> bool {
    use StratumLabel::*;
    matches!(label, IIb | IIc | IVa | IVb | V | VIIb)
}

fn check_consistent(label: StratumLabel, lat: &RelationLattice) -> Result<()> {
    use StratumLabel::*;
    if is_indecomposable_v1(label) {
        return Ok(());
    }
    let two = lat.kills_u_multiple(2);
    let four = lat.kills_u_multiple(4);
    let bad = match label {
        V => !two,
        IIa | IIb | IIc => two || !four,
        I | IIIc => four,
        _ => two,
    };
    if bad {
        return Err(Error::Domain(format!(
            "relations {} are incompatible with stratum {label}",
            RelationList(lat.generators())
        )));
    }
    Ok(())
}

/// Subcases dropped from the table with the reason.
fn exclusion(label: StratumLabel, lat: &RelationLattice) -> Option<&'static str> {
    if label == StratumLabel::IVc && lat.contains([2, -2]) && lat.contains([-2, -2]) {
        Some("both degree-0 summands of G1 trivial; the cokernel bound alone does not control this locus")
    } else {
        None
    }
}

/// The two outer terms of the sequence presenting the sextic bundle, and
/// what can be said about its sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A6Data {
    pub label: StratumLabel,
    pub group: RelationGroup,
    pub v2: BundleExpr<SymPoint>,
    pub g1: BundleExpr<SymPoint>,
    pub g2: BundleExpr<SymPoint>,
    pub split: bool,
    /// The quotient itself when the sequence splits.
    pub a6: Option<BundleExpr<SymPoint>>,
    pub h0_g1: i64,
    pub h1_g1: i64,
    pub h0_g2: i64,
    pub h0: Bound,
}

impl A6Data {
    pub fn relations(&self) -> RelationList {
        RelationList(self.group.lattice.generators())
    }

    pub fn json(&self) -> Value {
        let g = &self.group;
        json!({
            "label": self.label.name(),
            "relations": self.relations().to_string(),
            "v2": self.v2.canonical(g),
            "g1": self.g1.canonical(g),
            "g2": self.g2.canonical(g),
            "split": self.split,
            "a6": self.a6.as_ref().map(|a| a.canonical(g)),
            "h0_g1": self.h0_g1,
            "h1_g1": self.h1_g1,
            "h0_g2": self.h0_g2,
            "h0": self.h0.json(),
        })
    }
}

fn lattice_for(label: StratumLabel, extra: &[Relation]) -> Result<RelationLattice> {
    let mut gens = base_relations(label);
    gens.extend_from_slice(extra);
    let lat = RelationLattice::generated_by(&gens);
    check_consistent(label, &lat)?;
    Ok(lat)
}

fn a6_in(label: StratumLabel, lat: RelationLattice) -> Result<A6Data> {
    let g = RelationGroup::new(lat);
    let v2 = v2_bundle(&g, label, &g.elem(2, 0), &g.elem(0, 1));
    let twist = LineClass { deg: 0, point: g.elem(0, -2) };
    let g1 = v2.tensor_line(&g, &twist);
    let g2 = sym_power(&g, &v2, 3)?.tensor_line(&g, &twist);
    let (h0_g1, h1_g1) = g1.cohomology(&g, &LineClass::identity_class())?;
    let h0_g2 = g2.h0(&g)?;
    let split = a6_splits(label);
    let (a6, h0) = if split {
        let a6 = g2.minus(&g1).ok_or_else(|| {
            Error::Verification(format!("{label}: {} is not a summand of {}", g1.canonical(&g), g2.canonical(&g)))
        })?;
        let h = a6.h0(&g)?;
        (Some(a6), Bound::exact(h))
    } else if h1_g1 == 0 {
        (None, Bound::exact(h0_g2 - h0_g1))
    } else {
        (None, Bound::at_most(h0_g2 - h0_g1 + h1_g1))
    };
    Ok(A6Data { label, group: g, v2, g1, g2, split, a6, h0_g1, h1_g1, h0_g2, h0 })
}

/// Sextic-bundle data for a stratum under the given extra relations among
/// `u` and `v` (on top of those forced by the label).
pub fn a6_for_stratum(label: StratumLabel, extra: &[Relation]) -> Result<A6Data> {
    a6_in(label, lattice_for(label, extra)?)
}

/// Parameters of the five-tuple `(B, V1, tau, xi, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamBudget {
    pub base: Bound,
    pub v1: Bound,
    pub xi: Bound,
    pub tau: Bound,
    pub w: Bound,
    /// Dimension of the general fibre of parameters over moduli; `None`
    /// when not computed, in which case the total is only an upper bound.
    pub fibre_correction: Option<i64>,
}

impl ParamBudget {
    pub fn total(&self) -> Bound {
        let sum = self.base.plus(self.v1).plus(self.xi).plus(self.tau).plus(self.w);
        match self.fibre_correction {
            Some(c) => Bound { value: sum.value - c, exact: sum.exact },
            None => Bound::at_most(sum.value),
        }
    }

    pub fn json(&self) -> Value {
        json!({
            "B": self.base.json(),
            "V1": self.v1.json(),
            "xi": self.xi.json(),
            "tau": self.tau.json(),
            "w": self.w.json(),
            "fibre_correction": self.fibre_correction,
            "total": self.total().json(),
        })
    }
}

fn xi_params(label: StratumLabel) -> Bound {
    use StratumLabel::*;
    match label {
        VI => Bound::exact(2),
        VIIa | VIIb => Bound::at_most(1),
        _ => {
            let (_, pattern) = label.split_representative().expect("split label");
            Bound::exact(2 - pattern.m() as i64)
        }
    }
}

fn budget_from(a6: &A6Data) -> ParamBudget {
    let lat = &a6.group.lattice;
    let free = 2 - lat.rank() as i64;
    let v1 = if is_indecomposable_v1(a6.label) || lat.order_of_u().is_some() { 0 } else { 1 };
    ParamBudget {
        base: Bound::exact(1),
        v1: Bound::exact(v1),
        xi: xi_params(a6.label),
        tau: Bound::exact(free - v1),
        w: Bound { value: a6.h0.value - 1, exact: a6.h0.exact },
        fibre_correction: (a6.label == StratumLabel::V).then_some(CASE_V_FIBRE_DIMENSION),
    }
}

pub fn stratum_dimension(label: StratumLabel, extra: &[Relation]) -> Result<ParamBudget> {
    Ok(budget_from(&a6_for_stratum(label, extra)?))
}

/// One subcase of a stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcaseReport {
    /// Relations imposed on top of the label's own, before closure.
    pub imposed: RelationList,
    pub a6: A6Data,
    pub budget: ParamBudget,
    pub excluded: Option<&'static str>,
}

impl SubcaseReport {
    pub fn json(&self) -> Value {
        json!({
            "imposed": self.imposed.to_string(),
            "lattice": self.a6.relations().to_string(),
            "h0_a6": self.a6.h0.json(),
            "budget": self.budget.json(),
            "excluded": self.excluded,
        })
    }
}

/// Degree-0 summand classes of `G1` and `G2`, as relations that may or may
/// not hold.
fn degree_zero_classes(a6: &A6Data) -> Result<Vec<Relation>> {
    let mut out = BTreeSet::new();
    for atom in a6.g1.atoms().iter().chain(a6.g2.atoms()) {
        let class = match atom {
            Atom::Line(l) if l.deg == 0 => l.point,
            Atom::F { twist, .. } if twist.deg == 0 => twist.point,
            a if a.deg() == 0 => return Err(Error::Unsupported(format!("degree-0 summand {a:?}"))),
            _ => continue,
        };
        if class.has_torsion_part() {
            return Err(Error::Unsupported(format!("degree-0 summand with 2-torsion part {class:?}")));
        }
        if class.uv != [0, 0] {
            let r = class.uv;
            let neg = [-r[0], -r[1]];
            out.insert(r.max(neg));
        }
    }
    Ok(out.into_iter().collect())
}

/// Every distinct relation lattice obtained by declaring some of the
/// degree-0 summands trivial, restricted to those compatible with the label.
pub fn subcases(label: StratumLabel) -> Result<Vec<SubcaseReport>> {
    let base = lattice_for(label, &[])?;
    let classes = degree_zero_classes(&a6_in(label, base)?)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << classes.len()) {
        let chosen: Vec<Relation> = (0..classes.len()).filter(|i| mask >> i & 1 == 1).map(|i| classes[i]).collect();
        let lat = base.with(&chosen);
        if check_consistent(label, &lat).is_err() || !seen.insert(lat) {
            continue;
        }
        let a6 = a6_in(label, lat)?;
        let budget = budget_from(&a6);
        out.push(SubcaseReport { imposed: RelationList(chosen), excluded: exclusion(label, &lat), a6, budget });
    }
    Ok(out)
}

/// A row of the moduli table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliRow {
    pub name: String,
    pub labels: Vec<StratumLabel>,
    pub dimension: Bound,
    /// Strictly below the lower bound for every component.
    pub disregard: bool,
    pub subcases: Vec<SubcaseReport>,
}

impl ModuliRow {
    pub fn json(&self) -> Value {
        json!({
            "stratum": self.name,
            "labels": self.labels.iter().map(|l| l.name()).collect::<Vec<_>>(),
            "dimension": self.dimension.json(),
            "disregard": self.disregard,
            "subcases": self.subcases.iter().map(SubcaseReport::json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliTable {
    pub rows: Vec<ModuliRow>,
    pub lower_bound: i64,
    pub components_at_least: usize,
    pub component_dimensions: Vec<i64>,
    pub at_most_one_top_dimensional: bool,
}

const P_G: i64 = 2;
const CHI: i64 = 2;
const K2: i64 = 5;

fn row(name: &str, labels: &[StratumLabel], filter: impl Fn(&SubcaseReport) -> bool, lower: i64) -> Result<ModuliRow> {
    let mut subs = Vec::new();
    for &l in labels {
        subs.extend(subcases(l)?.into_iter().filter(&filter));
    }
    let counted: Vec<Bound> = subs.iter().filter(|s| s.excluded.is_none()).map(|s| s.budget.total()).collect();
    let value = counted.iter().map(|b| b.value).max().ok_or_else(|| Error::Verification(format!("{name}: no subcases")))?;
    let dimension = Bound { value, exact: counted.iter().all(|b| b.exact) };
    Ok(ModuliRow { name: name.to_string(), labels: labels.to_vec(), dimension, disregard: value < lower, subcases: subs })
}

pub fn moduli_table() -> Result<ModuliTable> {
    use StratumLabel::*;
    let lower = moduli_lower_bound(CHI, K2, P_G);
    let all = |_: &SubcaseReport| true;
    let two_v = |s: &SubcaseReport| s.a6.group.lattice.contains([0, 2]);
    let mut rows = Vec::new();
    for (name, labels) in [("I", vec![I]), ("IIa", vec![IIa]), ("IIb", vec![IIb]), ("IIc", vec![IIc]), ("IIIa=IIIb", vec![IIIa, IIIb])]
    {
        rows.push(row(name, &labels, all, lower)?);
    }
    for (name, l) in [("IIIc", IIIc), ("IVa", IVa), ("IVb", IVb), ("IVc", IVc)] {
        rows.push(row(name, &[l], all, lower)?);
    }
    rows.push(row("V,gen", &[V], |s| !two_v(s), lower)?);
    rows.push(row("V,2", &[V], two_v, lower)?);
    for (name, l) in [("VI", VI), ("VIIa", VIIa), ("VIIb", VIIb)] {
        rows.push(row(name, &[l], all, lower)?);
    }
    let top = rows.iter().map(|r| r.dimension.value).max().unwrap_or(lower);
    let component_dimensions: Vec<i64> = (lower..=top).collect();
    let at_most_one_top_dimensional = rows.iter().filter(|r| r.dimension.value == top).count() <= 1;
    // V,2 has exact dimension equal to the lower bound, so it is a component;
    // V,gen has tau off the closed locus 2v = 0, so it lies in another one.
    let v2 = rows.iter().find(|r| r.name == "V,2");
    let vgen = rows.iter().find(|r| r.name == "V,gen");
    let components_at_least = match (v2, vgen) {
        (Some(a), Some(b)) if a.dimension == Bound::exact(lower) && b.dimension.exact => 2,
        (Some(a), _) if a.dimension == Bound::exact(lower) => 1,
        _ => 0,
    };
    Ok(ModuliTable { rows, lower_bound: lower, components_at_least, component_dimensions, at_most_one_top_dimensional })
}

impl ModuliTable {
    pub fn row(&self, name: &str) -> Option<&ModuliRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn json(&self) -> Value {
        json!({
            "rows": self.rows.iter().map(ModuliRow::json).collect::<Vec<_>>(),
            "lower_bound": self.lower_bound,
            "corollary": {
                "components_at_least": self.components_at_least,
                "component_dimensions": self.component_dimensions,
                "at_most_one_top_dimensional": self.at_most_one_top_dimensional,
            },
        })
    }

    pub fn tsv(&self) -> String {
        let mut s = String::from("stratum\tdimension\texact\tdisregard\n");
        for r in &self.rows {
            s.push_str(&format!("{}\t{}\t{}\t{}\n", r.name, r.dimension.ascii(), r.dimension.exact, r.disregard));
        }
        s
    }

    pub fn markdown(&self) -> String {
        let mut s = String::from("| stratum | dimension | disregard |\n|---|---|---|\n");
        for r in &self.rows {
            s.push_str(&format!("| {} | {} | {} |\n", r.name, r.dimension, if r.disregard { "yes" } else { "no" }));
        }
        s.push_str(&format!(
            "\nlower bound {}; at least {} components; component dimensions {:?}; at most one of top dimension: {}\n",
            self.lower_bound, self.components_at_least, self.component_dimensions, self.at_most_one_top_dimensional
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        assert_eq!(fibration_invariants(2, 1, 1), (2, 5));
        assert_eq!(fibration_invariants(1, 1, 1), (1, 3));
        assert_eq!(moduli_lower_bound(2, 5, 2), 12);
        let nu = HorikawaCounts::new().with(FibreKind::V, 0, 1);
        assert_eq!(horikawa_k2(1, 1, &nu), 5);
        assert_eq!(horikawa_k2(1, 1, &HorikawaCounts::new()), 4);
        assert_eq!(horikawa_k2(1, 1, &HorikawaCounts::new().with(FibreKind::II, 1, 1)), 6);
    }

    #[test]
    fn generic_case_i() {
        let a = a6_for_stratum(StratumLabel::I, &[]).unwrap();
        assert_eq!((a.h0_g1, a.h1_g1, a.h0_g2), (1, 0, 10));
        assert_eq!(a.h0, Bound::exact(9));
        assert_eq!(stratum_dimension(StratumLabel::I, &[]).unwrap().total(), Bound::at_most(13));
    }

    #[test]
    fn incompatible_relations_rejected() {
        assert!(a6_for_stratum(StratumLabel::I, &[[4, 0]]).is_err());
        assert!(a6_for_stratum(StratumLabel::IIIa, &[[2, 0]]).is_err());
    }
}
