//! Pairs `(phi1, phi2)` in `Aut(V1) x Aut(V2)` compatible with
//! `sigma_2: S^2 V1 -> V2` in the case-V normal form, where
//! `V1 = O(o)^2` up to twist and `V2 = O(2o)^2 + O(2o + tau)`.
//!
//! Matrices act on column vectors: column `j` is the image of the `j`-th basis
//! vector. Compatibility is `phi2 * M = M * S^2(phi1)` with
//! `M = (1 0 0; 0 1 1; 0 0 f0)`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::Result;
use crate::field_curve::{linalg, Fe, Field};
use crate::strata_engine::{moduli_table, CASE_V_FIBRE_DIMENSION};

/// Polynomial in the parameters `a`, `c` and the formal section `f0`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct MPoly(BTreeMap<[u8; 3], u32>);

const VAR_A: usize = 0;
const VAR_C: usize = 1;
const VAR_F0: usize = 2;

impl MPoly {
    fn zero() -> MPoly {
        MPoly(BTreeMap::new())
    }

    fn constant(f: &Field, k: i64) -> MPoly {
        let v = f.from_i64(k).0[0];
        let mut m = BTreeMap::new();
        if v != 0 {
            m.insert([0, 0, 0], v);
        }
        MPoly(m)
    }

    fn var(i: usize) -> MPoly {
        let mut e = [0u8; 3];
        e[i] = 1;
        MPoly(BTreeMap::from([(e, 1)]))
    }

    fn add(&self, f: &Field, o: &MPoly) -> MPoly {
        let mut m = self.0.clone();
        for (e, &c) in &o.0 {
            let cur = m.get(e).copied().unwrap_or(0);
            let s = f.add(f.from_u64(cur as u64), f.from_u64(c as u64)).0[0];
            if s == 0 {
                m.remove(e);
            } else {
                m.insert(*e, s);
            }
        }
        MPoly(m)
    }

    fn neg(&self, f: &Field) -> MPoly {
        MPoly(self.0.iter().map(|(e, &c)| (*e, f.neg(f.from_u64(c as u64)).0[0])).collect())
    }

    fn mul(&self, f: &Field, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (e1, &c1) in &self.0 {
            for (e2, &c2) in &o.0 {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                let c = f.mul(f.from_u64(c1 as u64), f.from_u64(c2 as u64)).0[0];
                out = out.add(f, &MPoly(BTreeMap::from([(e, c)])));
            }
        }
        out
    }

    fn scale(&self, f: &Field, k: i64) -> MPoly {
        self.mul(f, &MPoly::constant(f, k))
    }
}

type PMat = [[MPoly; 3]; 3];

fn pmat_mul(f: &Field, a: &PMat, b: &PMat) -> PMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(MPoly::zero(), |s, k| s.add(f, &a[i][k].mul(f, &b[k][j]))))
    })
}

/// `M` with the formal `f0`.
fn sigma2_formal(f: &Field) -> PMat {
    let one = || MPoly::constant(f, 1);
    let z = MPoly::zero;
    [[one(), z(), z()], [z(), one(), one()], [z(), z(), MPoly::var(VAR_F0)]]
}

/// `S^2` of `(a b; c d)` in the basis `x0^2, x0 x1, x1^2`.
fn sym2_formal(f: &Field, a: &MPoly, b: &MPoly, c: &MPoly, d: &MPoly) -> PMat {
    let m = |x: &MPoly, y: &MPoly| x.mul(f, y);
    [
        [m(a, a), m(a, b), m(b, b)],
        [m(a, c).scale(f, 2), m(a, d).add(f, &m(b, c)), m(b, d).scale(f, 2)],
        [m(c, c), m(c, d), m(d, d)],
    ]
}

/// The two displayed families as `(phi1 entries (a, b, c, d), phi2)` in the
/// parameters `a`, `c`.
fn family_formal(f: &Field, which: usize) -> ([MPoly; 4], PMat) {
    let a = MPoly::var(VAR_A);
    let c = MPoly::var(VAR_C);
    let f0 = MPoly::var(VAR_F0);
    let z = MPoly::zero;
    let a2 = a.mul(f, &a);
    let ac = a.mul(f, &c);
    let c2 = c.mul(f, &c);
    let apc = a.add(f, &c);
    if which == 1 {
        let phi1 = [a.clone(), a.clone(), c.clone(), a.neg(f)];
        let phi2 = [
            [a2.clone(), a2.clone(), z()],
            [ac.scale(f, 2).add(f, &c2), a2.neg(f), z()],
            [c2.mul(f, &f0), ac.neg(f).mul(f, &f0), a.mul(f, &apc)],
        ];
        (phi1, phi2)
    } else {
        let phi1 = [a.clone(), z(), c.clone(), apc.clone()];
        let phi2 = [
            [a2.clone(), z(), z()],
            [ac.scale(f, 2).add(f, &c2), apc.mul(f, &apc), z()],
            [c2.mul(f, &f0), c.mul(f, &apc).mul(f, &f0), a.mul(f, &apc)],
        ];
        (phi1, phi2)
    }
}

fn commutes_formally(f: &Field, phi1: &[MPoly; 4], phi2: &PMat) -> bool {
    let m = sigma2_formal(f);
    let s = sym2_formal(f, &phi1[0], &phi1[1], &phi1[2], &phi1[3]);
    pmat_mul(f, phi2, &m) == pmat_mul(f, &m, &s)
}

/// Concrete pair: `phi1 = (a b; c d)`, `phi2` stored as the seven free
/// entries `b11 b12 b21 b22 b31 b32 b33` (the last row's first two entries
/// carry a factor `f0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub phi1: [u32; 4],
    pub phi2: [u32; 7],
}

fn family_pair(f: &Field, which: usize, a: Fe, c: Fe) -> Pair {
    let v = |x: Fe| x.0[0];
    let (a2, ac, c2, apc) = (f.square(a), f.mul(a, c), f.square(c), f.add(a, c));
    let two_ac_c2 = f.add(f.scale(ac, 2), c2);
    if which == 1 {
        Pair {
            phi1: [v(a), v(a), v(c), v(f.neg(a))],
            phi2: [v(a2), v(a2), v(two_ac_c2), v(f.neg(a2)), v(c2), v(f.neg(ac)), v(f.mul(a, apc))],
        }
    } else {
        Pair {
            phi1: [v(a), 0, v(c), v(apc)],
            phi2: [v(a2), 0, v(two_ac_c2), v(f.square(apc)), v(c2), v(f.mul(c, apc)), v(f.mul(a, apc))],
        }
    }
}

fn invertible(f: &Field, p: &Pair) -> bool {
    let e = |x: u32| f.from_u64(x as u64);
    let d1 = f.sub(f.mul(e(p.phi1[0]), e(p.phi1[3])), f.mul(e(p.phi1[1]), e(p.phi1[2])));
    let d2 = f.mul(e(p.phi2[6]), f.sub(f.mul(e(p.phi2[0]), e(p.phi2[3])), f.mul(e(p.phi2[1]), e(p.phi2[2]))));
    !d1.is_zero() && !d2.is_zero()
}

/// All `phi2` of the admissible shape with `phi2 M = M S^2(phi1)`, as an
/// affine solution space.
fn solve_phi2(f: &Field, phi1: [Fe; 4]) -> Vec<[Fe; 7]> {
    let [a, b, c, d] = phi1;
    let s = [
        [f.square(a), f.mul(a, b), f.square(b)],
        [f.scale(f.mul(a, c), 2), f.add(f.mul(a, d), f.mul(b, c)), f.scale(f.mul(b, d), 2)],
        [f.square(c), f.mul(c, d), f.square(d)],
    ];
    // Entries are polynomials in f0 of degree <= 1; unknown u sits at
    // (row, col) of phi2 with f0-degree deg.
    let slots: [(usize, usize, usize); 7] = [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0), (2, 0, 1), (2, 1, 1), (2, 2, 0)];
    // M as (row, col, f0-degree) -> 1.
    let m_entries: [(usize, usize, usize); 4] = [(0, 0, 0), (1, 1, 0), (1, 2, 0), (2, 2, 1)];
    let mut rows: linalg::Matrix = Vec::new();
    let mut rhs: Vec<Fe> = Vec::new();
    for r in 0..3 {
        for j in 0..3 {
            for deg in 0..3 {
                let mut row = vec![f.zero(); 7];
                for (u, &(pr, pc, pd)) in slots.iter().enumerate() {
                    if pr != r {
                        continue;
                    }
                    for &(mr, mc, md) in &m_entries {
                        if mr == pc && mc == j && pd + md == deg {
                            row[u] = f.add(row[u], f.one());
                        }
                    }
                }
                // (M S)[r][j] at this f0-degree
                let mut val = f.zero();
                for &(mr, mc, md) in &m_entries {
                    if mr == r && md == deg {
                        val = f.add(val, s[mc][j]);
                    }
                }
                rows.push(row);
                rhs.push(val);
            }
        }
    }
    let Some(x0) = linalg::solve(f, &rows, &rhs) else {
        return Vec::new();
    };
    let kernel = linalg::nullspace(f, &rows, 7);
    let mut out = Vec::new();
    let p = f.order();
    let total = p.pow(kernel.len() as u32);
    for mut idx in 0..total {
        let mut x = x0.clone();
        for v in &kernel {
            let t = f.from_u64(idx % p);
            idx /= p;
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi = f.add(*xi, f.mul(t, *vi));
            }
        }
        out.push([x[0], x[1], x[2], x[3], x[4], x[5], x[6]]);
    }
    out
}

#[derive(Clone, Debug)]
pub struct AutomorphismReport {
    pub p: u32,
    /// Formal commutation of each family, and of family 1 at `(a, c) = (1, 0)`.
    pub family_commutes: [bool; 2],
    pub example_commutes: bool,
    /// Scalars `(a id, a^2 id)` found in family 2 at `c = 0`.
    pub scalars_in_family_two: bool,
    pub invertible_phi1: usize,
    pub solutions: usize,
    pub family_pairs: usize,
    pub outside_families: Vec<Pair>,
    /// `(a, c) -> pair` is injective on each family.
    pub injective: bool,
    pub dim_z: i64,
    pub fibre_dimension: i64,
    pub stratum_dimensions: (i64, i64),
}

impl AutomorphismReport {
    pub fn agrees(&self) -> bool {
        self.family_commutes.iter().all(|&b| b)
            && self.example_commutes
            && self.outside_families.is_empty()
            && self.solutions == self.family_pairs
            && self.fibre_dimension == CASE_V_FIBRE_DIMENSION
    }

    pub fn json(&self) -> Value {
        json!({
            "p": self.p,
            "symbolic": {
                "family_1_commutes": self.family_commutes[0],
                "family_2_commutes": self.family_commutes[1],
                "family_1_at_a1_c0": self.example_commutes,
                "scalars_in_family_2": self.scalars_in_family_two,
            },
            "brute_force": {
                "invertible_phi1": self.invertible_phi1,
                "solutions": self.solutions,
                "family_pairs": self.family_pairs,
                "outside_families": self.outside_families.iter().map(|q| json!({"phi1": q.phi1, "phi2": q.phi2})).collect::<Vec<_>>(),
                "parametrization_injective": self.injective,
            },
            "dim_z": self.dim_z,
            "fibre_dimension": self.fibre_dimension,
            "stratum_dimensions": {"V,2": self.stratum_dimensions.0, "V,gen": self.stratum_dimensions.1},
            "agrees": self.agrees(),
        })
    }
}

pub fn automorphism_pairs(p: u32) -> Result<AutomorphismReport> {
    let f = Field::prime(p)?;
    let family_commutes = [1, 2].map(|w| {
        let (phi1, phi2) = family_formal(&f, w);
        commutes_formally(&f, &phi1, &phi2)
    });
    let example_commutes = {
        let one = MPoly::constant(&f, 1);
        let phi1 = [one.clone(), one.clone(), MPoly::zero(), one.neg(&f)];
        let (_, phi2) = family_formal(&f, 1);
        // substitute a = 1, c = 0 by evaluating the formal entries
        let sub = |m: &MPoly| {
            m.0.iter().filter(|(e, _)| e[VAR_C] == 0).fold(MPoly::zero(), |s, (e, &c)| {
                s.add(&f, &MPoly(BTreeMap::from([([0, 0, e[VAR_F0]], c)])))
            })
        };
        let phi2 = phi2.each_ref().map(|r| r.each_ref().map(sub));
        commutes_formally(&f, &phi1, &phi2)
    };

    let mut family: BTreeMap<Pair, Vec<(usize, u32, u32)>> = BTreeMap::new();
    for w in [1, 2] {
        for a in f.elements() {
            for c in f.elements() {
                let q = family_pair(&f, w, a, c);
                if invertible(&f, &q) {
                    family.entry(q).or_default().push((w, a.0[0], c.0[0]));
                }
            }
        }
    }
    let injective = family.values().all(|v| {
        let per: BTreeSet<usize> = v.iter().map(|(w, _, _)| *w).collect();
        per.len() == v.len()
    });
    let scalars_in_family_two = f.elements().filter(|a| !a.is_zero()).all(|a| {
        let v = |x: Fe| x.0[0];
        let a2 = v(f.square(a));
        let q = Pair { phi1: [v(a), 0, 0, v(a)], phi2: [a2, 0, 0, a2, 0, 0, a2] };
        family.get(&q).is_some_and(|ws| ws.iter().any(|(w, _, c)| *w == 2 && *c == 0))
    });

    let mut invertible_phi1 = 0;
    let mut found: BTreeSet<Pair> = BTreeSet::new();
    for a in f.elements() {
        for b in f.elements() {
            for c in f.elements() {
                for d in f.elements() {
                    if f.sub(f.mul(a, d), f.mul(b, c)).is_zero() {
                        continue;
                    }
                    invertible_phi1 += 1;
                    for x in solve_phi2(&f, [a, b, c, d]) {
                        let q = Pair { phi1: [a, b, c, d].map(|v| v.0[0]), phi2: x.map(|v| v.0[0]) };
                        if invertible(&f, &q) {
                            found.insert(q);
                        }
                    }
                }
            }
        }
    }
    let outside_families: Vec<Pair> = found.iter().filter(|q| !family.contains_key(q)).copied().collect();
    // Z is covered by the images of two injective maps from opens of A^2.
    let dim_z = if outside_families.is_empty() && injective { 2 } else { -1 };
    let fibre_dimension = dim_z - 1;
    let table = moduli_table()?;
    let dim_of = |name: &str| table.row(name).map_or(-1, |r| r.dimension.value);
    Ok(AutomorphismReport {
        p,
        family_commutes,
        example_commutes,
        scalars_in_family_two,
        invertible_phi1,
        solutions: found.len(),
        family_pairs: family.len(),
        outside_families,
        injective,
        dim_z,
        fibre_dimension,
        stratum_dimensions: (dim_of("V,2"), dim_of("V,gen")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formal_polynomials_behave() {
        let f = Field::prime(7).unwrap();
        let a = MPoly::var(VAR_A);
        let c = MPoly::var(VAR_C);
        let lhs = a.add(&f, &c).mul(&f, &a.add(&f, &c));
        let rhs = a.mul(&f, &a).add(&f, &a.mul(&f, &c).scale(&f, 2)).add(&f, &c.mul(&f, &c));
        assert_eq!(lhs, rhs);
        assert_eq!(a.add(&f, &a.neg(&f)), MPoly::zero());
    }

    #[test]
    fn a_wrong_family_is_rejected() {
        let f = Field::prime(5).unwrap();
        let (phi1, mut phi2) = family_formal(&f, 1);
        phi2[2][2] = MPoly::var(VAR_A);
        assert!(!commutes_formally(&f, &phi1, &phi2));
    }
}
