//! A symbolic stand-in for `Pic^0`: the group generated by `u = p - o`,
//! `v = tau - o` and two 2-torsion generators, modulo a lattice of relations
//! among `u` and `v`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::picard::{GroupElem, PicGroup};

/// `a u + b v`.
pub type Relation = [i64; 2];

/// Hermite normal form of a sublattice of `Z^2`: rows `(g, h)` and `(0, k)`
/// with `g > 0`, `k > 0`, `0 <= h < k`; absent rows are `None`/`0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationLattice {
    first: Option<(i64, i64)>,
    second: i64,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    ext_gcd(a, b).0
}

impl RelationLattice {
    pub fn zero() -> RelationLattice {
        RelationLattice::default()
    }

    pub fn generated_by(gens: &[Relation]) -> RelationLattice {
        let mut first: Option<[i64; 2]> = None;
        let mut second = 0i64;
        for &r in gens {
            let mut r = r;
            if let Some(f) = first {
                if r[0] != 0 {
                    // combine so that only one row keeps a nonzero first entry
                    let (g, x, y) = ext_gcd(f[0], r[0]);
                    let new_first = [g, x * f[1] + y * r[1]];
                    let (a, b) = (f[0] / g, r[0] / g);
                    // b*f - a*r has zero first entry
                    let rest = [0, b * f[1] - a * r[1]];
                    first = Some(new_first);
                    r = rest;
                }
            } else if r[0] != 0 {
                first = Some(if r[0] < 0 { [-r[0], -r[1]] } else { r });
                continue;
            }
            second = gcd(second, r[1]);
        }
        let first = first.map(|[g, h]| (g, if second > 0 { h.rem_euclid(second) } else { h }));
        RelationLattice { first, second }
    }

    pub fn rank(&self) -> usize {
        usize::from(self.first.is_some()) + usize::from(self.second > 0)
    }

    /// Canonical representative of `x` modulo the lattice.
    pub fn reduce(&self, x: Relation) -> Relation {
        let [mut a, mut b] = x;
        if let Some((g, h)) = self.first {
            let q = a.div_euclid(g);
            a -= q * g;
            b -= q * h;
        }
        if self.second > 0 {
            b = b.rem_euclid(self.second);
        }
        [a, b]
    }

    pub fn contains(&self, x: Relation) -> bool {
        self.reduce(x) == [0, 0]
    }

    /// Smallest `n > 0` with `n u` in the lattice.
    pub fn order_of_u(&self) -> Option<i64> {
        let (g, h) = self.first?;
        if self.second > 0 {
            Some(g * (self.second / gcd(h, self.second)))
        } else if h == 0 {
            Some(g)
        } else {
            None
        }
    }

    pub fn kills_u_multiple(&self, n: i64) -> bool {
        self.contains([n, 0])
    }

    pub fn with(&self, extra: &[Relation]) -> RelationLattice {
        let mut gens = self.generators();
        gens.extend_from_slice(extra);
        RelationLattice::generated_by(&gens)
    }

    pub fn generators(&self) -> Vec<Relation> {
        let mut out = Vec::new();
        if let Some((g, h)) = self.first {
            out.push([g, h]);
        }
        if self.second > 0 {
            out.push([0, self.second]);
        }
        out
    }
}

pub fn fmt_relation(r: Relation) -> String {
    let mut s = String::new();
    for (c, name) in r.iter().zip(["u", "v"]) {
        if *c == 0 {
            continue;
        }
        let sign = if *c < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = c.abs();
        s.push_str(sign);
        if mag != 1 {
            s.push_str(&mag.to_string());
        }
        s.push_str(name);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Parses `2u-2v`, `4u`, `-v`, ...
pub fn parse_relation(s: &str) -> Result<Relation> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Parse("empty relation".into()));
    }
    let mut out = [0i64; 2];
    let mut rest = t.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        let (coef, var) = term.split_at(term.len().saturating_sub(1));
        let idx = match var {
            "u" => 0,
            "v" => 1,
            _ => return Err(Error::Parse(format!("bad relation term `{term}` in `{s}`"))),
        };
        let c: i64 = if coef.is_empty() {
            1
        } else {
            coef.parse().map_err(|_| Error::Parse(format!("bad coefficient in `{s}`")))?
        };
        out[idx] += sign * c;
    }
    Ok(out)
}

/// An element `a u + b v + e1 t1 + e2 t2`, reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymPoint {
    pub uv: Relation,
    pub t: [u8; 2],
}

impl GroupElem for SymPoint {
    fn identity() -> SymPoint {
        SymPoint { uv: [0, 0], t: [0, 0] }
    }
}

impl SymPoint {
    pub fn has_torsion_part(&self) -> bool {
        self.t != [0, 0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationGroup {
    pub lattice: RelationLattice,
}

impl RelationGroup {
    pub fn new(lattice: RelationLattice) -> RelationGroup {
        RelationGroup { lattice }
    }

    pub fn elem(&self, a: i64, b: i64) -> SymPoint {
        SymPoint { uv: self.lattice.reduce([a, b]), t: [0, 0] }
    }

    fn normalize(&self, p: SymPoint) -> SymPoint {
        SymPoint { uv: self.lattice.reduce(p.uv), t: [p.t[0] % 2, p.t[1] % 2] }
    }
}

impl PicGroup for RelationGroup {
    type Elem = SymPoint;

    fn add(&self, a: &SymPoint, b: &SymPoint) -> SymPoint {
        self.normalize(SymPoint {
            uv: [a.uv[0] + b.uv[0], a.uv[1] + b.uv[1]],
            t: [(a.t[0] + b.t[0]) % 2, (a.t[1] + b.t[1]) % 2],
        })
    }

    fn neg(&self, a: &SymPoint) -> SymPoint {
        self.normalize(SymPoint { uv: [-a.uv[0], -a.uv[1]], t: a.t })
    }

    fn fmt_elem(&self, a: &SymPoint) -> String {
        let mut s = if a.uv == [0, 0] && a.has_torsion_part() { String::new() } else { fmt_relation(a.uv) };
        for (bit, name) in a.t.iter().zip(["t1", "t2"]) {
            if *bit == 1 {
                if !s.is_empty() {
                    s.push('+');
                }
                s.push_str(name);
            }
        }
        s
    }

    fn two_torsion(&self) -> Option<[SymPoint; 3]> {
        let t = |a, b| SymPoint { uv: [0, 0], t: [a, b] };
        Some([t(1, 0), t(0, 1), t(1, 1)])
    }
}

/// A list of relations in the `2u-2v,4u` syntax.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RelationList(pub Vec<Relation>);

impl FromStr for RelationList {
    type Err = Error;

    fn from_str(s: &str) -> Result<RelationList> {
        if s.trim().is_empty() {
            return Ok(RelationList::default());
        }
        s.split(',').map(parse_relation).collect::<Result<Vec<_>>>().map(RelationList)
    }
}

impl fmt::Display for RelationList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| fmt_relation(*r)).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_examples() {
        let l = RelationLattice::generated_by(&[[2, -2], [6, -2]]);
        assert_eq!(l.rank(), 2);
        assert!(l.contains([4, 0]));
        assert!(!l.contains([2, 0]));
        assert_eq!(l.order_of_u(), Some(4));
        let l = RelationLattice::generated_by(&[[2, -2]]);
        assert_eq!(l.order_of_u(), None);
        assert!(l.contains([-4, 4]));
        assert_eq!(l.reduce([3, 1]), [1, 3]);
    }

    #[test]
    fn relation_syntax_roundtrip() {
        for s in ["2u-2v", "4u", "-v", "6u-2v", "u+v"] {
            assert_eq!(fmt_relation(parse_relation(s).unwrap()), s);
        }
        assert!(parse_relation("2w").is_err());
    }
}
