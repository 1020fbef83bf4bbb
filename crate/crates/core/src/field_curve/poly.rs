//! Dense univariate polynomials over a `Field`, low degree first.
//!
//! Polynomials are plain `Vec<Fe>` kept trimmed (no trailing zeros); the
//! zero polynomial is the empty vector.

use rand::Rng;

use super::field::{Fe, Field};

pub type Poly = Vec<Fe>;

pub fn trim(mut a: Poly) -> Poly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

/// Degree, with `-1` for the zero polynomial.
pub fn deg(a: &[Fe]) -> i64 {
    a.iter().rposition(|c| !c.is_zero()).map_or(-1, |d| d as i64)
}

pub fn constant(_f: &Field, c: Fe) -> Poly {
    trim(vec![c])
}

pub fn monomial(f: &Field, c: Fe, d: usize) -> Poly {
    let mut v = vec![f.zero(); d + 1];
    v[d] = c;
    trim(v)
}

/// `x - r`.
pub fn linear(f: &Field, r: Fe) -> Poly {
    vec![f.neg(r), f.one()]
}

pub fn add(f: &Field, a: &[Fe], b: &[Fe]) -> Poly {
    let n = a.len().max(b.len());
    let z = f.zero();
    trim((0..n).map(|i| f.add(*a.get(i).unwrap_or(&z), *b.get(i).unwrap_or(&z))).collect())
}

pub fn sub(f: &Field, a: &[Fe], b: &[Fe]) -> Poly {
    let n = a.len().max(b.len());
    let z = f.zero();
    trim((0..n).map(|i| f.sub(*a.get(i).unwrap_or(&z), *b.get(i).unwrap_or(&z))).collect())
}

pub fn neg(f: &Field, a: &[Fe]) -> Poly {
    a.iter().map(|&c| f.neg(c)).collect()
}

pub fn scale(f: &Field, a: &[Fe], s: Fe) -> Poly {
    if s.is_zero() {
        return Vec::new();
    }
    trim(a.iter().map(|&c| f.mul(c, s)).collect())
}

pub fn mul(f: &Field, a: &[Fe], b: &[Fe]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

pub fn pow(f: &Field, a: &[Fe], e: u32) -> Poly {
    let mut acc = constant(f, f.one());
    for _ in 0..e {
        acc = mul(f, &acc, a);
    }
    acc
}

/// Quotient and remainder. Panics on division by zero.
pub fn divrem(f: &Field, a: &[Fe], b: &[Fe]) -> (Poly, Poly) {
    let db = deg(b);
    assert!(db >= 0, "polynomial division by zero");
    let db = db as usize;
    let lead_inv = f.inv(b[db]).expect("leading coefficient is nonzero");
    let mut r: Poly = trim(a.to_vec());
    if (r.len() as i64 - 1) < db as i64 {
        return (Vec::new(), r);
    }
    let mut q = vec![f.zero(); r.len() - db];
    while deg(&r) >= db as i64 {
        let dr = deg(&r) as usize;
        let c = f.mul(r[dr], lead_inv);
        let shift = dr - db;
        q[shift] = c;
        for i in 0..=db {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, b[i]));
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(f: &Field, a: &[Fe], b: &[Fe]) -> Poly {
    divrem(f, a, b).1
}

pub fn monic(f: &Field, a: &[Fe]) -> Poly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(f, a, f.inv(l).expect("trimmed polynomial has nonzero lead")),
    }
}

pub fn gcd(f: &Field, a: &[Fe], b: &[Fe]) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

pub fn eval(f: &Field, a: &[Fe], x: Fe) -> Fe {
    a.iter().rev().fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
}

pub fn derivative(f: &Field, a: &[Fe]) -> Poly {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, f.from_u64(i as u64))).collect())
}

/// `base^e mod m`.
pub fn powmod(f: &Field, base: &[Fe], mut e: u64, m: &[Fe]) -> Poly {
    let mut acc = rem(f, &constant(f, f.one()), m);
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(f, &mul(f, &acc, &b), m);
        }
        b = rem(f, &mul(f, &b, &b), m);
        e >>= 1;
    }
    acc
}

fn x_poly(f: &Field) -> Poly {
    vec![f.zero(), f.one()]
}

/// Ben-Or irreducibility test over the prime field `f`.
pub fn is_irreducible(f: &Field, a: &[Fe]) -> bool {
    let d = deg(a);
    if d < 1 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let m = monic(f, a);
    let x = x_poly(f);
    let mut h = x.clone();
    for _ in 1..=(d as usize / 2) {
        h = powmod(f, &h, f.order(), &m);
        let g = gcd(f, &m, &sub(f, &h, &x));
        if deg(&g) > 0 {
            return false;
        }
    }
    true
}

/// Distinct roots of `a` in `f`, sorted by enumeration index.
/// Deterministic: the equal-degree splitting uses a fixed internal seed.
pub fn roots(f: &Field, a: &[Fe]) -> Vec<Fe> {
    let a = monic(f, a);
    if deg(&a) < 1 {
        return Vec::new();
    }
    let x = x_poly(f);
    let xq = powmod(f, &x, f.order(), &a);
    let g = gcd(f, &a, &sub(f, &xq, &x));
    let mut out = Vec::new();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0x5eed);
    split_linear(f, &g, &mut out, &mut rng);
    out.sort_by_key(|r| f.index(*r));
    out
}

fn split_linear<R: Rng>(f: &Field, g: &[Fe], out: &mut Vec<Fe>, rng: &mut R) {
    let d = deg(g);
    if d < 1 {
        return;
    }
    if d == 1 {
        out.push(f.neg(f.div(g[0], g[1]).expect("linear factor")));
        return;
    }
    let e = (f.order() - 1) / 2;
    loop {
        let shift = f.random(rng);
        let base = vec![shift, f.one()];
        let h = powmod(f, &base, e, g);
        let cand = gcd(f, g, &sub(f, &h, &constant(f, f.one())));
        let dc = deg(&cand);
        if dc > 0 && dc < d {
            let (q, _) = divrem(f, g, &cand);
            split_linear(f, &cand, out, rng);
            split_linear(f, &monic(f, &q), out, rng);
            return;
        }
    }
}

/// Multiplicity of the root `r` in `a` (`a` nonzero).
pub fn root_multiplicity(f: &Field, a: &[Fe], r: Fe) -> u32 {
    let lin = linear(f, r);
    let mut cur = trim(a.to_vec());
    let mut m = 0;
    while !cur.is_empty() {
        let (q, rr) = divrem(f, &cur, &lin);
        if !rr.is_empty() {
            break;
        }
        cur = q;
        m += 1;
    }
    m
}

pub fn fmt_poly(f: &Field, a: &[Fe], var: &str) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (i, &c) in a.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = f.fmt_elem(c);
        terms.push(match i {
            0 => cs,
            1 if cs == "1" => var.to_string(),
            1 => format!("{cs}*{var}"),
            _ if cs == "1" => format!("{var}^{i}"),
            _ => format!("{cs}*{var}^{i}"),
        });
    }
    terms.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f: &Field, cs: &[i64]) -> Poly {
        trim(cs.iter().map(|&c| f.from_i64(c)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let f = Field::prime(11).unwrap();
        let a = p(&f, &[3, 0, 5, 1, 7]);
        let b = p(&f, &[2, 1, 1]);
        let (q, r) = divrem(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
        assert!(deg(&r) < deg(&b));
    }

    #[test]
    fn roots_of_split_cubic() {
        let f = Field::prime(7).unwrap();
        // x^3 - x
        let a = p(&f, &[0, -1, 0, 1]);
        let r: Vec<u32> = roots(&f, &a).iter().map(|e| e.base()).collect();
        assert_eq!(r, vec![0, 1, 6]);
    }

    #[test]
    fn roots_in_extension_field() {
        let f = Field::extension_of_degree(7, 2).unwrap();
        // x^2 + 1 has no roots mod 7 but splits over F_49
        let a = p(&f, &[1, 0, 1]);
        let rs = roots(&f, &a);
        assert_eq!(rs.len(), 2);
        for r in rs {
            assert!(eval(&f, &a, r).is_zero());
        }
    }

    #[test]
    fn irreducibility_counts_match_necklace_formula() {
        // monic irreducible quadratics over F_5: (25 - 5) / 2 = 10
        let f = Field::prime(5).unwrap();
        let mut n = 0;
        for c0 in 0..5 {
            for c1 in 0..5 {
                if is_irreducible(&f, &p(&f, &[c0, c1, 1])) {
                    n += 1;
                }
            }
        }
        assert_eq!(n, 10);
    }

    #[test]
    fn multiplicity() {
        let f = Field::prime(13).unwrap();
        let a = mul(&f, &pow(&f, &linear(&f, f.from_i64(2)), 3), &linear(&f, f.from_i64(5)));
        assert_eq!(root_multiplicity(&f, &a, f.from_i64(2)), 3);
        assert_eq!(root_multiplicity(&f, &a, f.from_i64(5)), 1);
        assert_eq!(root_multiplicity(&f, &a, f.from_i64(6)), 0);
    }
}
