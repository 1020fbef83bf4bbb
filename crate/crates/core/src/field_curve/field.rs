//! Prime fields and their small extensions `F_{p^k}`, `k <= 6`.
//!
//! An element is a coefficient vector in the power basis of `F_p[t]/(m(t))`.
//! Prime-field constants sit in the first slot, so an `Fe` built over `F_p`
//! is a valid element of every extension of the same characteristic.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_EXT: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(pub [u32; MAX_EXT]);

impl Fe {
    pub const ZERO: Fe = Fe([0; MAX_EXT]);

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Prime-field component (the whole value when `k = 1`).
    pub fn base(&self) -> u32 {
        self.0[0]
    }

    pub fn is_in_prime_field(&self) -> bool {
        self.0[1..].iter().all(|&c| c == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
    k: usize,
    /// Monic modulus, low degree first; `modulus[k] == 1`.
    modulus: [u32; MAX_EXT + 1],
    nonresidue: Fe,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

impl Field {
    pub fn prime(p: u32) -> Result<Field> {
        if !(5..=65521).contains(&p) || !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not a prime >= 5 in range")));
        }
        let mut modulus = [0; MAX_EXT + 1];
        modulus[1] = 1;
        let mut f = Field { p, k: 1, modulus, nonresidue: Fe::ZERO };
        f.nonresidue = f.find_nonresidue();
        Ok(f)
    }

    /// Extension with an explicit monic modulus `c0 + c1 t + ... + t^k`.
    pub fn extension(p: u32, coeffs: &[u32]) -> Result<Field> {
        let base = Field::prime(p)?;
        let k = coeffs.len().saturating_sub(1);
        if k == 0 || k > MAX_EXT {
            return Err(Error::Domain(format!("extension degree {k} outside 1..=6")));
        }
        if coeffs[k] % p != 1 {
            return Err(Error::Domain("modulus must be monic".into()));
        }
        let poly: Vec<Fe> = coeffs.iter().map(|&c| base.from_u64(c as u64)).collect();
        if !super::poly::is_irreducible(&base, &poly) {
            return Err(Error::Domain(format!("modulus {coeffs:?} is reducible mod {p}")));
        }
        Ok(base.with_modulus(coeffs))
    }

    fn with_modulus(&self, coeffs: &[u32]) -> Field {
        let k = coeffs.len() - 1;
        let mut modulus = [0; MAX_EXT + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            modulus[i] = c % self.p;
        }
        let mut f = Field { p: self.p, k, modulus, nonresidue: Fe::ZERO };
        f.nonresidue = f.find_nonresidue();
        f
    }

    /// Degree-`k` extension with the lexicographically first irreducible
    /// monic modulus. Deterministic.
    pub fn extension_of_degree(p: u32, k: usize) -> Result<Field> {
        let base = Field::prime(p)?;
        if k == 1 {
            return Ok(base);
        }
        if k > MAX_EXT {
            return Err(Error::Domain(format!("extension degree {k} exceeds {MAX_EXT}")));
        }
        let total = (p as u64).pow(k as u32);
        for idx in 0..total {
            let mut coeffs = vec![0u32; k + 1];
            let mut r = idx;
            for c in coeffs.iter_mut().take(k) {
                *c = (r % p as u64) as u32;
                r /= p as u64;
            }
            coeffs[k] = 1;
            if coeffs[0] == 0 {
                continue;
            }
            let poly: Vec<Fe> = coeffs.iter().map(|&c| base.from_u64(c as u64)).collect();
            if super::poly::is_irreducible(&base, &poly) {
                return Ok(base.with_modulus(&coeffs));
            }
        }
        Err(Error::Domain(format!("no irreducible polynomial of degree {k} mod {p}")))
    }

    /// Parses "p" or "p:k:c0,...,ck".
    pub fn parse_spec(s: &str) -> Result<Field> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<u32> {
            t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad integer '{t}' in '{s}'")))
        };
        match parts.as_slice() {
            [p] => Field::prime(num(p)?),
            [p, k, cs] => {
                let k = num(k)? as usize;
                let coeffs = cs.split(',').map(num).collect::<Result<Vec<_>>>()?;
                if coeffs.len() != k + 1 {
                    return Err(Error::Parse(format!("expected {} coefficients in '{s}'", k + 1)));
                }
                Field::extension(num(p)?, &coeffs)
            }
            _ => Err(Error::Parse(format!("bad field spec '{s}'"))),
        }
    }

    pub fn spec(&self) -> String {
        if self.k == 1 {
            return self.p.to_string();
        }
        let cs: Vec<String> = self.modulus[..=self.k].iter().map(|c| c.to_string()).collect();
        format!("{}:{}:{}", self.p, self.k, cs.join(","))
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k as u32)
    }

    pub fn prime_subfield(&self) -> Field {
        Field::prime(self.p).expect("characteristic already validated")
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        let mut c = [0; MAX_EXT];
        c[0] = 1;
        Fe(c)
    }

    pub fn from_u64(&self, v: u64) -> Fe {
        let mut c = [0; MAX_EXT];
        c[0] = (v % self.p as u64) as u32;
        Fe(c)
    }

    pub fn from_i64(&self, v: i64) -> Fe {
        let p = self.p as i64;
        let mut c = [0; MAX_EXT];
        c[0] = v.rem_euclid(p) as u32;
        Fe(c)
    }

    /// Representative of a prime-field element in `(-p/2, p/2]`.
    pub fn signed(&self, a: Fe) -> i64 {
        let v = a.0[0] as i64;
        if v > self.p as i64 / 2 {
            v - self.p as i64
        } else {
            v
        }
    }

    /// The generator `t` of the power basis (only meaningful for `k > 1`).
    pub fn gen(&self) -> Fe {
        if self.k == 1 {
            return self.zero();
        }
        let mut c = [0; MAX_EXT];
        c[1] = 1;
        Fe(c)
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let mut c = [0; MAX_EXT];
        for i in 0..self.k {
            let s = a.0[i] + b.0[i];
            c[i] = if s >= self.p { s - self.p } else { s };
        }
        Fe(c)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        let mut c = [0; MAX_EXT];
        for i in 0..self.k {
            c[i] = if a.0[i] >= b.0[i] { a.0[i] - b.0[i] } else { a.0[i] + self.p - b.0[i] };
        }
        Fe(c)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        self.sub(Fe::ZERO, a)
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p;
        if self.k == 1 {
            let mut c = [0; MAX_EXT];
            c[0] = mulmod(a.0[0], b.0[0], p);
            return Fe(c);
        }
        let k = self.k;
        let mut prod = [0u64; 2 * MAX_EXT];
        for i in 0..k {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + a.0[i] as u64 * b.0[j] as u64) % p as u64;
            }
        }
        for d in (k..2 * k - 1).rev() {
            let top = prod[d];
            if top == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..k {
                let m = self.modulus[i] as u64;
                prod[d - k + i] = (prod[d - k + i] + (p as u64 - top) * m) % p as u64;
            }
        }
        let mut c = [0; MAX_EXT];
        for i in 0..k {
            c[i] = prod[i] as u32;
        }
        Fe(c)
    }

    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn scale(&self, a: Fe, s: i64) -> Fe {
        self.mul(a, self.from_i64(s))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn is_square(&self, a: Fe) -> bool {
        a.is_zero() || self.pow(a, (self.order() - 1) / 2) == self.one()
    }

    fn find_nonresidue(&self) -> Fe {
        let q = self.order();
        (2..q)
            .map(|i| self.element(i))
            .find(|&z| self.pow(z, (q - 1) / 2) != self.one())
            .expect("every field of odd order has a non-residue")
    }

    /// Tonelli–Shanks square root; `None` for non-squares.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return Some(a);
        }
        if !self.is_square(a) {
            return None;
        }
        let q = self.order();
        let mut s = 0u32;
        let mut t = q - 1;
        while t.is_multiple_of(2) {
            t /= 2;
            s += 1;
        }
        let mut m = s;
        let mut c = self.pow(self.nonresidue, t);
        let mut r = self.pow(a, t.div_ceil(2));
        let mut tt = self.pow(a, t);
        let one = self.one();
        while tt != one {
            let mut i = 0;
            let mut probe = tt;
            while probe != one {
                probe = self.square(probe);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.square(b);
            }
            m = i;
            c = self.square(b);
            tt = self.mul(tt, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// A square root of `-1`, if it exists in this field.
    pub fn sqrt_minus_one(&self) -> Option<Fe> {
        self.sqrt(self.neg(self.one()))
    }

    /// Enumeration index: base-`p` digits of the coefficient vector.
    pub fn index(&self, a: Fe) -> u64 {
        let mut v = 0u64;
        for i in (0..self.k).rev() {
            v = v * self.p as u64 + a.0[i] as u64;
        }
        v
    }

    pub fn element(&self, mut idx: u64) -> Fe {
        let mut c = [0; MAX_EXT];
        for slot in c.iter_mut().take(self.k) {
            *slot = (idx % self.p as u64) as u32;
            idx /= self.p as u64;
        }
        Fe(c)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn random<R: rand::Rng>(&self, rng: &mut R) -> Fe {
        self.element(rng.gen_range(0..self.order()))
    }

    pub fn random_nonzero<R: rand::Rng>(&self, rng: &mut R) -> Fe {
        self.element(rng.gen_range(1..self.order()))
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p as u64)
    }

    pub fn fmt_elem(&self, a: Fe) -> String {
        if self.k == 1 || a.is_in_prime_field() {
            return a.0[0].to_string();
        }
        let cs: Vec<String> = a.0[..self.k].iter().map(|c| c.to_string()).collect();
        format!("[{}]", cs.join(","))
    }

    pub fn json_elem(&self, a: Fe) -> serde_json::Value {
        if self.k == 1 || a.is_in_prime_field() {
            serde_json::Value::from(a.0[0])
        } else {
            serde_json::Value::from(a.0[..self.k].to_vec())
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_in_prime_field() {
        let f = Field::prime(13).unwrap();
        for a in f.elements().skip(1) {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn sqrt_roundtrip_in_extension() {
        let f = Field::extension_of_degree(7, 2).unwrap();
        assert_eq!(f.order(), 49);
        let mut squares = 0;
        for a in f.elements() {
            if let Some(r) = f.sqrt(a) {
                assert_eq!(f.square(r), a);
                squares += 1;
            }
        }
        assert_eq!(squares, 25);
    }

    #[test]
    fn spec_roundtrip() {
        let f = Field::extension_of_degree(5, 3).unwrap();
        assert_eq!(Field::parse_spec(&f.spec()).unwrap(), f);
        assert!(Field::parse_spec("5:2:2,0,1").is_ok());
        assert!(Field::parse_spec("5:2:1,0,1").is_err());
        assert!(Field::prime(4).is_err());
    }

    #[test]
    fn minus_one_root_exists_iff_p_is_1_mod_4() {
        for p in [5u32, 7, 13, 19, 29, 31] {
            let f = Field::prime(p).unwrap();
            assert_eq!(f.sqrt_minus_one().is_some(), p % 4 == 1, "p = {p}");
        }
    }
}
