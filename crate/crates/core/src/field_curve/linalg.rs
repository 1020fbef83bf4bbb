//! Dense linear algebra over a `Field`: rank, nullspace, solving.

use super::field::{Fe, Field};

pub type Matrix = Vec<Vec<Fe>>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(f: &Field, m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = f.inv(m[r][c]).expect("pivot is nonzero");
        for v in m[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c];
                for j in 0..cols {
                    let t = f.mul(factor, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    let mut c = m.clone();
    rref(f, &mut c).len()
}

/// Basis of `{v : m v = 0}` for an `r x n` matrix (`n` given explicitly so
/// that empty matrices are handled).
pub fn nullspace(f: &Field, m: &Matrix, n: usize) -> Vec<Vec<Fe>> {
    let mut c = m.clone();
    let pivots = rref(f, &mut c);
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); n];
            v[fc] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(c[row][fc]);
            }
            v
        })
        .collect()
}

/// Some solution of `m x = rhs`, if consistent.
pub fn solve(f: &Field, m: &Matrix, rhs: &[Fe]) -> Option<Vec<Fe>> {
    let n = m.first().map_or(0, |r| r.len());
    let mut aug: Matrix = m
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r = row.clone();
            r.push(b);
            r
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![f.zero(); n];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][n];
    }
    Some(x)
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn det(f: &Field, m: &Matrix) -> Fe {
    let n = m.len();
    let mut a = m.clone();
    let mut d = f.one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return f.zero();
        };
        if piv != c {
            a.swap(piv, c);
            d = f.neg(d);
        }
        d = f.mul(d, a[c][c]);
        let inv = f.inv(a[c][c]).expect("pivot is nonzero");
        for i in (c + 1)..n {
            let factor = f.mul(a[i][c], inv);
            if factor.is_zero() {
                continue;
            }
            for j in c..n {
                let t = f.mul(factor, a[c][j]);
                a[i][j] = f.sub(a[i][j], t);
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let f = Field::prime(7).unwrap();
        let e = |v: i64| f.from_i64(v);
        let m = vec![vec![e(1), e(2), e(3)], vec![e(2), e(4), e(6)]];
        assert_eq!(rank(&f, &m), 1);
        let ns = nullspace(&f, &m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s = (0..3).fold(f.zero(), |acc, j| f.add(acc, f.mul(m[0][j], v[j])));
            assert!(s.is_zero());
        }
        assert_eq!(det(&f, &vec![vec![e(1), e(2)], vec![e(3), e(4)]]), e(-2));
    }
}
