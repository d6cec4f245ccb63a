//! Row spaces over `F_p`.

use serde::{Deserialize, Serialize};

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p-2) is the inverse
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// A subspace of `F_p^N` kept in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpSpace {
    p: u64,
    dim: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl FpSpace {
    pub fn new(p: u64, dim: usize) -> Self {
        FpSpace { p, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows(p: u64, dim: usize, rows: impl IntoIterator<Item = Vec<u64>>) -> Self {
        let mut s = Self::new(p, dim);
        for r in rows {
            s.insert(r);
        }
        s
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut v: Vec<u64> = v.iter().map(|x| x % p).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c];
            if f != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + (p - f) * r) % p;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        let p = self.p;
        let mut v = self.reduce(&v);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[c], p);
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        for row in self.rows.iter_mut() {
            let f = row[c];
            if f != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = (*x + (p - f) * r) % p;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < c);
        self.rows.insert(pos, v);
        self.pivots.insert(pos, c);
        true
    }

    pub fn is_subspace_of(&self, other: &FpSpace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Coordinates that carry no pivot; their unit vectors give a basis of the
    /// quotient.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.dim).filter(|c| self.pivots.binary_search(c).is_err()).collect()
    }
}

/// Rank of a matrix over `F_p`.
pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    let dim = rows.first().map_or(0, Vec::len);
    FpSpace::from_rows(p, dim, rows.iter().cloned()).rank()
}

/// A basis of `{x : x * m = 0}` for `m` with `rows.len()` rows.
pub fn left_kernel(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    // augment [m | I] and eliminate on the left block
    let augmented: Vec<Vec<u64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v: Vec<u64> = r.iter().map(|x| x % p).collect();
            v.extend((0..n).map(|j| u64::from(i == j)));
            v
        })
        .collect();
    let space = FpSpace::from_rows(p, width + n, augmented);
    space
        .rows()
        .iter()
        .zip(space.pivots())
        .filter(|(_, &c)| c >= width)
        .map(|(r, _)| r[width..].to_vec())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_membership() {
        let s = FpSpace::from_rows(3, 3, vec![vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 1]]);
        assert_eq!(s.rank(), 2);
        assert!(s.contains(&[1, 2, 5]));
        assert!(!s.contains(&[1, 0, 0]));
        assert_eq!(s.free_columns(), vec![1]);
    }

    #[test]
    fn left_kernel_annihilates() {
        let m = vec![vec![1, 1], vec![1, 0], vec![0, 1]];
        let k = left_kernel(&m, 2);
        assert_eq!(k.len(), 1);
        for x in &k {
            for c in 0..2 {
                let s: u64 = (0..3).map(|i| x[i] * m[i][c]).sum();
                assert_eq!(s % 2, 0);
            }
        }
    }
}
