//! Subspaces of `Q^N`, stored as primitive integer rows in echelon form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSpace {
    dim: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
        }
    }
    if g.is_zero() {
        return;
    }
    let lead_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if lead_negative {
        g = -g;
    }
    if g != BigInt::from(1) {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

impl QSpace {
    pub fn new(dim: usize) -> Self {
        QSpace { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows(dim: usize, rows: impl IntoIterator<Item = Vec<BigInt>>) -> Self {
        let mut s = Self::new(dim);
        for r in rows {
            s.insert(r);
        }
        s
    }

    pub fn full(dim: usize) -> Self {
        Self::from_rows(
            dim,
            (0..dim).map(|i| (0..dim).map(|j| BigInt::from(u8::from(i == j))).collect()),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        make_primitive(&mut v);
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let g = row[c].gcd(&v[c]);
            let a = &row[c] / &g;
            let b = &v[c] / &g;
            for (x, r) in v.iter_mut().zip(row) {
                *x = &a * &*x - &b * r;
            }
            make_primitive(&mut v);
        }
        v
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v.to_vec()).iter().all(Zero::is_zero)
    }

    /// Clears the entries above every pivot, keeping rows primitive. This
    /// keeps coefficients small when the space is rebuilt repeatedly.
    pub fn back_substitute(&mut self) {
        for i in (0..self.rows.len()).rev() {
            let c = self.pivots[i];
            let (upper, lower) = self.rows.split_at_mut(i);
            let pivot_row = &lower[0];
            for row in upper.iter_mut() {
                if row[c].is_zero() {
                    continue;
                }
                let g = pivot_row[c].gcd(&row[c]);
                let a = &pivot_row[c] / &g;
                let b = &row[c] / &g;
                for (x, r) in row.iter_mut().zip(pivot_row) {
                    *x = &a * &*x - &b * r;
                }
                make_primitive(row);
            }
        }
    }

    pub fn insert(&mut self, v: Vec<BigInt>) -> bool {
        let v = self.reduce(v);
        let Some(c) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let pos = self.pivots.partition_point(|&q| q < c);
        self.rows.insert(pos, v);
        self.pivots.insert(pos, c);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn back_substitution_keeps_the_span() {
        let mut s = QSpace::from_rows(3, vec![v(&[1, 5, 7]), v(&[0, 2, 3])]);
        let before = s.clone();
        s.back_substitute();
        assert_eq!(s.rows()[0], v(&[2, 0, -1]));
        for r in before.rows() {
            assert!(s.contains(r));
        }
    }

    #[test]
    fn rank_over_rationals() {
        let s = QSpace::from_rows(3, vec![v(&[2, 4, 6]), v(&[1, 2, 3]), v(&[0, 3, 1])]);
        assert_eq!(s.rank(), 2);
        assert!(s.contains(&v(&[1, 5, 4])));
        assert!(!s.contains(&v(&[0, 0, 1])));
        assert_eq!(QSpace::full(4).rank(), 4);
    }
}
