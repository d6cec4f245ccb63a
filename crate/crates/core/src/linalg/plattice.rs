//! Lattices over the p-local integers `Z_(p)`.
//!
//! Integers prime to `p` are units, so rows may be rescaled by them freely. A
//! lattice is kept as an echelon basis whose pivot entries are `p^v * unit`.
//! Arithmetic runs on `i128` and moves to `BigInt` the first time an
//! operation would overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub(crate) trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn sub(&self, other: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, other: &Self) -> Self;
    fn pow(p: u64, e: u32) -> Option<Self>;
    /// `(v, u)` with `self = p^v * u`, `u` prime to `p`. Requires nonzero.
    fn split(&self, p: u64) -> (u32, Self);
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128().filter(|v| v.unsigned_abs() < (1u128 << 100))
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn pow(p: u64, e: u32) -> Option<Self> {
        (p as i128).checked_pow(e)
    }
    fn split(&self, p: u64) -> (u32, Self) {
        let p = p as i128;
        let mut u = *self;
        let mut v = 0;
        while u % p == 0 {
            u /= p;
            v += 1;
        }
        (v, u)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn pow(p: u64, e: u32) -> Option<Self> {
        Some(num_traits::pow(BigInt::from(p), e as usize))
    }
    fn split(&self, p: u64) -> (u32, Self) {
        let pb = BigInt::from(p);
        let mut u = self.clone();
        let mut v = 0;
        loop {
            let (q, r) = u.div_rem(&pb);
            if !Zero::is_zero(&r) {
                break;
            }
            u = q;
            v += 1;
        }
        (v, u)
    }
}

/// Divides `v` by the prime-to-p part of its content.
fn normalize<T: Scalar>(v: &mut [T], p: u64) {
    let mut g = T::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
        }
    }
    if g.is_zero() {
        return;
    }
    let (_, unit) = g.split(p);
    let one = T::pow(p, 0).expect("one");
    if unit != one {
        for x in v.iter_mut() {
            *x = x.div_exact(&unit);
        }
    }
}

/// `a * x - b * p^e * y` on the entries from `start` on.
fn combine<T: Scalar>(a: &T, x: &[T], b: &T, e: u32, y: &[T], start: usize, p: u64) -> Option<Vec<T>> {
    let scale = b.mul(&T::pow(p, e)?)?;
    let mut out = x.to_vec();
    for c in start..x.len() {
        let left = a.mul(&x[c])?;
        let right = scale.mul(&y[c])?;
        out[c] = left.sub(&right)?;
    }
    Some(out)
}

#[derive(Clone, Debug)]
struct Echelon<T> {
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
    /// `(valuation, unit)` of each pivot entry
    pivot_data: Vec<(u32, T)>,
}

struct Change<T> {
    replaced: Vec<(usize, Vec<T>)>,
    inserted: Option<(usize, Vec<T>)>,
}

impl<T: Scalar> Echelon<T> {
    fn new() -> Self {
        Echelon { rows: Vec::new(), pivots: Vec::new(), pivot_data: Vec::new() }
    }

    /// Plans the insertion of `v` without touching `self`; `None` on overflow.
    fn plan(&self, mut v: Vec<T>, p: u64) -> Option<Change<T>> {
        normalize(&mut v, p);
        let mut replaced = Vec::new();
        let mut i = 0;
        loop {
            let Some(c) = v.iter().position(|x| !x.is_zero()) else {
                return Some(Change { replaced, inserted: None });
            };
            while i < self.pivots.len() && self.pivots[i] < c {
                i += 1;
            }
            if i == self.pivots.len() || self.pivots[i] != c {
                return Some(Change { replaced, inserted: Some((i, v)) });
            }
            let (vi, ui) = &self.pivot_data[i];
            let (w, uw) = v[c].split(p);
            let row = &self.rows[i];
            if w >= *vi {
                v = combine(ui, &v, &uw, w - vi, row, c, p)?;
            } else {
                let old = combine(&uw, row, ui, vi - w, &v, c, p)?;
                replaced.push((i, v));
                v = old;
            }
            normalize(&mut v, p);
            i += 1;
        }
    }

    fn apply(&mut self, change: Change<T>, p: u64) -> bool {
        for (i, row) in change.replaced {
            let c = self.pivots[i];
            self.pivot_data[i] = row[c].split(p);
            self.rows[i] = row;
        }
        match change.inserted {
            Some((pos, row)) => {
                let c = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
                self.pivot_data.insert(pos, row[c].split(p));
                self.pivots.insert(pos, c);
                self.rows.insert(pos, row);
                true
            }
            None => false,
        }
    }

    /// Reduces `v` against the basis; `Some(true)` iff it lies in the lattice.
    fn contains(&self, mut v: Vec<T>, p: u64) -> Option<bool> {
        for (i, &c) in self.pivots.iter().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            if v[..c].iter().any(|x| !x.is_zero()) {
                return Some(false);
            }
            let (vi, ui) = &self.pivot_data[i];
            let (w, uw) = v[c].split(p);
            if w < *vi {
                return Some(false);
            }
            v = combine(ui, &v, &uw, w - vi, &self.rows[i], c, p)?;
            normalize(&mut v, p);
        }
        Some(v.iter().all(T::is_zero))
    }

    fn to_big(&self) -> Echelon<BigInt> {
        Echelon {
            rows: self.rows.iter().map(|r| r.iter().map(T::to_big).collect()).collect(),
            pivots: self.pivots.clone(),
            pivot_data: self.pivot_data.iter().map(|(v, u)| (*v, u.to_big())).collect(),
        }
    }
}

/// Valuations of the elementary divisors of the row space of `m`.
fn smith_valuations<T: Scalar>(m: &[Vec<T>], p: u64) -> Option<Vec<u32>> {
    let mut a: Vec<Vec<T>> = m.to_vec();
    let r = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..r.min(n) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() {
                    let (v, _) = x.split(p);
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, bi, bj)) = best else { break };
        a.swap(t, bi);
        if bj != t {
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
        }
        let (_, u) = a[t][t].split(p);
        let pivot_row = a[t].clone();
        for row in a.iter_mut().skip(t + 1) {
            if row[t].is_zero() {
                continue;
            }
            let (w, uw) = row[t].split(p);
            *row = combine(&u, row, &uw, w - v, &pivot_row, t, p)?;
            normalize(row, p);
        }
        out.push(v);
    }
    Some(out)
}

#[derive(Clone, Debug)]
enum Store {
    Small(Echelon<i128>),
    Big(Echelon<BigInt>),
}

/// A finitely generated submodule of `Z_(p)^N`.
#[derive(Clone, Debug)]
pub struct PLattice {
    p: u64,
    dim: usize,
    store: Store,
}

fn to_small(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(i128::from_big).collect()
}

impl PLattice {
    pub fn new(p: u64, dim: usize) -> Self {
        PLattice { p, dim, store: Store::Small(Echelon::new()) }
    }

    pub fn from_rows<'a>(p: u64, dim: usize, rows: impl IntoIterator<Item = &'a [BigInt]>) -> Self {
        let mut l = Self::new(p, dim);
        for r in rows {
            l.insert(r);
        }
        l
    }

    /// The whole module `Z_(p)^N`.
    pub fn full(p: u64, dim: usize) -> Self {
        let mut l = Self::new(p, dim);
        for i in 0..dim {
            let mut v = vec![BigInt::from(0); dim];
            v[i] = BigInt::one();
            l.insert(&v);
        }
        l
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Rank over `Z_(p)`, equal to the dimension of the `Q`-span.
    pub fn rank(&self) -> usize {
        match &self.store {
            Store::Small(e) => e.rows.len(),
            Store::Big(e) => e.rows.len(),
        }
    }

    pub fn pivots(&self) -> &[usize] {
        match &self.store {
            Store::Small(e) => &e.pivots,
            Store::Big(e) => &e.pivots,
        }
    }

    pub fn basis(&self) -> Vec<Vec<BigInt>> {
        match &self.store {
            Store::Small(e) => e.rows.iter().map(|r| r.iter().map(|x| x.to_big()).collect()).collect(),
            Store::Big(e) => e.rows.clone(),
        }
    }

    fn upgrade(&mut self) {
        if let Store::Small(e) = &self.store {
            self.store = Store::Big(e.to_big());
        }
    }

    /// Adds a generator; returns whether the lattice changed.
    pub fn insert(&mut self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let p = self.p;
        if let Store::Small(e) = &mut self.store {
            if let Some(small) = to_small(v) {
                if let Some(change) = e.plan(small, p) {
                    return grew(e, change, p);
                }
            }
            self.upgrade();
        }
        match &mut self.store {
            Store::Big(e) => {
                let change = e.plan(v.to_vec(), p).expect("big integers do not overflow");
                grew(e, change, p)
            }
            Store::Small(_) => unreachable!(),
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let p = self.p;
        match &self.store {
            Store::Small(e) => {
                if let Some(small) = to_small(v) {
                    if let Some(ans) = e.contains(small, p) {
                        return ans;
                    }
                }
                e.to_big().contains(v.to_vec(), p).expect("no overflow")
            }
            Store::Big(e) => e.contains(v.to_vec(), p).expect("no overflow"),
        }
    }

    pub fn is_sublattice_of(&self, other: &PLattice) -> bool {
        self.basis().iter().all(|r| other.contains(r))
    }

    pub fn same_lattice(&self, other: &PLattice) -> bool {
        self.rank() == other.rank() && self.is_sublattice_of(other) && other.is_sublattice_of(self)
    }

    /// Valuations `a_i` of the elementary divisors `p^{a_i}` of the lattice in
    /// the ambient module, one per basis vector, in increasing order.
    pub fn elementary_valuations(&self) -> Vec<u32> {
        let mut v = match &self.store {
            Store::Small(e) => smith_valuations(&e.rows, self.p)
                .unwrap_or_else(|| smith_valuations(&e.to_big().rows, self.p).expect("no overflow")),
            Store::Big(e) => smith_valuations(&e.rows, self.p).expect("no overflow"),
        };
        v.sort_unstable();
        v
    }

    /// The p-saturation `(Q L) ∩ Z_(p)^N`.
    pub fn saturation(&self) -> PLattice {
        let p = self.p;
        let mut current = self.clone();
        loop {
            let basis = current.basis();
            let reduced: Vec<Vec<u64>> = basis
                .iter()
                .map(|r| r.iter().map(|x| x.mod_floor(&BigInt::from(p)).to_u64().unwrap()).collect())
                .collect();
            let kernel = super::fp::left_kernel(&reduced, p);
            if kernel.is_empty() {
                return current;
            }
            let pb = BigInt::from(p);
            let mut next = current.clone();
            for x in kernel {
                let mut w = vec![BigInt::from(0); self.dim];
                for (coef, row) in x.iter().zip(&basis) {
                    if *coef != 0 {
                        for (acc, r) in w.iter_mut().zip(row) {
                            *acc += BigInt::from(*coef) * r;
                        }
                    }
                }
                let w: Vec<BigInt> = w.into_iter().map(|y| {
                    debug_assert!(Zero::is_zero(&(&y % &pb)));
                    y / &pb
                }).collect();
                next.insert(&w);
            }
            current = next;
        }
    }

    /// Whether `p^e * Z_(p)^N` is contained in the lattice.
    pub fn contains_scaled_identity(&self, e: u32) -> bool {
        let scale = num_traits::pow(BigInt::from(self.p), e as usize);
        (0..self.dim).all(|i| {
            let mut v = vec![BigInt::from(0); self.dim];
            v[i] = scale.clone();
            self.contains(&v)
        })
    }
}

fn grew<T: Scalar>(e: &mut Echelon<T>, change: Change<T>, p: u64) -> bool {
    let replaced = !change.replaced.is_empty();
    let inserted = e.apply(change, p);
    inserted || replaced
}

/// Structure of `Z_(p)^N / L`: free rank and p-power torsion invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientInvariants {
    pub free_rank: usize,
    /// Exponents `e` of the cyclic torsion factors `Z/p^e`, increasing.
    pub torsion_exponents: Vec<u32>,
}

impl QuotientInvariants {
    pub fn of(l: &PLattice) -> Self {
        let vals = l.elementary_valuations();
        QuotientInvariants {
            free_rank: l.ambient_dim() - l.rank(),
            torsion_exponents: vals.into_iter().filter(|&v| v > 0).collect(),
        }
    }

    /// The torsion invariant factors `p^e`.
    pub fn invariant_factors(&self, p: u64) -> Vec<BigInt> {
        self.torsion_exponents.iter().map(|&e| num_traits::pow(BigInt::from(p), e as usize)).collect()
    }

    /// `log_p` of the order of the torsion subgroup.
    pub fn torsion_log_order(&self) -> u32 {
        self.torsion_exponents.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn lattice(p: u64, rows: &[&[i64]]) -> PLattice {
        let rows = big(rows);
        PLattice::from_rows(p, rows[0].len(), rows.iter().map(|r| r.as_slice()))
    }

    #[test]
    fn units_are_invertible() {
        let l = lattice(2, &[&[3, 0], &[0, 5]]);
        assert!(l.same_lattice(&PLattice::full(2, 2)));
        let l = lattice(2, &[&[2, 0], &[0, 6]]);
        assert_eq!(l.elementary_valuations(), vec![1, 1]);
        assert!(!l.contains(&big(&[&[1, 0]])[0]));
    }

    #[test]
    fn quotient_invariants_mixed() {
        let l = lattice(2, &[&[2, 0, 1, 0], &[0, 2, 0, 1], &[4, 4, 2, 2]]);
        assert_eq!(l.rank(), 2);
        let q = QuotientInvariants::of(&l);
        assert_eq!(q.free_rank, 2);
        assert!(q.torsion_exponents.is_empty());
        let l = lattice(2, &[&[2, 0], &[1, 1]]);
        assert_eq!(QuotientInvariants::of(&l).torsion_exponents, vec![1]);
    }

    #[test]
    fn saturation_removes_torsion() {
        let l = lattice(3, &[&[3, 6, 0], &[0, 0, 9]]);
        let q = QuotientInvariants::of(&l);
        assert_eq!(q.torsion_exponents, vec![1, 2]);
        let s = l.saturation();
        assert_eq!(QuotientInvariants::of(&s).torsion_exponents, Vec::<u32>::new());
        assert!(s.contains(&big(&[&[1, 2, 0]])[0]));
        assert!(l.is_sublattice_of(&s));
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let huge = 1i64 << 61;
        let mut l = PLattice::new(2, 3);
        l.insert(&big(&[&[huge + 1, huge - 1, 3]])[0]);
        l.insert(&big(&[&[huge - 1, huge + 1, 7]])[0]);
        l.insert(&big(&[&[3, 5, huge + 3]])[0]);
        assert_eq!(l.rank(), 3);
        assert!(l.contains(&big(&[&[2 * huge, 2 * huge, 10]])[0]));
    }

    #[test]
    fn membership_respects_valuations() {
        let l = lattice(2, &[&[4, 1], &[0, 2]]);
        assert!(l.contains(&big(&[&[4, 3]])[0]));
        assert!(!l.contains(&big(&[&[2, 0]])[0]));
        assert!(l.contains(&big(&[&[8, 0]])[0]));
    }
}
