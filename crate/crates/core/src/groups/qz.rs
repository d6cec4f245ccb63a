//! Points of `Q_p/Z_p` and homomorphisms from finite groups into `(Q_p/Z_p)^m`.

use super::{AbelianPGroup, Element, LatticeMap, Subgroup};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `a / p^e` in `Q_p/Z_p`, with `0 <= a < p^e` and `e` minimal.
///
/// Serialises as the pair `[a, e]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QZ(u64, u32);

impl QZ {
    pub fn new(numerator: u64, exponent: u32, p: u64) -> QZ {
        let mut a = numerator % p.pow(exponent);
        let mut e = exponent;
        while e > 0 && a.is_multiple_of(p) {
            a /= p;
            e -= 1;
        }
        if a == 0 {
            e = 0;
        }
        QZ(a, e)
    }

    pub fn zero() -> QZ {
        QZ(0, 0)
    }

    pub fn numerator(&self) -> u64 {
        self.0
    }

    /// Exponent of the reduced denominator, i.e. `log_p` of the order.
    pub fn exponent(&self) -> u32 {
        self.1
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    /// Numerator over `p^k`; requires `exponent() <= k`.
    pub fn numerator_over(&self, k: u32, p: u64) -> u64 {
        debug_assert!(self.1 <= k);
        self.0 * p.pow(k - self.1)
    }

    pub fn add(&self, other: &QZ, p: u64) -> QZ {
        let k = self.1.max(other.1);
        let m = p.pow(k);
        QZ::new((self.numerator_over(k, p) + other.numerator_over(k, p)) % m, k, p)
    }

    pub fn scale(&self, m: u64, p: u64) -> QZ {
        let modulus = p.pow(self.1) as u128;
        QZ::new(((self.0 as u128 * m as u128) % modulus.max(1)) as u64, self.1, p)
    }
}

impl fmt::Display for QZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/p^{}", self.0, self.1)
        }
    }
}

/// A point of `(Q_p/Z_p)^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QZVector(pub Vec<QZ>);

impl QZVector {
    pub fn zero(m: usize) -> Self {
        QZVector(vec![QZ::zero(); m])
    }

    pub fn entries(&self) -> &[QZ] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(QZ::is_zero)
    }

    pub fn add(&self, other: &QZVector, p: u64) -> QZVector {
        QZVector(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b, p)).collect())
    }

    pub fn scale(&self, m: u64, p: u64) -> QZVector {
        QZVector(self.0.iter().map(|a| a.scale(m, p)).collect())
    }

    /// `log_p` of the order.
    pub fn log_order(&self) -> u32 {
        self.0.iter().map(QZ::exponent).max().unwrap_or(0)
    }
}

impl fmt::Display for QZVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A homomorphism `source -> (Q_p/Z_p)^m`, given by the images of the source
/// generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QZHom {
    source: AbelianPGroup,
    target_rank: usize,
    images: Vec<QZVector>,
}

impl QZHom {
    pub fn new(source: AbelianPGroup, target_rank: usize, images: Vec<QZVector>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::InvalidArgument("one image per source generator required".into()));
        }
        for (i, v) in images.iter().enumerate() {
            if v.len() != target_rank {
                return Err(Error::InvalidArgument(format!("image {v} has the wrong length")));
            }
            if v.log_order() > source.exponents()[i] {
                return Err(Error::InvalidArgument(format!(
                    "image {v} of generator {i} has too large an order"
                )));
            }
        }
        Ok(QZHom { source, target_rank, images })
    }

    /// Builds the map from numerators: generator `i` goes to
    /// `(x_{i,c} / p^{k_i})_c`.
    pub fn from_numerators(source: &AbelianPGroup, target_rank: usize, nums: &[Vec<u64>]) -> Self {
        let p = source.p();
        let images = nums
            .iter()
            .enumerate()
            .map(|(i, row)| {
                QZVector(row.iter().map(|&x| QZ::new(x, source.exponents()[i], p)).collect())
            })
            .collect();
        QZHom { source: source.clone(), target_rank, images }
    }

    pub fn zero(source: &AbelianPGroup, target_rank: usize) -> Self {
        QZHom {
            source: source.clone(),
            target_rank,
            images: vec![QZVector::zero(target_rank); source.rank()],
        }
    }

    pub fn source(&self) -> &AbelianPGroup {
        &self.source
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn images(&self) -> &[QZVector] {
        &self.images
    }

    /// Numerator of coordinate `c` of the image of generator `i` over `p^{k_i}`.
    pub fn numerator(&self, i: usize, c: usize) -> u64 {
        self.images[i].0[c].numerator_over(self.source.exponents()[i], self.source.p())
    }

    pub fn apply(&self, a: &Element) -> QZVector {
        let p = self.source.p();
        let mut out = QZVector::zero(self.target_rank);
        for (coef, img) in a.0.iter().zip(&self.images) {
            out = out.add(&img.scale(*coef, p), p);
        }
        out
    }

    /// Restriction to coordinates `range` of the target.
    pub fn project(&self, range: std::ops::Range<usize>) -> QZHom {
        QZHom {
            source: self.source.clone(),
            target_rank: range.len(),
            images: self.images.iter().map(|v| QZVector(v.0[range.clone()].to_vec())).collect(),
        }
    }

    pub fn compose_with(&self, u: &super::Homomorphism) -> Result<QZHom> {
        if u.codomain() != &self.source {
            return Err(Error::InvalidArgument("composition of incompatible maps".into()));
        }
        QZHom::new(
            u.domain().clone(),
            self.target_rank,
            u.images().iter().map(|a| self.apply(a)).collect(),
        )
    }

    /// Injectivity via the socle: `l` is injective iff the images of
    /// `p^{k_i - 1} e_i` are independent over `F_p`.
    pub fn is_injective(&self) -> bool {
        let p = self.source.p();
        let rows: Vec<Vec<u64>> = (0..self.source.rank())
            .map(|i| {
                let k = self.source.exponents()[i];
                self.images[i]
                    .0
                    .iter()
                    .map(|q| if q.exponent() == k { q.numerator() % p } else { 0 })
                    .collect()
            })
            .collect();
        crate::linalg::fp::rank(&rows, p) == self.source.rank()
    }

    pub fn kernel(&self) -> Subgroup {
        let members: Vec<Element> =
            self.source.elements().filter(|a| self.apply(a).is_zero()).collect();
        Subgroup::generated_by(&self.source, &members)
    }
}

impl fmt::Display for QZHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// The Pontryagin dual `f*: A* -> (Q_p/Z_p)^h` of `f: Z_p^h -> A`, using the
/// self-dual presentation of `A`: `f*(e_i*)_j = f(g_j)_i / p^{k_i}`.
pub fn dual_hom(f: &LatticeMap) -> QZHom {
    let a = f.target();
    let h = f.loops();
    let nums: Vec<Vec<u64>> =
        (0..a.rank()).map(|i| (0..h).map(|j| f.images()[j].0[i]).collect()).collect();
    QZHom::from_numerators(a, h, &nums)
}

/// Inverse of [`dual_hom`].
pub fn dual_qzhom(g: &QZHom) -> LatticeMap {
    let a = g.source();
    let images = (0..g.target_rank())
        .map(|j| Element((0..a.rank()).map(|i| g.numerator(i, j)).collect()))
        .collect();
    LatticeMap::new(a.clone(), images).expect("numerators are reduced")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::hom_set;

    #[test]
    fn normalisation() {
        assert_eq!(QZ::new(2, 2, 2), QZ(1, 1));
        assert_eq!(QZ::new(4, 2, 2), QZ::zero());
        assert_eq!(QZ::new(3, 1, 3), QZ::zero());
        assert_eq!(QZ::new(1, 2, 2).add(&QZ::new(3, 2, 2), 2), QZ::zero());
    }

    #[test]
    fn dual_of_generator_of_z4() {
        let a = AbelianPGroup::cyclic(2, 2).unwrap();
        let f = LatticeMap::new(a.clone(), vec![a.generator(0)]).unwrap();
        let d = dual_hom(&f);
        assert_eq!(d.images()[0], QZVector(vec![QZ::new(1, 2, 2)]));
        // <f*(chi), 1> = chi(f(1))
        for chi in a.elements() {
            assert_eq!(d.apply(&chi).0[0], a.pairing(&chi, &f.images()[0]));
        }
    }

    #[test]
    fn duality_is_an_involution_and_swaps_surjective_injective() {
        let a = AbelianPGroup::new(2, &[1, 1]).unwrap();
        for f in hom_set(&a, 2) {
            let d = dual_hom(&f);
            assert_eq!(dual_qzhom(&d), f);
            assert_eq!(f.is_surjective(), d.is_injective());
            assert_eq!(d.kernel().order() * f.image().order(), a.order());
        }
    }
}
