//! Finite abelian p-groups `A = Z/p^k1 + ... + Z/p^kj` and the maps between them.
//!
//! The same presentation houses `A` and its Pontryagin dual `A*`: the character
//! `c = (c_1, .., c_j)` pairs with `a` as `sum_i c_i a_i / p^{k_i}` in `Q/Z`.

mod family;
mod monotypical;
mod points;
mod qz;
mod subgroup;
mod summand;

pub use family::{family_of, family_pullback, maximal_subgroup_character, SubgroupFamily};
pub use monotypical::{monotypicity_check, MonotypicityWitness};
pub use points::{
    count_level_points, image_subgroup, level_points, sub_points, LevelPointSet, SubPointSet,
};
pub use qz::{dual_hom, dual_qzhom, QZHom, QZVector, QZ};
pub use subgroup::Subgroup;
pub use summand::{is_summand, minimal_summand_split, SummandTable};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianPGroup {
    p: u64,
    exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(pub(crate) Vec<u64>);

impl Element {
    pub fn residues(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl AbelianPGroup {
    /// Builds `sum_i Z/p^{k_i}`; exponents are sorted into descending order.
    pub fn new(p: u64, exponents: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if exponents.contains(&0) {
            return Err(Error::InvalidArgument("cyclic factors must have positive exponent".into()));
        }
        let mut exponents = exponents.to_vec();
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        let total: u32 = exponents.iter().sum();
        if (p as f64).powi(total as i32) > 1e15 {
            return Err(Error::InvalidArgument("group order too large".into()));
        }
        Ok(AbelianPGroup { p, exponents })
    }

    pub fn trivial(p: u64) -> Result<Self> {
        Self::new(p, &[])
    }

    pub fn cyclic(p: u64, k: u32) -> Result<Self> {
        Self::new(p, &[k])
    }

    /// `(Z/p^k)^rank`.
    pub fn homocyclic(p: u64, k: u32, rank: usize) -> Result<Self> {
        Self::new(p, &vec![k; rank])
    }

    /// Parses a comma separated list of cyclic orders such as `"4,2"`.
    ///
    /// `p` is inferred from the orders when not given. `"1"`, `"0"`, `"trivial"`
    /// and the empty string denote the trivial group (which needs `p`).
    pub fn parse(spec: &str, p: Option<u64>) -> Result<Self> {
        let trimmed = spec.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "trivial" || trimmed == "0" {
            let p = p.ok_or(Error::GroupSpec {
                position: 0,
                message: "trivial group needs an explicit prime".into(),
            })?;
            return Self::trivial(p);
        }
        let mut orders = Vec::new();
        let mut position = 0;
        for piece in spec.split(',') {
            let offset = piece.len() - piece.trim_start().len();
            let token = piece.trim();
            let value: u64 = token.parse().map_err(|_| Error::GroupSpec {
                position: position + offset,
                message: format!("'{token}' is not a positive integer"),
            })?;
            orders.push((position + offset, value));
            position += piece.len() + 1;
        }
        let prime = match p {
            Some(p) => {
                if !is_prime(p) {
                    return Err(Error::NotPrime(p));
                }
                p
            }
            None => {
                let (pos, first) = orders.iter().copied().find(|&(_, v)| v > 1).ok_or(
                    Error::GroupSpec { position: 0, message: "cannot infer p from trivial factors".into() },
                )?;
                smallest_prime_factor(first).ok_or(Error::GroupSpec {
                    position: pos,
                    message: "cannot infer p".into(),
                })?
            }
        };
        let mut exponents = Vec::new();
        for (pos, value) in orders {
            if value == 1 {
                continue;
            }
            match log_p(value, prime) {
                Some(k) => exponents.push(k),
                None => {
                    return Err(Error::GroupSpec {
                        position: pos,
                        message: format!("{value} is not a power of p = {prime}"),
                    })
                }
            }
        }
        Self::new(prime, &exponents)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.log_order())
    }

    pub fn log_order(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Largest exponent `K` with `A = A[p^K]`; zero for the trivial group.
    pub fn exponent(&self) -> u32 {
        self.exponents.first().copied().unwrap_or(0)
    }

    /// `p^{k_i}`.
    pub fn modulus(&self, i: usize) -> u64 {
        self.p.pow(self.exponents[i])
    }

    pub fn moduli(&self) -> Vec<u64> {
        (0..self.rank()).map(|i| self.modulus(i)).collect()
    }

    /// Number of maximal (index p) subgroups, `(|A/pA| - 1) / (p - 1)`.
    pub fn maximal_subgroup_count(&self) -> u64 {
        (self.p.pow(self.rank() as u32) - 1) / (self.p - 1)
    }

    pub fn element(&self, residues: &[i64]) -> Result<Element> {
        if residues.len() != self.rank() {
            return Err(Error::InvalidArgument(format!(
                "element has {} coordinates, group has {}",
                residues.len(),
                self.rank()
            )));
        }
        Ok(Element(
            residues
                .iter()
                .enumerate()
                .map(|(i, &r)| r.rem_euclid(self.modulus(i) as i64) as u64)
                .collect(),
        ))
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.zero();
        e.0[i] = 1 % self.modulus(i);
        e
    }

    pub fn contains_element(&self, a: &Element) -> bool {
        a.0.len() == self.rank() && a.0.iter().enumerate().all(|(i, &r)| r < self.modulus(i))
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&b.0)
                .enumerate()
                .map(|(i, (x, y))| (x + y) % self.modulus(i))
                .collect(),
        )
    }

    pub fn neg(&self, a: &Element) -> Element {
        Element(
            a.0.iter()
                .enumerate()
                .map(|(i, &x)| (self.modulus(i) - x) % self.modulus(i))
                .collect(),
        )
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Element, m: i64) -> Element {
        Element(
            a.0.iter()
                .enumerate()
                .map(|(i, &x)| {
                    let q = self.modulus(i) as i128;
                    ((x as i128 * m as i128).rem_euclid(q)) as u64
                })
                .collect(),
        )
    }

    /// Order of `a` as a power of p.
    pub fn log_order_of(&self, a: &Element) -> u32 {
        a.0.iter()
            .enumerate()
            .map(|(i, &x)| {
                if x == 0 {
                    0
                } else {
                    self.exponents[i] - valuation(x, self.p)
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Position of `a` in the lexicographic enumeration of [`Self::elements`].
    pub fn index_of(&self, a: &Element) -> usize {
        let mut idx = 0usize;
        for (i, &x) in a.0.iter().enumerate() {
            idx = idx * self.modulus(i) as usize + x as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> Element {
        let mut res = vec![0u64; self.rank()];
        for i in (0..self.rank()).rev() {
            let m = self.modulus(i) as usize;
            res[i] = (idx % m) as u64;
            idx /= m;
        }
        Element(res)
    }

    /// All elements in lexicographic order (first coordinate most significant).
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// The pairing `<c, a> = sum_i c_i a_i / p^{k_i}` as a numerator over `p^K`,
    /// `K` the exponent of the group.
    pub fn pairing_numerator(&self, c: &Element, a: &Element) -> u64 {
        let top = self.exponent();
        let big = self.p.pow(top) as u128;
        let mut acc: u128 = 0;
        for i in 0..self.rank() {
            let scale = self.p.pow(top - self.exponents[i]) as u128;
            acc = (acc + (c.0[i] as u128 * a.0[i] as u128 % big) * scale) % big;
        }
        acc as u64
    }

    /// The pairing as an element of `Q_p/Z_p`.
    pub fn pairing(&self, c: &Element, a: &Element) -> QZ {
        QZ::new(self.pairing_numerator(c, a), self.exponent(), self.p)
    }

    /// The kernel of the character `c`.
    pub fn character_kernel(&self, c: &Element) -> Subgroup {
        if self.is_trivial() {
            return Subgroup::trivial(self);
        }
        let codomain = AbelianPGroup::cyclic(self.p, self.exponent()).expect("positive exponent");
        let images = (0..self.rank())
            .map(|i| Element(vec![self.pairing_numerator(c, &self.generator(i))]))
            .collect();
        Homomorphism { domain: self.clone(), codomain, images }.kernel()
    }

    /// The element coordinates mod p, i.e. the image in `A/pA = F_p^j`.
    pub fn frattini_image(&self, a: &Element) -> Vec<u64> {
        a.0.iter().map(|&x| x % self.p).collect()
    }
}

impl fmt::Display for AbelianPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        for (i, &k) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "Z/{}", self.p.pow(k))?;
        }
        Ok(())
    }
}

pub(crate) fn valuation(mut x: u64, p: u64) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

fn log_p(mut value: u64, p: u64) -> Option<u32> {
    if value == 0 {
        return None;
    }
    let mut k = 0;
    while value.is_multiple_of(p) {
        value /= p;
        k += 1;
    }
    (value == 1).then_some(k)
}

fn smallest_prime_factor(n: u64) -> Option<u64> {
    (2..=n).find(|d| n.is_multiple_of(*d))
}

/// A homomorphism between finite abelian p-groups, given by the images of the
/// domain generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Homomorphism {
    domain: AbelianPGroup,
    codomain: AbelianPGroup,
    images: Vec<Element>,
}

impl Homomorphism {
    pub fn new(domain: AbelianPGroup, codomain: AbelianPGroup, images: Vec<Element>) -> Result<Self> {
        if images.len() != domain.rank() {
            return Err(Error::InvalidArgument("one image per domain generator required".into()));
        }
        for (i, img) in images.iter().enumerate() {
            if !codomain.contains_element(img) {
                return Err(Error::InvalidArgument(format!("image {img} is not in {codomain}")));
            }
            if codomain.log_order_of(img) > domain.exponents()[i] {
                return Err(Error::InvalidArgument(format!(
                    "image {img} of generator {i} has too large an order"
                )));
            }
        }
        Ok(Homomorphism { domain, codomain, images })
    }

    pub fn identity(group: &AbelianPGroup) -> Self {
        Homomorphism {
            domain: group.clone(),
            codomain: group.clone(),
            images: (0..group.rank()).map(|i| group.generator(i)).collect(),
        }
    }

    pub fn domain(&self) -> &AbelianPGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &AbelianPGroup {
        &self.codomain
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn apply(&self, a: &Element) -> Element {
        let mut out = self.codomain.zero();
        for (coef, img) in a.0.iter().zip(&self.images) {
            out = self.codomain.add(&out, &self.codomain.scale(img, *coef as i64));
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if other.domain != self.codomain {
            return Err(Error::InvalidArgument("composition of incompatible maps".into()));
        }
        Ok(Homomorphism {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            images: self.images.iter().map(|a| other.apply(a)).collect(),
        })
    }

    pub fn image(&self) -> Subgroup {
        Subgroup::generated_by(&self.codomain, &self.images)
    }

    pub fn kernel(&self) -> Subgroup {
        let members: Vec<Element> =
            self.domain.elements().filter(|a| self.apply(a).is_zero()).collect();
        Subgroup::generated_by(&self.domain, &members)
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.codomain.order()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().order() == 1
    }
}

/// A continuous homomorphism `Z_p^h -> A`, stored as the h-tuple of images of
/// the standard generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeMap {
    target: AbelianPGroup,
    images: Vec<Element>,
}

impl LatticeMap {
    pub fn new(target: AbelianPGroup, images: Vec<Element>) -> Result<Self> {
        if let Some(bad) = images.iter().find(|a| !target.contains_element(a)) {
            return Err(Error::InvalidArgument(format!("{bad} is not an element of {target}")));
        }
        Ok(LatticeMap { target, images })
    }

    pub fn zero(target: &AbelianPGroup, h: usize) -> Self {
        LatticeMap { target: target.clone(), images: vec![target.zero(); h] }
    }

    pub fn target(&self) -> &AbelianPGroup {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    /// Number of lattice generators `h`.
    pub fn loops(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self) -> Subgroup {
        Subgroup::generated_by(&self.target, &self.images)
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    /// Encodes the map as a homomorphism out of `(Z/p^e)^h` with `e` the
    /// exponent of the target (at least 1).
    pub fn as_homomorphism(&self) -> Homomorphism {
        let e = self.target.exponent().max(1);
        let domain = AbelianPGroup::homocyclic(self.target.p(), e, self.loops())
            .expect("exponent is positive");
        Homomorphism { domain, codomain: self.target.clone(), images: self.images.clone() }
    }

    /// `q ∘ self`.
    pub fn then(&self, q: &Homomorphism) -> Result<LatticeMap> {
        if q.domain() != &self.target {
            return Err(Error::InvalidArgument("composition of incompatible maps".into()));
        }
        Ok(LatticeMap {
            target: q.codomain().clone(),
            images: self.images.iter().map(|a| q.apply(a)).collect(),
        })
    }

    /// Canonical encoding used as a report key: the tuple of image coordinates.
    pub fn encode(&self) -> Vec<Vec<u64>> {
        self.images.iter().map(|a| a.0.clone()).collect()
    }
}

impl fmt::Display for LatticeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// All continuous homomorphisms `Z_p^h -> A` in lexicographic order of the
/// image tuple. There are `|A|^h` of them.
pub fn hom_set(group: &AbelianPGroup, h: usize) -> Vec<LatticeMap> {
    let order = group.order() as usize;
    let total = order.pow(h as u32);
    (0..total)
        .map(|mut idx| {
            let mut images = vec![group.zero(); h];
            for slot in (0..h).rev() {
                images[slot] = group.element_at(idx % order);
                idx /= order;
            }
            LatticeMap { target: group.clone(), images }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_infers_prime_and_sorts() {
        let g = AbelianPGroup::parse("2,4", None).unwrap();
        assert_eq!(g.p(), 2);
        assert_eq!(g.exponents(), &[2, 1]);
        assert_eq!(g.order(), 8);
        let g = AbelianPGroup::parse("9, 3", Some(3)).unwrap();
        assert_eq!(g.exponents(), &[2, 1]);
    }

    #[test]
    fn parse_rejects_non_powers() {
        match AbelianPGroup::parse("4,6", Some(2)) {
            Err(Error::GroupSpec { position, message }) => {
                assert_eq!(position, 2);
                assert!(message.contains("not a power of p"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(AbelianPGroup::parse("6", Some(2)), Err(Error::GroupSpec { .. })));
        assert!(matches!(AbelianPGroup::parse("x", Some(2)), Err(Error::GroupSpec { .. })));
    }

    #[test]
    fn trivial_group() {
        let g = AbelianPGroup::parse("1", Some(3)).unwrap();
        assert!(g.is_trivial());
        assert_eq!(g.order(), 1);
        assert_eq!(g.elements().count(), 1);
        assert_eq!(g.maximal_subgroup_count(), 0);
    }

    #[test]
    fn hom_set_counts() {
        let z2 = AbelianPGroup::cyclic(2, 1).unwrap();
        assert_eq!(hom_set(&z2, 1).len(), 2);
        let g = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let homs = hom_set(&g, 2);
        assert_eq!(homs.len(), 64);
        // lexicographic and duplicate free
        for w in homs.windows(2) {
            assert!(w[0] < w[1]);
        }
        let triv = AbelianPGroup::trivial(5).unwrap();
        assert_eq!(hom_set(&triv, 3).len(), 1);
    }

    #[test]
    fn element_index_round_trip() {
        let g = AbelianPGroup::new(3, &[2, 1]).unwrap();
        for (i, a) in g.elements().enumerate() {
            assert_eq!(g.index_of(&a), i);
        }
    }

    #[test]
    fn orders_of_elements() {
        let g = AbelianPGroup::new(2, &[2, 1]).unwrap();
        assert_eq!(g.log_order_of(&g.element(&[2, 0]).unwrap()), 1);
        assert_eq!(g.log_order_of(&g.element(&[1, 1]).unwrap()), 2);
        assert_eq!(g.log_order_of(&g.zero()), 0);
    }

    #[test]
    fn homomorphism_kernel_and_image() {
        let z4 = AbelianPGroup::cyclic(2, 2).unwrap();
        let z2 = AbelianPGroup::cyclic(2, 1).unwrap();
        let q = Homomorphism::new(z4.clone(), z2.clone(), vec![z2.generator(0)]).unwrap();
        assert!(q.is_surjective());
        assert_eq!(q.kernel().order(), 2);
        assert!(Homomorphism::new(z2.clone(), z4.clone(), vec![z4.generator(0)]).is_err());
    }
}
