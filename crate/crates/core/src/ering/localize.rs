use super::algebra::{CoefficientMode, EAlgebra, RingElement};
use super::ideal::{transfer_unit, IdealLattice};
use crate::error::{Error, Result};
use crate::groups::{maximal_subgroup_character, Element, SubgroupFamily};
use crate::linalg::fp::FpSpace;
use crate::linalg::rational::QSpace;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    Fp,
}

/// A set of Euler classes of nontrivial characters.
#[derive(Clone, Debug)]
pub struct EulerSet {
    pub characters: Vec<Element>,
    pub elements: Vec<RingElement>,
}

impl EulerSet {
    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }
}

/// Euler classes of the nontrivial characters accepted by `keep`, in element
/// order.
pub fn euler_set(r: &EAlgebra, mut keep: impl FnMut(&Element) -> bool) -> EulerSet {
    let a = r.group();
    let mut characters = Vec::new();
    let mut elements = Vec::new();
    for c in a.elements() {
        if c.is_zero() || !keep(&c) {
            continue;
        }
        elements.push(r.euler_class(&c));
        characters.push(c);
    }
    EulerSet { characters, elements }
}

impl EulerSet {
    /// `S_A`: all nontrivial characters.
    pub fn all(r: &EAlgebra) -> Self {
        euler_set(r, |_| true)
    }

    /// `S_F`: characters whose kernel lies in the family.
    pub fn of_family(r: &EAlgebra, family: &SubgroupFamily) -> Self {
        let a = r.group().clone();
        euler_set(r, |c| family.contains(&a.character_kernel(c)))
    }

    /// Characters of order p, i.e. those pulled back from `A/pA`.
    pub fn order_p(r: &EAlgebra) -> Self {
        let a = r.group().clone();
        euler_set(r, |c| a.log_order_of(c) == 1)
    }
}

/// `S^{-1}(k ⊗ R)` presented as the stable image `σ^m (k ⊗ R)`, which maps
/// isomorphically onto `(k ⊗ R) / K`.
#[derive(Clone, Debug)]
pub struct LocalizationImage {
    pub field: Field,
    pub source_rank: usize,
    pub euler_set_size: usize,
    /// Basis rows of the stable image `σ^m (k ⊗ R)`.
    pub stable_image: Vec<Vec<BigInt>>,
    /// Number of passes over `S` until the image stopped shrinking.
    pub passes: usize,
}

impl LocalizationImage {
    pub fn dimension(&self) -> usize {
        self.stable_image.len()
    }

    /// Dimension of the saturation kernel `K`.
    pub fn kernel_dimension(&self) -> usize {
        self.source_rank - self.dimension()
    }

    pub fn is_zero(&self) -> bool {
        self.stable_image.is_empty()
    }
}

enum Span {
    Q(QSpace),
    P(FpSpace),
}

impl Span {
    fn rank(&self) -> usize {
        match self {
            Span::Q(s) => s.rank(),
            Span::P(s) => s.rank(),
        }
    }

    fn rows(&self) -> Vec<Vec<BigInt>> {
        match self {
            Span::Q(s) => s.rows().to_vec(),
            Span::P(s) => s
                .rows()
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        }
    }
}

fn reduce_row(v: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    v.iter().map(|x| x.mod_floor(&pb).to_u64().expect("reduced")).collect()
}

/// Localizes `k ⊗ R` at `S` by shrinking `V = k ⊗ R` to `s V` for each
/// `s ∈ S` until a full pass changes nothing.
pub fn localize(r: &EAlgebra, s: &EulerSet, field: Field) -> Result<LocalizationImage> {
    if field == Field::Rationals && r.mode() == CoefficientMode::FpFiber {
        return Err(Error::InvalidArgument("the fiber model has characteristic p".into()));
    }
    let n = r.rank();
    let p = r.p();
    let new_span = || match field {
        Field::Rationals => Span::Q(QSpace::new(n)),
        Field::Fp => Span::P(FpSpace::new(p, n)),
    };
    let mut v = new_span();
    for i in 0..n {
        let mut e = vec![BigInt::from(0); n];
        e[i] = BigInt::from(1);
        push(&mut v, e, p);
    }
    let mut passes = 0;
    loop {
        passes += 1;
        let mut changed = false;
        for g in &s.elements {
            if v.rank() == 0 {
                break;
            }
            let mut next = new_span();
            for row in v.rows() {
                let x = r.element(row)?;
                push(&mut next, r.mul(g, &x).coeffs().to_vec(), p);
            }
            if let Span::Q(q) = &mut next {
                q.back_substitute();
            }
            if next.rank() < v.rank() {
                changed = true;
            }
            v = next;
        }
        if !changed {
            break;
        }
    }
    Ok(LocalizationImage {
        field,
        source_rank: n,
        euler_set_size: s.len(),
        stable_image: v.rows(),
        passes,
    })
}

fn push(span: &mut Span, row: Vec<BigInt>, p: u64) {
    match span {
        Span::Q(q) => {
            q.insert(row);
        }
        Span::P(f) => {
            f.insert(reduce_row(&row, p));
        }
    }
}

/// For each maximal member `H` of the family, checks `e(χ_H) · Tr_{H,A}(1) = 0`
/// with `e(χ_H) ∈ S_F`. Returns the first member that fails.
pub fn factorization_witness(r: &EAlgebra, family: &SubgroupFamily) -> Result<Option<usize>> {
    for (i, h) in family.maximal_members().iter().enumerate() {
        let chi = maximal_subgroup_character(h)?;
        let e = r.euler_class(&chi);
        let g = transfer_unit(r, h)?;
        if !family.contains(&r.group().character_kernel(&chi)) || !r.mul(&e, &g).is_zero() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Whether `e(χ)` divides `[p^j](e(χ))` for every `χ` in `S` and every `j`
/// below the order of `χ`. Returns the first failing character.
pub fn divisibility_witness(r: &EAlgebra, s: &EulerSet) -> Option<Element> {
    let a = r.group();
    for (c, e) in s.characters.iter().zip(&s.elements) {
        let ideal = IdealLattice::generated(r, std::slice::from_ref(e));
        for j in 1..a.log_order_of(c) {
            let pj = r.multiple(e, a.p().pow(j));
            if !ideal.contains(&pj) {
                return Some(c.clone());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ering::{quotient, transfer_ideal};
    use crate::groups::{family_of, hom_set, AbelianPGroup};

    #[test]
    fn empty_set_keeps_everything() {
        let a = AbelianPGroup::new(2, &[1, 1]).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let s = euler_set(&r, |_| false);
        assert_eq!(localize(&r, &s, Field::Rationals).unwrap().dimension(), 4);
    }

    #[test]
    fn vandermonde_vanishing() {
        for p in [2, 3] {
            let z = AbelianPGroup::new(p, &[1, 1]).unwrap();
            let r = EAlgebra::integer(&z).unwrap();
            let loc = localize(&r, &EulerSet::all(&r), Field::Rationals).unwrap();
            assert!(loc.is_zero(), "p = {p}");
        }
    }

    #[test]
    fn cyclic_four_non_surjective() {
        let a = AbelianPGroup::cyclic(2, 2).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let f = &hom_set(&a, 1)[2];
        let family = family_of(f);
        let s = EulerSet::of_family(&r, &family);
        assert_eq!(s.len(), 3);
        let loc = localize(&r, &s, Field::Rationals).unwrap();
        let q = quotient(&r, &transfer_ideal(&r, &family).unwrap());
        assert_eq!(loc.dimension(), 2);
        assert_eq!(q.free_rank, 2);
        assert_eq!(factorization_witness(&r, &family).unwrap(), None);
    }

    #[test]
    fn order_p_characters_suffice() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let all = EulerSet::all(&r);
        let small = EulerSet::order_p(&r);
        assert_eq!(divisibility_witness(&r, &all), None);
        let l1 = localize(&r, &all, Field::Rationals).unwrap();
        let l2 = localize(&r, &small, Field::Rationals).unwrap();
        assert_eq!(l1.dimension(), l2.dimension());
    }
}
