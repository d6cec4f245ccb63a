//! Height one cross-check: `K_p^0(BA)` is the completed representation ring,
//! and transfer along `H ⊆ A` is induction of representations.

use super::algebra::{CoefficientMode, EAlgebra, RingElement};
use super::ideal::IdealLattice;
use crate::error::{Error, Result};
use crate::groups::{Element, Subgroup};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// An element `sum_χ n_χ t^χ` of the group ring `Z[A*]`, with characters in
/// the self-dual coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    pub terms: BTreeMap<Element, BigInt>,
}

/// `Ind_H^A(1) = sum of the characters trivial on H`.
pub fn representation_oracle(h: &Subgroup) -> GroupRingElement {
    let a = h.ambient();
    let gens = h.generators();
    let mut terms = BTreeMap::new();
    for chi in a.elements() {
        if gens.iter().all(|g| a.pairing_numerator(&chi, g) == 0) {
            terms.insert(chi, BigInt::from(1));
        }
    }
    GroupRingElement { terms }
}

/// The image of `t^χ` under `t_i ↦ 1 + x_i`, computed as `prod_i (1 + x_i)^{c_i}`.
fn character_image(r: &EAlgebra, chi: &Element) -> RingElement {
    let mut acc = r.one();
    for (i, &c) in chi.residues().iter().enumerate() {
        let t = r.add(&r.one(), &r.var(i));
        acc = r.mul(&acc, &r.pow(&t, c));
    }
    acc
}

pub fn group_ring_image(r: &EAlgebra, x: &GroupRingElement) -> RingElement {
    let mut acc = r.zero();
    for (chi, n) in &x.terms {
        acc = r.add(&acc, &r.scale(&character_image(r, chi), n));
    }
    acc
}

/// The ideal of `Z[A*]` generated by `Ind_H^A(1)`, transported to `R`. Its
/// span is built from the translates `t^ψ Ind_H^A(1)` over all `ψ ∈ A*`.
pub fn oracle_ideal(r: &EAlgebra, h: &Subgroup) -> Result<IdealLattice> {
    if r.mode() != CoefficientMode::IntegerExact {
        return Err(Error::RequiresHeightOne);
    }
    let a = r.group();
    let ind = representation_oracle(h);
    let mut ideal = IdealLattice::zero(r);
    let mut rows = Vec::new();
    for psi in a.elements() {
        let mut shifted = GroupRingElement::default();
        for (chi, n) in &ind.terms {
            shifted.terms.insert(a.add(chi, &psi), n.clone());
        }
        rows.push(group_ring_image(r, &shifted));
    }
    ideal.push_generator_record(group_ring_image(r, &ind));
    ideal.absorb_rows(&rows, r.p());
    Ok(ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ering::transfer_unit;
    use crate::groups::AbelianPGroup;

    #[test]
    fn whole_group_gives_unit_ideal() {
        let a = AbelianPGroup::new(3, &[1]).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let ind = representation_oracle(&Subgroup::whole(&a));
        assert_eq!(ind.terms.len(), 1);
        assert!(oracle_ideal(&r, &Subgroup::whole(&a)).unwrap().contains(&r.one()));
    }

    #[test]
    fn cyclic_two() {
        let a = AbelianPGroup::cyclic(2, 1).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let h = Subgroup::trivial(&a);
        let img = group_ring_image(&r, &representation_oracle(&h));
        assert_eq!(r.display(&img), "x + 2");
        let t = transfer_unit(&r, &h).unwrap();
        assert_eq!(img, t);
    }

    #[test]
    fn rejects_fiber_mode() {
        let a = AbelianPGroup::cyclic(2, 1).unwrap();
        let r = EAlgebra::fiber(&a, 2, None).unwrap();
        assert!(matches!(oracle_ideal(&r, &Subgroup::trivial(&a)), Err(Error::RequiresHeightOne)));
    }
}
