//! Families of subgroups, stored by their maximal members.

use super::{AbelianPGroup, Element, Homomorphism, LatticeMap, Subgroup};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A family of proper subgroups closed under passing to subgroups, stored by
/// its maximal members in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubgroupFamily {
    ambient: AbelianPGroup,
    maximal_members: Vec<Subgroup>,
}

impl SubgroupFamily {
    /// The family generated by `members`; non-maximal members are dropped.
    pub fn new(ambient: &AbelianPGroup, members: Vec<Subgroup>) -> Result<Self> {
        for m in &members {
            if m.ambient() != ambient {
                return Err(Error::InvalidArgument("member lives in another group".into()));
            }
            if !m.is_proper() {
                return Err(Error::InvalidArgument(format!("{m} is not a proper subgroup")));
            }
        }
        let mut members = members;
        members.sort();
        members.dedup();
        let maximal: Vec<Subgroup> = members
            .iter()
            .filter(|m| !members.iter().any(|o| o != *m && o.contains_subgroup(m)))
            .cloned()
            .collect();
        Ok(SubgroupFamily { ambient: ambient.clone(), maximal_members: maximal })
    }

    pub fn empty(ambient: &AbelianPGroup) -> Self {
        SubgroupFamily { ambient: ambient.clone(), maximal_members: Vec::new() }
    }

    /// All proper subgroups, i.e. the family generated by the index-p subgroups.
    pub fn all_proper(ambient: &AbelianPGroup) -> Self {
        let members = hyperplanes(ambient, &[]).into_iter().map(|(_, h)| h).collect();
        Self::new(ambient, members).expect("index p subgroups are proper")
    }

    pub fn ambient(&self) -> &AbelianPGroup {
        &self.ambient
    }

    pub fn maximal_members(&self) -> &[Subgroup] {
        &self.maximal_members
    }

    pub fn is_empty(&self) -> bool {
        self.maximal_members.is_empty()
    }

    pub fn contains(&self, h: &Subgroup) -> bool {
        self.maximal_members.iter().any(|m| m.contains_subgroup(h))
    }

    pub fn is_subfamily_of(&self, other: &SubgroupFamily) -> bool {
        self.maximal_members.iter().all(|m| other.contains(m))
    }
}

/// Normalised vectors `u` of `F_p^j` (first nonzero entry 1) with
/// `u . v = 0 mod p` for every `v` in `constraints`, together with the index-p
/// subgroup `{a : u . a = 0 mod p}`.
pub(crate) fn hyperplanes(a: &AbelianPGroup, constraints: &[Element]) -> Vec<(Vec<u64>, Subgroup)> {
    let p = a.p();
    let j = a.rank();
    let mut out = Vec::new();
    let total = (p as usize).pow(j as u32);
    for idx in 1..total {
        let mut u = vec![0u64; j];
        let mut x = idx;
        for slot in (0..j).rev() {
            u[slot] = (x % p as usize) as u64;
            x /= p as usize;
        }
        let t = u.iter().position(|&c| c != 0).expect("nonzero");
        if u[t] != 1 {
            continue;
        }
        let kills = constraints.iter().all(|v| {
            let s: u64 = u.iter().zip(&v.0).map(|(&c, &x)| c * (x % p)).sum();
            s.is_multiple_of(p)
        });
        if !kills {
            continue;
        }
        let mut gens = vec![a.scale(&a.generator(t), p as i64)];
        for i in 0..j {
            if i != t {
                let mut g = vec![0i64; j];
                g[i] = 1;
                g[t] = -(u[i] as i64);
                gens.push(a.element(&g).expect("in range"));
            }
        }
        out.push((u, Subgroup::generated_by(a, &gens)));
    }
    out
}

/// The character of order p with kernel `h` (an index-p subgroup) whose
/// coordinates are lexicographically least, in the self-dual presentation.
pub fn maximal_subgroup_character(h: &Subgroup) -> Result<Element> {
    let a = h.ambient();
    if h.index() != a.p() {
        return Err(Error::NotMaximal { index: h.index() });
    }
    let p = a.p();
    let gens = h.generators();
    for (u, hh) in hyperplanes(a, &gens) {
        if &hh == h {
            let c: Vec<i64> = u
                .iter()
                .zip(a.exponents())
                .map(|(&x, &k)| (x * p.pow(k - 1)) as i64)
                .collect();
            return a.element(&c);
        }
    }
    unreachable!("every index p subgroup is a hyperplane")
}

/// The family of subgroups of `A` through which `f` factors properly, stored by
/// the index-p subgroups containing `im f`. Empty iff `f` is surjective.
pub fn family_of(f: &LatticeMap) -> SubgroupFamily {
    let a = f.target();
    let members = hyperplanes(a, f.images()).into_iter().map(|(_, h)| h).collect();
    SubgroupFamily::new(a, members).expect("index p subgroups are proper")
}

/// `q* F`: the family on the domain of `q` whose maximal members are the
/// preimages of the maximal members of `F`.
pub fn family_pullback(q: &Homomorphism, family: &SubgroupFamily) -> Result<SubgroupFamily> {
    if !q.is_surjective() {
        return Err(Error::NotSurjective);
    }
    if family.ambient() != q.codomain() {
        return Err(Error::InvalidArgument("family lives on another group".into()));
    }
    let members = family.maximal_members().iter().map(|m| m.preimage(q)).collect();
    SubgroupFamily::new(q.domain(), members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::hom_set;

    #[test]
    fn surjective_maps_give_empty_families() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        for f in hom_set(&a, 2) {
            assert_eq!(family_of(&f).is_empty(), f.is_surjective());
        }
    }

    #[test]
    fn cyclic_group_families_are_all_proper() {
        let a = AbelianPGroup::cyclic(3, 2).unwrap();
        let all = SubgroupFamily::all_proper(&a);
        assert_eq!(all.maximal_members().len(), 1);
        for f in hom_set(&a, 1) {
            if !f.is_surjective() {
                assert_eq!(family_of(&f), all);
            }
        }
    }

    #[test]
    fn c4_times_c4_with_image_c4_times_trivial() {
        let a = AbelianPGroup::new(2, &[2, 2]).unwrap();
        let f = LatticeMap::new(a.clone(), vec![a.element(&[1, 0]).unwrap()]).unwrap();
        let fam = family_of(&f);
        assert_eq!(fam.maximal_members().len(), 1);
        let expected = Subgroup::generated_by(
            &a,
            &[a.element(&[1, 0]).unwrap(), a.element(&[0, 2]).unwrap()],
        );
        assert_eq!(fam.maximal_members()[0], expected);
    }

    #[test]
    fn pullback_along_projection() {
        let a = AbelianPGroup::new(2, &[2, 2]).unwrap();
        let c4 = AbelianPGroup::cyclic(2, 2).unwrap();
        let q = Homomorphism::new(a.clone(), c4.clone(), vec![c4.generator(0), c4.zero()]).unwrap();
        let fam = family_pullback(&q, &SubgroupFamily::all_proper(&c4)).unwrap();
        let expected = Subgroup::generated_by(
            &a,
            &[a.element(&[2, 0]).unwrap(), a.element(&[0, 1]).unwrap()],
        );
        assert_eq!(fam.maximal_members(), &[expected]);
        assert!(family_pullback(&q, &SubgroupFamily::empty(&c4)).unwrap().is_empty());
    }

    #[test]
    fn family_of_is_pullback_from_quotient() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        for h in 1..=2 {
            for f in hom_set(&a, h) {
                let q = f.image().quotient_map();
                let direct = family_of(&f);
                let pulled = family_pullback(&q, &SubgroupFamily::all_proper(q.codomain())).unwrap();
                assert_eq!(direct, pulled, "{f}");
            }
        }
    }

    #[test]
    fn lex_least_characters() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        for h in SubgroupFamily::all_proper(&a).maximal_members() {
            let c = maximal_subgroup_character(h).unwrap();
            assert_eq!(a.log_order_of(&c), 1);
            // kernel of the character is h
            for x in a.elements() {
                assert_eq!(a.pairing(&c, &x).is_zero(), h.contains(&x));
            }
        }
    }
}
