//! The permutation action of `Z_p^h` on `A` by translation through `f`.

use super::{AbelianPGroup, Element, LatticeMap};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Orbit decomposition of `A` under translation by `im f`, with translations
/// identifying the orbit of `0` with every other orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotypicityWitness {
    /// Orbits in order of their least element; the first contains `0`.
    pub orbits: Vec<Vec<Element>>,
    /// `shifts[r]` maps orbit 0 onto orbit `r` by `x -> x + shifts[r]`.
    pub shifts: Vec<Element>,
    pub monotypical: bool,
}

/// Decomposes `A` into orbits of the translation action and checks that every
/// orbit is isomorphic to the orbit of `0` as a `Z_p^h`-set.
pub fn monotypicity_check(f: &LatticeMap) -> MonotypicityWitness {
    let a: &AbelianPGroup = f.target();
    let mut seen = vec![false; a.order() as usize];
    let mut orbits: Vec<Vec<Element>> = Vec::new();
    for start in a.elements() {
        if seen[a.index_of(&start)] {
            continue;
        }
        // closure under the generators; A is finite so this is the orbit
        let mut orbit = BTreeSet::new();
        let mut stack = vec![start.clone()];
        seen[a.index_of(&start)] = true;
        while let Some(x) = stack.pop() {
            for g in f.images() {
                let y = a.add(&x, g);
                let idx = a.index_of(&y);
                if !seen[idx] {
                    seen[idx] = true;
                    stack.push(y);
                }
            }
            orbit.insert(x);
        }
        orbits.push(orbit.into_iter().collect());
    }

    let base = &orbits[0];
    let mut shifts = Vec::with_capacity(orbits.len());
    let mut monotypical = true;
    for orbit in &orbits {
        let shift = a.sub(&orbit[0], &base[0]);
        let members: BTreeSet<&Element> = orbit.iter().collect();
        let translated: BTreeSet<Element> = base.iter().map(|x| a.add(x, &shift)).collect();
        let bijective = translated.len() == orbit.len() && translated.iter().all(|y| members.contains(y));
        // equivariance: (x + g) + s = (x + s) + g for every generator image g
        let equivariant = base.iter().all(|x| {
            f.images()
                .iter()
                .all(|g| a.add(&a.add(x, g), &shift) == a.add(&a.add(x, &shift), g))
        });
        monotypical &= bijective && equivariant;
        shifts.push(shift);
    }
    MonotypicityWitness { orbits, shifts, monotypical }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_map_gives_singletons() {
        let a = AbelianPGroup::new(2, &[1, 1]).unwrap();
        let w = monotypicity_check(&LatticeMap::zero(&a, 2));
        assert_eq!(w.orbits.len(), 4);
        assert!(w.monotypical);
    }

    #[test]
    fn surjective_map_gives_one_orbit() {
        let a = AbelianPGroup::cyclic(3, 2).unwrap();
        let f = LatticeMap::new(a.clone(), vec![a.generator(0)]).unwrap();
        let w = monotypicity_check(&f);
        assert_eq!(w.orbits.len(), 1);
        assert!(w.monotypical);
    }

    #[test]
    fn index_two_image_in_z4() {
        let a = AbelianPGroup::cyclic(2, 2).unwrap();
        let f = LatticeMap::new(a.clone(), vec![a.element(&[2]).unwrap()]).unwrap();
        let w = monotypicity_check(&f);
        assert_eq!(w.orbits.len(), 2);
        assert!(w.orbits.iter().all(|o| o.len() == 2));
        assert!(w.monotypical);
    }
}
