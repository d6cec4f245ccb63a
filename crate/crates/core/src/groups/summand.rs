//! Direct summands of finite abelian p-groups.

use super::{AbelianPGroup, Subgroup};
use crate::error::Result;

/// Whether `m` is a direct summand of its ambient group.
///
/// For finite abelian p-groups the summands are exactly the pure subgroups,
/// those with `m ∩ p^t A = p^t m` for every `t`.
pub fn is_summand(m: &Subgroup) -> bool {
    let a = m.ambient();
    let whole = Subgroup::whole(a);
    (1..=a.exponent()).all(|t| m.intersection(&whole.p_power_multiple(t)) == m.p_power_multiple(t))
}

/// The lexicographically least complement of the summand `m`.
fn complement(m: &Subgroup, candidates: &[Subgroup]) -> Subgroup {
    let target = m.ambient().log_order() - m.log_order();
    candidates
        .iter()
        .find(|k| k.log_order() == target && k.intersection(m).order() == 1)
        .cloned()
        .expect("summands have complements")
}

/// A decomposition `A = M + K` with `s ⊆ M` and `|M|` minimal among summands
/// containing `s`. Ties are broken by the least canonical form, first for `M`
/// and then for `K`.
pub fn minimal_summand_split(a: &AbelianPGroup, s: &Subgroup, budget: u128) -> Result<(Subgroup, Subgroup)> {
    Ok(SummandTable::new(a, budget)?.split(s))
}

/// All subgroups of a group with the summands marked, for repeated splits.
#[derive(Clone, Debug)]
pub struct SummandTable {
    all: Vec<Subgroup>,
    /// Summands sorted by order, then canonical form.
    summands: Vec<Subgroup>,
}

impl SummandTable {
    pub fn new(a: &AbelianPGroup, budget: u128) -> Result<Self> {
        let all = Subgroup::enumerate(a, None, budget)?;
        let mut summands: Vec<Subgroup> = all.iter().filter(|m| is_summand(m)).cloned().collect();
        summands.sort_by(|x, y| x.log_order().cmp(&y.log_order()).then_with(|| x.cmp(y)));
        Ok(SummandTable { all, summands })
    }

    /// Every subgroup, in canonical order.
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.all
    }

    /// See [`minimal_summand_split`].
    pub fn split(&self, s: &Subgroup) -> (Subgroup, Subgroup) {
        let m = self
            .summands
            .iter()
            .find(|m| m.contains_subgroup(s))
            .cloned()
            .expect("the whole group is a summand");
        let k = complement(&m, &self.all);
        (m, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_cases() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let (m, k) = minimal_summand_split(&a, &Subgroup::whole(&a), 1 << 20).unwrap();
        assert_eq!(m, Subgroup::whole(&a));
        assert_eq!(k.order(), 1);
        let (m, k) = minimal_summand_split(&a, &Subgroup::trivial(&a), 1 << 20).unwrap();
        assert_eq!(m.order(), 1);
        assert_eq!(k, Subgroup::whole(&a));
    }

    #[test]
    fn socle_of_the_big_factor() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let s = Subgroup::generated_by(&a, &[a.element(&[2, 0]).unwrap()]);
        let (m, k) = minimal_summand_split(&a, &s, 1 << 20).unwrap();
        assert_eq!(m.isomorphism_type().exponents(), &[2]);
        assert_eq!(k.isomorphism_type().exponents(), &[1]);
        assert!(m.contains_subgroup(&s));
        assert_eq!(m.sum(&k), Subgroup::whole(&a));
    }

    #[test]
    fn purity() {
        let a = AbelianPGroup::cyclic(2, 2).unwrap();
        let two = Subgroup::generated_by(&a, &[a.element(&[2]).unwrap()]);
        assert!(!is_summand(&two));
        assert!(is_summand(&Subgroup::whole(&a)));
        assert!(is_summand(&Subgroup::trivial(&a)));
    }
}
