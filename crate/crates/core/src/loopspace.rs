//! The product model `E^0(L^h BA) = prod_{f in Hom(Z_p^h, A)} E^0(BA)`, its
//! transfer ideal factor by factor, and the rational class-function model.

use crate::ering::{quotient, transfer_ideal, EAlgebra, IdealLattice, QuotientModule};
use crate::error::{Error, Result};
use crate::groups::{
    dual_hom, family_of, family_pullback, hom_set, level_points, AbelianPGroup, Element,
    LatticeMap, QZHom, Subgroup, SubgroupFamily,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

fn check_budget(required: u128, budget: u128) -> Result<()> {
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

fn power(base: u64, e: usize) -> u128 {
    (base as u128).saturating_pow(e as u32)
}

/// One copy of the `E^0(BA)` model for every `f: Z_p^h -> A`.
#[derive(Clone, Debug)]
pub struct LoopRing {
    algebra: EAlgebra,
    h: usize,
    factors: Vec<LatticeMap>,
}

pub fn build_loop_ring(algebra: &EAlgebra, h: usize, budget: u128) -> Result<LoopRing> {
    let a = algebra.group();
    check_budget(power(a.order(), h).saturating_mul(algebra.rank() as u128), budget)?;
    Ok(LoopRing { algebra: algebra.clone(), h, factors: hom_set(a, h) })
}

impl LoopRing {
    pub fn group(&self) -> &AbelianPGroup {
        self.algebra.group()
    }

    pub fn algebra(&self) -> &EAlgebra {
        &self.algebra
    }

    pub fn loops(&self) -> usize {
        self.h
    }

    pub fn factors(&self) -> &[LatticeMap] {
        &self.factors
    }

    /// The component of each factor in `Hom(A*, (Q_p/Z_p)^h)`.
    pub fn components(&self) -> Vec<QZHom> {
        self.factors.iter().map(dual_hom).collect()
    }

    /// Whether the component map is a bijection onto `Hom(A*, (Q_p/Z_p)^h)`:
    /// the components are distinct and there are `|A|^h` of them.
    pub fn components_are_bijective(&self) -> bool {
        let comps: BTreeSet<QZHom> = self.components().into_iter().collect();
        comps.len() == self.factors.len() && self.factors.len() as u128 == power(self.group().order(), self.h)
    }
}

/// The factor of the loop transfer ideal at `f`.
#[derive(Clone, Debug)]
pub struct FactorIdeal {
    pub f: LatticeMap,
    pub family: SubgroupFamily,
    pub ideal: Arc<IdealLattice>,
    pub quotient: QuotientModule,
}

impl FactorIdeal {
    /// `{f, family, generators, rank, invariant_factors, level_count}`.
    pub fn to_json(&self, r: &EAlgebra, level_count: Option<u64>) -> serde_json::Value {
        serde_json::json!({
            "f": self.f.encode(),
            "family": self.family.maximal_members().iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "generators": self.ideal.generators().iter().map(|g| r.display(g)).collect::<Vec<_>>(),
            "rank": self.quotient.free_rank,
            "invariant_factors": self.quotient.invariant_factors().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "level_count": level_count,
        })
    }
}

#[derive(Clone, Debug)]
pub struct LoopIdeal {
    pub factors: Vec<FactorIdeal>,
}

impl LoopIdeal {
    /// Total rank of the torsion-free part of the quotient.
    pub fn total_free_rank(&self) -> usize {
        self.factors.iter().map(|x| x.quotient.free_rank).sum()
    }

    pub fn total_torsion_log_order(&self) -> u32 {
        self.factors.iter().map(|x| x.quotient.torsion_log_order()).sum()
    }
}

/// The factor at `f` is `I_{F_f}`. Factors sharing a family share one ideal.
pub fn loop_transfer_ideal(l: &LoopRing) -> Result<LoopIdeal> {
    let families: Vec<SubgroupFamily> = l.factors.iter().map(family_of).collect();
    let mut distinct: BTreeMap<Vec<Subgroup>, usize> = BTreeMap::new();
    let mut reps = Vec::new();
    for fam in &families {
        let key = family_key(fam);
        if let std::collections::btree_map::Entry::Vacant(e) = distinct.entry(key) {
            e.insert(reps.len());
            reps.push(fam.clone());
        }
    }
    let r = &l.algebra;
    let computed: Vec<(Arc<IdealLattice>, QuotientModule)> = reps
        .par_iter()
        .map(|fam| {
            let ideal = transfer_ideal(r, fam)?;
            let q = quotient(r, &ideal);
            Ok((Arc::new(ideal), q))
        })
        .collect::<Result<_>>()?;
    let factors = l
        .factors
        .iter()
        .zip(families)
        .map(|(f, family)| {
            let (ideal, q) = &computed[distinct[&family_key(&family)]];
            FactorIdeal { f: f.clone(), family, ideal: Arc::clone(ideal), quotient: q.clone() }
        })
        .collect();
    Ok(LoopIdeal { factors })
}

fn family_key(fam: &SubgroupFamily) -> Vec<Subgroup> {
    let mut key = fam.maximal_members().to_vec();
    key.sort();
    key
}

/// Recomputes the factor at `f` as `q* F_{q f}` for `q: A -> A / im f`,
/// and compares ideals.
pub fn pullback_cross_check(r: &EAlgebra, f: &LatticeMap) -> Result<bool> {
    let q = f.image().quotient_map();
    let pulled = family_pullback(&q, &family_of(&f.then(&q)?))?;
    let direct = transfer_ideal(r, &family_of(f))?;
    let via = transfer_ideal(r, &pulled)?;
    Ok(direct.same_ideal(&via) && family_key(&pulled) == family_key(&family_of(f)))
}

/// A rational-valued function on pairs `(α, α') ∈ Hom(Z_p^n, A) × Hom(Z_p^h, A)`,
/// all of whose support factors through `support_group`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    pub support_group: Subgroup,
    /// Values keyed by the index of the pair in the model's enumeration.
    pub values: BTreeMap<usize, BigRational>,
}

impl ClassFunction {
    pub fn value(&self, idx: usize) -> BigRational {
        self.values.get(&idx).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.values.iter().filter(|(_, v)| !v.is_zero()).map(|(&k, _)| k).collect()
    }

    /// Pointwise product.
    pub fn mul(&self, other: &ClassFunction) -> ClassFunction {
        let values = self
            .values
            .iter()
            .filter_map(|(k, v)| other.values.get(k).map(|w| (*k, v * w)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        ClassFunction { support_group: self.support_group.intersection(&other.support_group), values }
    }
}

/// Class functions on the pairs `(α, α')`; conjugation is trivial since `A`
/// is abelian, so classes are single pairs.
#[derive(Clone, Debug)]
pub struct CharacterModel {
    group: AbelianPGroup,
    n: usize,
    h: usize,
    pairs: Vec<LatticeMap>,
}

/// Matching of the surviving pairs with the injective duals.
#[derive(Clone, Debug)]
pub struct Bijection {
    pub matched: Vec<(LatticeMap, QZHom)>,
    /// Surviving pairs whose dual is not an injective level point.
    pub unmatched_pairs: Vec<LatticeMap>,
    /// Level points hit by no surviving pair.
    pub unmatched_points: Vec<QZHom>,
}

impl Bijection {
    pub fn is_bijective(&self) -> bool {
        self.unmatched_pairs.is_empty() && self.unmatched_points.is_empty()
    }
}

impl CharacterModel {
    pub fn new(a: &AbelianPGroup, n: usize, h: usize, budget: u128) -> Result<Self> {
        check_budget(power(a.order(), n + h), budget)?;
        Ok(CharacterModel { group: a.clone(), n, h, pairs: hom_set(a, n + h) })
    }

    pub fn group(&self) -> &AbelianPGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The pair at `idx`, as one map `Z_p^{n+h} -> A` with `α` first.
    pub fn pair(&self, idx: usize) -> &LatticeMap {
        &self.pairs[idx]
    }

    /// The `α'` half of the pair at `idx`.
    pub fn loop_part(&self, idx: usize) -> &[Element] {
        &self.pairs[idx].images()[self.n..]
    }

    pub fn factors_through(&self, idx: usize, s: &Subgroup) -> bool {
        self.pairs[idx].images().iter().all(|x| s.contains(x))
    }

    /// The unit of the class functions on `s`.
    pub fn one_on(&self, s: &Subgroup) -> ClassFunction {
        let values = (0..self.pairs.len())
            .filter(|&i| self.factors_through(i, s))
            .map(|i| (i, BigRational::one()))
            .collect();
        ClassFunction { support_group: s.clone(), values }
    }

    /// `Tr_{A',A''}`: extend by zero from pairs factoring through `A'` and
    /// multiply by the index `|A''/A'|`.
    pub fn transfer(&self, gamma: &ClassFunction, to: &Subgroup) -> Result<ClassFunction> {
        if !to.contains_subgroup(&gamma.support_group) {
            return Err(Error::InvalidArgument("transfer target must contain the source".into()));
        }
        let index = BigRational::from_integer(BigInt::from(to.order() / gamma.support_group.order()));
        let values = gamma
            .values
            .iter()
            .filter(|(&i, _)| self.factors_through(i, &gamma.support_group))
            .map(|(&i, v)| (i, v * &index))
            .collect();
        Ok(ClassFunction { support_group: to.clone(), values })
    }

    /// Pairs outside the support of every `Tr_{M,A}(1)` with `M` maximal, i.e.
    /// the support of the quotient by the transfer ideal.
    pub fn quotient_support(&self) -> Vec<usize> {
        let whole = Subgroup::whole(&self.group);
        let mut hit = BTreeSet::new();
        for m in Subgroup::enumerate(&self.group, self.group.log_order().checked_sub(1), u128::MAX)
            .expect("unbounded budget")
        {
            if self.group.is_trivial() {
                break;
            }
            let tr = self.transfer(&self.one_on(&m), &whole).expect("m lies in A");
            hit.extend(tr.support());
        }
        (0..self.pairs.len()).filter(|i| !hit.contains(i)).collect()
    }

    /// Matches surviving pairs `(α, α')` with level points through `(α, α')*`.
    pub fn bijection(&self, budget: u128) -> Result<Bijection> {
        let points = level_points(&self.group, self.n, self.h, None, budget)?;
        let mut remaining: BTreeSet<QZHom> = points.points.into_iter().collect();
        let mut matched = Vec::new();
        let mut unmatched_pairs = Vec::new();
        for i in self.quotient_support() {
            let d = dual_hom(&self.pairs[i]);
            if d.is_injective() && remaining.remove(&d) {
                matched.push((self.pairs[i].clone(), d));
            } else {
                unmatched_pairs.push(self.pairs[i].clone());
            }
        }
        Ok(Bijection { matched, unmatched_pairs, unmatched_points: remaining.into_iter().collect() })
    }

    /// Surviving pairs whose loop part is `f`.
    pub fn fiber_support(&self, f: &LatticeMap) -> Vec<usize> {
        self.quotient_support().into_iter().filter(|&i| self.loop_part(i) == f.images()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::count_level_points;

    #[test]
    fn factor_counts() {
        let a = AbelianPGroup::cyclic(2, 1).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        assert_eq!(build_loop_ring(&r, 0, 1 << 20).unwrap().factors().len(), 1);
        let l = build_loop_ring(&r, 2, 1 << 20).unwrap();
        assert_eq!(l.factors().len(), 4);
        assert!(l.components_are_bijective());
        assert!(matches!(build_loop_ring(&r, 2, 4), Err(Error::BudgetExceeded { required: 8, budget: 4 })));
    }

    #[test]
    fn klein_four_factors() {
        let a = AbelianPGroup::new(2, &[1, 1]).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let l = build_loop_ring(&r, 1, 1 << 20).unwrap();
        let li = loop_transfer_ideal(&l).unwrap();
        let ranks: Vec<usize> = li.factors.iter().map(|x| x.quotient.free_rank).collect();
        assert_eq!(ranks, vec![0, 2, 2, 2]);
        assert_eq!(li.factors[0].quotient.torsion_exponents, vec![1]);
        assert_eq!(li.total_free_rank(), 6);
        for f in l.factors() {
            assert!(pullback_cross_check(&r, f).unwrap());
        }
    }

    #[test]
    fn transfer_formula() {
        let a = AbelianPGroup::new(2, &[2]).unwrap();
        let m = CharacterModel::new(&a, 1, 1, 1 << 20).unwrap();
        let sub = Subgroup::generated_by(&a, &[a.element(&[2]).unwrap()]);
        let whole = Subgroup::whole(&a);
        let tr = m.transfer(&m.one_on(&sub), &whole).unwrap();
        for i in 0..m.len() {
            let expected = if m.factors_through(i, &sub) { 2 } else { 0 };
            assert_eq!(tr.value(i), BigRational::from_integer(BigInt::from(expected)));
        }
        let triv = Subgroup::trivial(&a);
        let g = m.one_on(&triv);
        let two_step = m.transfer(&m.transfer(&g, &sub).unwrap(), &whole).unwrap();
        assert_eq!(two_step, m.transfer(&g, &whole).unwrap());
    }

    #[test]
    fn lemma_bijection_small() {
        let a = AbelianPGroup::new(2, &[1, 1]).unwrap();
        let m = CharacterModel::new(&a, 1, 1, 1 << 20).unwrap();
        let b = m.bijection(1 << 20).unwrap();
        assert!(b.is_bijective());
        assert_eq!(b.matched.len() as u64, count_level_points(&a, 1, 1, None, 1 << 20).unwrap());
    }
}
