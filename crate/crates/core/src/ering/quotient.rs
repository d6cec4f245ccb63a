use super::algebra::{CoefficientMode, EAlgebra};
use super::ideal::{IdealLattice, Lattice};
use crate::linalg::plattice::{PLattice, QuotientInvariants};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// The coefficient module `R / I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientModule {
    pub mode: CoefficientMode,
    pub p: u64,
    /// Size of the monomial basis of `R`.
    pub basis_size: usize,
    /// Rank of the relation lattice.
    pub relation_rank: usize,
    /// Rank of the torsion-free part (the dimension over `F_p` on the fiber).
    pub free_rank: usize,
    /// Exponents `e` of the torsion invariant factors `p^e`, increasing.
    pub torsion_exponents: Vec<u32>,
}

impl QuotientModule {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.torsion_exponents.iter().map(|&e| num_traits::pow(BigInt::from(self.p), e as usize)).collect()
    }

    /// `log_p` of the order of the torsion part.
    pub fn torsion_log_order(&self) -> u32 {
        self.torsion_exponents.iter().sum()
    }

    /// The multiset of all invariant factors, with free summands recorded as 0.
    pub fn invariant_multiset(&self) -> Vec<u32> {
        let mut v = vec![0u32; self.free_rank];
        v.extend(self.torsion_exponents.iter().copied());
        v.sort_unstable();
        v
    }
}

/// Smith form data of `R / I`.
pub fn quotient(r: &EAlgebra, ideal: &IdealLattice) -> QuotientModule {
    let n = r.rank();
    match ideal.lattice() {
        Lattice::Integral(l) => {
            let inv = QuotientInvariants::of(l);
            QuotientModule {
                mode: r.mode(),
                p: r.p(),
                basis_size: n,
                relation_rank: l.rank(),
                free_rank: inv.free_rank,
                torsion_exponents: inv.torsion_exponents,
            }
        }
        Lattice::Fiber(s) => QuotientModule {
            mode: r.mode(),
            p: r.p(),
            basis_size: n,
            relation_rank: s.rank(),
            free_rank: n - s.rank(),
            torsion_exponents: Vec::new(),
        },
    }
}

/// The p-saturation of the relation lattice; `R` modulo it is the
/// torsion-free part of `R / I`.
pub fn saturated_relations(ideal: &IdealLattice) -> Option<PLattice> {
    match ideal.lattice() {
        Lattice::Integral(l) => Some(l.saturation()),
        Lattice::Fiber(_) => None,
    }
}

/// JSON presentation `{basis, relations, invariant_factors, rank}`.
pub fn quotient_json(r: &EAlgebra, ideal: &IdealLattice) -> serde_json::Value {
    let q = quotient(r, ideal);
    let relations: Vec<Vec<String>> = ideal
        .basis_rows()
        .iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect())
        .collect();
    serde_json::json!({
        "basis": r.basis_labels(),
        "relations": relations,
        "invariant_factors": q.invariant_factors().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "rank": q.free_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ering::{oracle_ideal, transfer_ideal};
    use crate::groups::{AbelianPGroup, Subgroup, SubgroupFamily};

    #[test]
    fn f2_example() {
        let a = AbelianPGroup::new(2, &[1, 1]).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let ideal = transfer_ideal(&r, &SubgroupFamily::all_proper(&a)).unwrap();
        let q = quotient(&r, &ideal);
        assert_eq!(q.free_rank, 0);
        assert_eq!(q.torsion_exponents, vec![1]);
        let small = IdealLattice::generated(&r, &[r.constant(2), r.var(0), r.var(1)]);
        assert!(small.same_ideal(&ideal));
    }

    #[test]
    fn cyclic_four_is_free_of_rank_two() {
        let a = AbelianPGroup::cyclic(2, 2).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let q = quotient(&r, &transfer_ideal(&r, &SubgroupFamily::all_proper(&a)).unwrap());
        assert_eq!((q.free_rank, q.torsion_exponents.len()), (2, 0));
        let z = quotient(&r, &IdealLattice::zero(&r));
        assert_eq!((z.free_rank, z.basis_size), (4, 4));
        let json = quotient_json(&r, &IdealLattice::zero(&r));
        assert_eq!(json["rank"], 4);
    }

    #[test]
    fn oracle_matches_small_groups() {
        for (p, e) in [(2u64, vec![1u32, 1]), (2, vec![2, 1]), (3, vec![1, 1]), (3, vec![2])] {
            let a = AbelianPGroup::new(p, &e).unwrap();
            let r = EAlgebra::integer(&a).unwrap();
            for h in Subgroup::enumerate(&a, Some(a.log_order() - 1), 1 << 20).unwrap() {
                let fam = SubgroupFamily::new(&a, vec![h.clone()]).unwrap();
                let t = transfer_ideal(&r, &fam).unwrap();
                let o = oracle_ideal(&r, &h).unwrap();
                assert!(t.same_ideal(&o), "{a} {h}");
            }
        }
    }
}
