use levelring::ering::{quotient, transfer_ideal, EAlgebra, RingElement};
use levelring::groups::{
    count_level_points, dual_hom, dual_qzhom, family_of, hom_set, AbelianPGroup, Element, LatticeMap, QZHom, Subgroup,
};
use levelring::linalg::rational::QSpace;
use num_bigint::BigInt;
use proptest::prelude::*;

fn small_group() -> impl Strategy<Value = AbelianPGroup> {
    prop_oneof![
        Just((2u64, vec![1u32])),
        Just((2, vec![2])),
        Just((2, vec![1, 1])),
        Just((2, vec![2, 1])),
        Just((3, vec![1])),
        Just((3, vec![1, 1])),
    ]
    .prop_map(|(p, e)| AbelianPGroup::new(p, &e).unwrap())
}

fn element_of(a: &AbelianPGroup) -> impl Strategy<Value = Element> {
    let a = a.clone();
    (0..a.order() as usize).prop_map(move |i| a.element_at(i))
}

fn ring_element(r: &EAlgebra) -> impl Strategy<Value = RingElement> {
    let r = r.clone();
    prop::collection::vec(-5i64..=5, r.rank())
        .prop_map(move |c| r.element(c.into_iter().map(BigInt::from).collect()).unwrap())
}

fn group_with_elements() -> impl Strategy<Value = (AbelianPGroup, Element, Element)> {
    small_group().prop_flat_map(|a| {
        let x = element_of(&a);
        let y = element_of(&a);
        (Just(a), x, y)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_is_commutative_and_associative(
        (r, x, y, z) in small_group().prop_flat_map(|a| {
            let r = EAlgebra::integer(&a).unwrap();
            (Just(r.clone()), ring_element(&r), ring_element(&r), ring_element(&r))
        })
    ) {
        prop_assert_eq!(r.mul(&x, &y), r.mul(&y, &x));
        prop_assert_eq!(r.mul(&r.mul(&x, &y), &z), r.mul(&x, &r.mul(&y, &z)));
        prop_assert_eq!(r.mul(&x, &r.add(&y, &z)), r.add(&r.mul(&x, &y), &r.mul(&x, &z)));
    }

    #[test]
    fn euler_classes_add_by_the_formal_law((a, c, d) in group_with_elements()) {
        let r = EAlgebra::integer(&a).unwrap();
        let lhs = r.euler_class(&a.add(&c, &d));
        let rhs = r.formal_sum(&r.euler_class(&c), &r.euler_class(&d)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn euler_classes_add_on_the_fiber((a, c, d) in group_with_elements()) {
        prop_assume!(a.order() <= 4);
        let r = EAlgebra::fiber(&a, 1, None).unwrap();
        let lhs = r.euler_class(&a.add(&c, &d));
        let rhs = r.formal_sum(&r.euler_class(&c), &r.euler_class(&d)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn subgroup_order_and_annihilator((a, x, y) in group_with_elements()) {
        let s = Subgroup::generated_by(&a, &[x, y]);
        prop_assert_eq!(s.order() * s.index(), a.order());
        let perp = s.annihilator();
        prop_assert_eq!(s.order() * perp.order(), a.order());
        prop_assert_eq!(perp.annihilator(), s.clone());
        // brute-force membership: every element of s pairs to zero with perp
        for g in s.elements() {
            for c in perp.elements() {
                prop_assert_eq!(a.pairing_numerator(&c, &g), 0);
            }
        }
    }

    #[test]
    fn duality_round_trips((a, x, y) in group_with_elements()) {
        let f = LatticeMap::new(a.clone(), vec![x, y]).unwrap();
        prop_assert_eq!(dual_qzhom(&dual_hom(&f)), f);
    }

    #[test]
    fn quotient_ranks_are_consistent(
        (a, i) in small_group().prop_flat_map(|a| {
            let n = a.order() as usize;
            (Just(a), 0..n)
        })
    ) {
        let r = EAlgebra::integer(&a).unwrap();
        let f = &hom_set(&a, 1)[i];
        let q = quotient(&r, &transfer_ideal(&r, &family_of(f)).unwrap());
        prop_assert_eq!(q.relation_rank + q.free_rank, q.basis_size);
        prop_assert!(q.torsion_exponents.len() <= q.relation_rank);
    }

    #[test]
    fn back_substitution_keeps_the_span(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 0..6),
        probe in prop::collection::vec(-4i64..=4, 4),
    ) {
        let big = |v: &Vec<i64>| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let mut s = QSpace::from_rows(4, rows.iter().map(big));
        let before = s.contains(&big(&probe));
        let rank = s.rank();
        s.back_substitute();
        prop_assert_eq!(s.rank(), rank);
        prop_assert_eq!(s.contains(&big(&probe)), before);
        for r in &rows {
            prop_assert!(s.contains(&big(r)));
        }
    }
}

/// Injections `A -> (Q_p/Z_p)^n` counted by listing every homomorphism and
/// testing each nonzero element.
fn brute_force_injections(a: &AbelianPGroup, n: usize) -> u64 {
    let slots: Vec<u64> = a.moduli().iter().flat_map(|&m| std::iter::repeat_n(m, n)).collect();
    let total: u64 = slots.iter().product();
    let mut count = 0;
    for mut code in 0..total {
        let mut nums = vec![vec![0u64; n]; a.rank()];
        for (s, &m) in slots.iter().enumerate() {
            nums[s / n][s % n] = code % m;
            code /= m;
        }
        let g = QZHom::from_numerators(a, n, &nums);
        if a.elements().all(|x| x.is_zero() || !g.apply(&x).is_zero()) {
            count += 1;
        }
    }
    count
}

#[test]
fn level_counts_match_brute_force() {
    for (p, e) in [(2u64, vec![1u32]), (2, vec![2]), (2, vec![1, 1]), (2, vec![2, 1]), (3, vec![1, 1])] {
        let a = AbelianPGroup::new(p, &e).unwrap();
        for n in 1..=2 {
            let expected = brute_force_injections(&a, n);
            assert_eq!(count_level_points(&a, n, 0, None, 1 << 20).unwrap(), expected, "{a} n={n}");
        }
    }
}
