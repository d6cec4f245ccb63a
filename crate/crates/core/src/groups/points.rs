//! Level structures and finite subgroups on the constant p-divisible group
//! `(Q_p/Z_p)^m`, enumerated as explicit points.

use super::{AbelianPGroup, Element, QZHom, Subgroup};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Injective homomorphisms `A -> (Q_p/Z_p)^{n+h}`, optionally with prescribed
/// last `h` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelPointSet {
    pub group: AbelianPGroup,
    pub n: usize,
    pub h: usize,
    pub constraint: Option<QZHom>,
    pub points: Vec<QZHom>,
}

/// Subgroups of `((Q_p/Z_p)^{n+h})[p^k]` of order `p^k` projecting onto a
/// prescribed subgroup of the last `h` coordinates.
///
/// Subgroups are represented inside `(Z/p^k)^{n+h}`, coordinate `x` standing
/// for `x / p^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubPointSet {
    pub n: usize,
    pub h: usize,
    pub k: u32,
    pub required_image: Subgroup,
    pub points: Vec<Subgroup>,
}

fn check_constraint(a: &AbelianPGroup, h: usize, constraint: Option<&QZHom>) -> Result<()> {
    if let Some(c) = constraint {
        if c.source() != a || c.target_rank() != h {
            return Err(Error::InvalidArgument(
                "constraint must be a map from the group to h coordinates".into(),
            ));
        }
    }
    Ok(())
}

/// Walks every map with the prescribed coordinates, calling `visit` on the
/// numerator matrix of each injective one.
fn for_each_level_point(
    a: &AbelianPGroup,
    n: usize,
    h: usize,
    constraint: Option<&QZHom>,
    budget: u128,
    mut visit: impl FnMut(&[Vec<u64>]),
) -> Result<()> {
    check_constraint(a, h, constraint)?;
    let m = n + h;
    let free = if constraint.is_some() { n } else { m };
    let required = (a.order() as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let j = a.rank();
    let p = a.p();
    let mut nums = vec![vec![0u64; m]; j];
    if let Some(c) = constraint {
        for i in 0..j {
            for col in 0..h {
                nums[i][n + col] = c.numerator(i, col);
            }
        }
    }
    // slots enumerate (i, col) for the free coordinates in row-major order
    let slots: Vec<(usize, usize)> =
        (0..j).flat_map(|i| (0..free).map(move |col| (i, col))).collect();
    loop {
        if crate::linalg::fp::rank(&socle_rows(p, &nums), p) == j {
            visit(&nums);
        }
        let mut pos = slots.len();
        let mut done = true;
        while pos > 0 {
            pos -= 1;
            let (i, col) = slots[pos];
            nums[i][col] += 1;
            if nums[i][col] < a.modulus(i) {
                done = false;
                break;
            }
            nums[i][col] = 0;
        }
        if done {
            break;
        }
    }
    Ok(())
}

/// Images of the socle generators `p^{k_i-1} e_i`: generator `i` goes to
/// `x / p^{k_i}`, so its socle element goes to `(x mod p) / p`.
fn socle_rows(p: u64, nums: &[Vec<u64>]) -> Vec<Vec<u64>> {
    nums.iter().map(|row| row.iter().map(|&x| x % p).collect()).collect()
}

/// Enumerates the level points; see [`LevelPointSet`].
pub fn level_points(
    a: &AbelianPGroup,
    n: usize,
    h: usize,
    constraint: Option<&QZHom>,
    budget: u128,
) -> Result<LevelPointSet> {
    let mut points = Vec::new();
    for_each_level_point(a, n, h, constraint, budget, |nums| {
        points.push(QZHom::from_numerators(a, n + h, nums));
    })?;
    Ok(LevelPointSet { group: a.clone(), n, h, constraint: constraint.cloned(), points })
}

/// The number of level points, without materialising them.
pub fn count_level_points(
    a: &AbelianPGroup,
    n: usize,
    h: usize,
    constraint: Option<&QZHom>,
    budget: u128,
) -> Result<u64> {
    let mut count = 0u64;
    for_each_level_point(a, n, h, constraint, budget, |_| count += 1)?;
    Ok(count)
}

/// `im(l)` as a subgroup of `(Z/p^K)^m` with `K = log_p |A|`.
pub fn image_subgroup(l: &QZHom) -> Result<Subgroup> {
    if !l.is_injective() {
        return Err(Error::NotInjective);
    }
    let a = l.source();
    let p = a.p();
    let big = a.log_order().max(1);
    let ambient = AbelianPGroup::homocyclic(p, big, l.target_rank())?;
    let gens: Vec<Element> = l
        .images()
        .iter()
        .map(|v| Element(v.entries().iter().map(|q| q.numerator_over(big, p)).collect()))
        .collect();
    Ok(Subgroup::generated_by(&ambient, &gens))
}

/// Re-expresses a subgroup of `(Z/p^e)^h` (coordinates over `p^e`) inside
/// `(Z/p^k)^h`; `None` if it does not fit into the `p^k`-torsion.
fn rescale(s: &Subgroup, k: u32) -> Option<Subgroup> {
    let src = s.ambient();
    let p = src.p();
    let e = src.exponent();
    let h = src.rank();
    let target = AbelianPGroup::homocyclic(p, k, h).ok()?;
    let mut gens = Vec::new();
    for g in s.generators() {
        let mut coords = Vec::with_capacity(h);
        for &x in g.residues() {
            let q = super::QZ::new(x, e, p);
            if q.exponent() > k {
                return None;
            }
            coords.push(q.numerator_over(k, p));
        }
        gens.push(Element(coords));
    }
    Some(Subgroup::generated_by(&target, &gens))
}

/// Enumerates the subgroup points; see [`SubPointSet`].
///
/// `required_image` is a subgroup of some `(Z/p^e)^h`, read as a subgroup of
/// `(Q_p/Z_p)^h`.
pub fn sub_points(n: usize, h: usize, k: u32, required_image: &Subgroup, budget: u128) -> Result<SubPointSet> {
    let src = required_image.ambient();
    if src.rank() != h && !(h == 0 && src.is_trivial()) {
        return Err(Error::InvalidArgument("required image must live in h coordinates".into()));
    }
    let p = src.p();
    if required_image.order() > p.pow(k) {
        return Err(Error::InvalidArgument(format!(
            "required image of order {} exceeds p^k = {}",
            required_image.order(),
            p.pow(k)
        )));
    }
    let m = n + h;
    let kk = k.max(1);
    let Some(required) = rescale(required_image, kk) else {
        return Ok(SubPointSet { n, h, k, required_image: required_image.clone(), points: Vec::new() });
    };
    let ambient = AbelianPGroup::homocyclic(p, kk, m)?;
    let projection_target = AbelianPGroup::homocyclic(p, kk, h)?;
    let projection = super::Homomorphism::new(
        ambient.clone(),
        projection_target.clone(),
        (0..m)
            .map(|c| if c < n { projection_target.zero() } else { projection_target.generator(c - n) })
            .collect(),
    )?;
    let candidates = Subgroup::enumerate(&ambient, Some(k), budget)?;
    let points =
        candidates.into_iter().filter(|s| s.image(&projection) == required).collect();
    Ok(SubPointSet { n, h, k, required_image: required_image.clone(), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{dual_hom, hom_set, LatticeMap};

    const BUDGET: u128 = 1 << 22;

    #[test]
    fn injections_of_cyclic_groups() {
        for p in [2u64, 3, 5] {
            let a = AbelianPGroup::cyclic(p, 1).unwrap();
            assert_eq!(count_level_points(&a, 1, 0, None, BUDGET).unwrap(), p - 1);
        }
        let a = AbelianPGroup::new(2, &[1, 1]).unwrap();
        assert_eq!(count_level_points(&a, 2, 0, None, BUDGET).unwrap(), 6);
    }

    #[test]
    fn constrained_counts_for_klein_four() {
        let a = AbelianPGroup::new(2, &[1, 1]).unwrap();
        let mut total = 0;
        for f in hom_set(&a, 1) {
            let c = dual_hom(&f);
            let count = count_level_points(&a, 1, 1, Some(&c), BUDGET).unwrap();
            assert_eq!(count, if f.images()[0].is_zero() { 0 } else { 2 });
            total += count;
        }
        assert_eq!(total, 6);
        assert_eq!(count_level_points(&a, 1, 1, None, BUDGET).unwrap(), 6);
    }

    #[test]
    fn points_respect_constraint_and_are_injective() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let f = LatticeMap::new(a.clone(), vec![a.element(&[1, 0]).unwrap()]).unwrap();
        let c = dual_hom(&f);
        let set = level_points(&a, 1, 1, Some(&c), BUDGET).unwrap();
        assert!(!set.points.is_empty());
        for l in &set.points {
            assert!(l.is_injective());
            assert_eq!(l.project(1..2), c);
        }
    }

    #[test]
    fn budget_refusal() {
        let a = AbelianPGroup::new(2, &[2, 2]).unwrap();
        assert!(matches!(
            count_level_points(&a, 2, 1, None, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn subgroup_points_small_cases() {
        let triv = Subgroup::trivial(&AbelianPGroup::trivial(2).unwrap());
        assert_eq!(sub_points(1, 0, 1, &triv, BUDGET).unwrap().points.len(), 1);
        let z2 = AbelianPGroup::cyclic(2, 1).unwrap();
        let whole = Subgroup::whole(&z2);
        assert_eq!(sub_points(1, 1, 1, &whole, BUDGET).unwrap().points.len(), 2);
        let z2sq = AbelianPGroup::homocyclic(2, 1, 2).unwrap();
        assert!(sub_points(1, 2, 1, &Subgroup::whole(&z2sq), BUDGET).is_err());
    }

    #[test]
    fn image_of_coordinate_inclusion() {
        let a = AbelianPGroup::cyclic(3, 1).unwrap();
        let l = QZHom::from_numerators(&a, 2, &[vec![1, 0]]);
        let s = image_subgroup(&l).unwrap();
        assert_eq!(s.order(), 3);
        let l2 = QZHom::from_numerators(&a, 2, &[vec![2, 0]]);
        assert_eq!(image_subgroup(&l2).unwrap(), s);
        assert!(image_subgroup(&QZHom::zero(&a, 2)).is_err());
    }
}
