use super::{AbelianPGroup, Element, Homomorphism};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

/// A subgroup of `A = sum Z/p^{k_i}`, stored as the row Hermite normal form of
/// its preimage lattice in `Z^j` (which contains `sum p^{k_i} Z`).
///
/// The form is upper triangular with diagonal entries `d_i | p^{k_i}` and every
/// entry above a diagonal entry `d_l` reduced into `[0, d_l)`, so two subgroups
/// are equal exactly when their matrices are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    ambient: AbelianPGroup,
    hnf: Vec<Vec<i64>>,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

struct Builder {
    moduli: Vec<i128>,
    rows: Vec<Vec<i128>>,
}

impl Builder {
    fn new(ambient: &AbelianPGroup) -> Self {
        let moduli: Vec<i128> = ambient.moduli().into_iter().map(|m| m as i128).collect();
        let j = moduli.len();
        let rows = (0..j)
            .map(|i| {
                let mut r = vec![0i128; j];
                r[i] = moduli[i];
                r
            })
            .collect();
        Builder { moduli, rows }
    }

    fn insert(&mut self, mut v: Vec<i128>) {
        let j = self.moduli.len();
        for l in 0..j {
            v[l] = v[l].rem_euclid(self.moduli[l]);
        }
        for c in 0..j {
            if v[c] == 0 {
                continue;
            }
            let a = self.rows[c][c];
            let b = v[c];
            let (g, s, t) = ext_gcd(a, b);
            let (ag, bg) = (a / g, b / g);
            let old = self.rows[c].clone();
            for l in c..j {
                let nr = s * old[l] + t * v[l];
                let nv = ag * v[l] - bg * old[l];
                if l == c {
                    self.rows[c][l] = nr;
                    v[l] = nv;
                } else {
                    self.rows[c][l] = nr.rem_euclid(self.moduli[l]);
                    v[l] = nv.rem_euclid(self.moduli[l]);
                }
            }
            debug_assert_eq!(v[c], 0);
        }
    }

    fn finish(mut self, ambient: &AbelianPGroup) -> Subgroup {
        let j = self.moduli.len();
        for i in 0..j {
            for l in i + 1..j {
                let d = self.rows[l][l];
                let q = self.rows[i][l].div_euclid(d);
                if q != 0 {
                    for c in l..j {
                        self.rows[i][c] -= q * self.rows[l][c];
                    }
                }
            }
        }
        Subgroup {
            ambient: ambient.clone(),
            hnf: self.rows.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect(),
        }
    }
}

impl Subgroup {
    pub fn generated_by(ambient: &AbelianPGroup, generators: &[Element]) -> Subgroup {
        let mut b = Builder::new(ambient);
        for g in generators {
            b.insert(g.0.iter().map(|&x| x as i128).collect());
        }
        b.finish(ambient)
    }

    /// `S^⊥`, the characters vanishing on `S`, inside the same presentation.
    pub fn annihilator(&self) -> Subgroup {
        let a = &self.ambient;
        self.generators()
            .iter()
            .fold(Subgroup::whole(a), |acc, g| acc.intersection(&a.character_kernel(g)))
    }

    pub fn trivial(ambient: &AbelianPGroup) -> Subgroup {
        Self::generated_by(ambient, &[])
    }

    pub fn whole(ambient: &AbelianPGroup) -> Subgroup {
        let gens: Vec<Element> = (0..ambient.rank()).map(|i| ambient.generator(i)).collect();
        Self::generated_by(ambient, &gens)
    }

    /// Interprets an upper triangular candidate matrix; returns `None` unless it
    /// is the canonical form of a subgroup.
    fn from_candidate(ambient: &AbelianPGroup, rows: Vec<Vec<i64>>) -> Option<Subgroup> {
        let s = Subgroup { ambient: ambient.clone(), hnf: rows };
        let j = ambient.rank();
        for i in 0..j {
            let mut v = vec![0i128; j];
            v[i] = ambient.modulus(i) as i128;
            if !s.lattice_contains(v, false) {
                return None;
            }
        }
        Some(s)
    }

    pub fn ambient(&self) -> &AbelianPGroup {
        &self.ambient
    }

    /// The canonical generator matrix.
    pub fn hnf(&self) -> &[Vec<i64>] {
        &self.hnf
    }

    pub fn log_order(&self) -> u32 {
        let p = self.ambient.p();
        (0..self.ambient.rank())
            .map(|i| self.ambient.exponents()[i] - super::valuation(self.hnf[i][i] as u64, p))
            .sum()
    }

    pub fn order(&self) -> u64 {
        self.ambient.p().pow(self.log_order())
    }

    pub fn index(&self) -> u64 {
        self.ambient.order() / self.order()
    }

    pub fn is_proper(&self) -> bool {
        self.order() < self.ambient.order()
    }

    fn contains_vector(&self, v: Vec<i128>) -> bool {
        self.lattice_contains(v, true)
    }

    /// Membership in the row lattice of the canonical form; with `modular`
    /// the sublattice `sum p^{k_i} Z` is assumed to be included.
    fn lattice_contains(&self, mut v: Vec<i128>, modular: bool) -> bool {
        let j = self.ambient.rank();
        let moduli = self.ambient.moduli();
        for c in 0..j {
            let d = self.hnf[c][c] as i128;
            if modular {
                v[c] = v[c].rem_euclid(moduli[c] as i128);
            }
            if v[c] % d != 0 {
                return false;
            }
            let q = v[c] / d;
            if q != 0 {
                for l in c..j {
                    v[l] -= q * self.hnf[c][l] as i128;
                }
            }
        }
        true
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.contains_vector(a.0.iter().map(|&x| x as i128).collect())
    }

    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.ambient == self.ambient && other.generators().iter().all(|g| self.contains(g))
    }

    /// Nonzero rows of the canonical form, as elements.
    pub fn generators(&self) -> Vec<Element> {
        let moduli = self.ambient.moduli();
        self.hnf
            .iter()
            .map(|row| {
                Element(
                    row.iter()
                        .zip(&moduli)
                        .map(|(&x, &m)| (x as i128).rem_euclid(m as i128) as u64)
                        .collect(),
                )
            })
            .filter(|e| !e.is_zero())
            .collect()
    }

    /// All elements, each exactly once.
    pub fn elements(&self) -> Vec<Element> {
        let j = self.ambient.rank();
        let moduli = self.ambient.moduli();
        let counts: Vec<u64> = (0..j).map(|i| moduli[i] / self.hnf[i][i] as u64).collect();
        let total: u64 = counts.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        let mut coeffs = vec![0u64; j];
        for _ in 0..total {
            let mut v = vec![0i128; j];
            for i in 0..j {
                if coeffs[i] != 0 {
                    for l in i..j {
                        v[l] += coeffs[i] as i128 * self.hnf[i][l] as i128;
                    }
                }
            }
            out.push(Element(
                v.iter().zip(&moduli).map(|(&x, &m)| x.rem_euclid(m as i128) as u64).collect(),
            ));
            for i in (0..j).rev() {
                coeffs[i] += 1;
                if coeffs[i] < counts[i] {
                    break;
                }
                coeffs[i] = 0;
            }
        }
        out.sort();
        out
    }

    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.generators();
        gens.extend(other.generators());
        Subgroup::generated_by(&self.ambient, &gens)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let (small, big) = if self.order() <= other.order() { (self, other) } else { (other, self) };
        let members: Vec<Element> = small.elements().into_iter().filter(|a| big.contains(a)).collect();
        Subgroup::generated_by(&self.ambient, &members)
    }

    /// `p^t S`.
    pub fn p_power_multiple(&self, t: u32) -> Subgroup {
        let m = self.ambient.p().pow(t) as i64;
        let gens: Vec<Element> = self.generators().iter().map(|g| self.ambient.scale(g, m)).collect();
        Subgroup::generated_by(&self.ambient, &gens)
    }

    /// `S[p^t]`, the elements killed by `p^t`.
    pub fn torsion(&self, t: u32) -> Subgroup {
        let members: Vec<Element> = self
            .elements()
            .into_iter()
            .filter(|a| self.ambient.log_order_of(a) <= t)
            .collect();
        Subgroup::generated_by(&self.ambient, &members)
    }

    /// The isomorphism type of the subgroup as an abstract group.
    pub fn isomorphism_type(&self) -> AbelianPGroup {
        let p = self.ambient.p();
        let elems = self.elements();
        let top = self.ambient.exponent();
        // r_t = number of cyclic factors of exponent >= t
        let mut sizes = vec![0u32; top as usize + 1];
        for a in &elems {
            let o = self.ambient.log_order_of(a) as usize;
            for s in sizes.iter_mut().skip(o) {
                *s += 1;
            }
        }
        let log = |n: u32| {
            let mut k = 0;
            let mut x = n as u64;
            while x > 1 {
                x /= p;
                k += 1;
            }
            k
        };
        let mut exps = Vec::new();
        for t in 1..=top as usize {
            let r_t = log(sizes[t]) - log(sizes[t - 1]);
            let r_next = if t < top as usize { log(sizes[t + 1]) - log(sizes[t]) } else { 0 };
            for _ in 0..(r_t - r_next) {
                exps.push(t as u32);
            }
        }
        AbelianPGroup::new(p, &exps).expect("valid exponents")
    }

    pub fn image(&self, q: &Homomorphism) -> Subgroup {
        let imgs: Vec<Element> = self.generators().iter().map(|g| q.apply(g)).collect();
        Subgroup::generated_by(q.codomain(), &imgs)
    }

    pub fn preimage(&self, q: &Homomorphism) -> Subgroup {
        let members: Vec<Element> =
            q.domain().elements().filter(|a| self.contains(&q.apply(a))).collect();
        Subgroup::generated_by(q.domain(), &members)
    }

    /// The quotient `A/S` as an abstract group together with the projection.
    pub fn quotient_map(&self) -> Homomorphism {
        let ambient = &self.ambient;
        let j = ambient.rank();
        let p = ambient.p();
        let mat: Vec<Vec<i128>> =
            self.hnf.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let (diag, v) = crate::linalg::intmat::smith_with_right_transform(&mat);
        // coordinates with diagonal entry > 1 survive; keep them sorted by size
        let mut keep: Vec<usize> = (0..j).filter(|&i| diag[i] > 1).collect();
        keep.sort_by(|&a, &b| diag[b].cmp(&diag[a]).then(a.cmp(&b)));
        let exps: Vec<u32> =
            keep.iter().map(|&i| super::valuation(diag[i] as u64, p)).collect();
        let codomain = AbelianPGroup::new(p, &exps).expect("valid quotient");
        let images = (0..j)
            .map(|gen| {
                Element(
                    keep.iter()
                        .map(|&c| v[gen][c].rem_euclid(diag[c]) as u64)
                        .collect(),
                )
            })
            .collect();
        Homomorphism::new(ambient.clone(), codomain, images).expect("projection is well defined")
    }

    /// Every subgroup of `ambient`, optionally restricted to order `p^log_order`,
    /// in increasing canonical order.
    pub fn enumerate(ambient: &AbelianPGroup, log_order: Option<u32>, budget: u128) -> Result<Vec<Subgroup>> {
        let j = ambient.rank();
        let p = ambient.p();
        let ks = ambient.exponents().to_vec();
        let mut out = Vec::new();
        let mut examined: u128 = 0;
        // diagonal exponents delta_i in [0, k_i]; subgroup log order = sum (k_i - delta_i)
        let mut delta = vec![0u32; j];
        loop {
            let lo: u32 = ks.iter().zip(&delta).map(|(k, d)| k - d).sum();
            if log_order.is_none_or(|t| t == lo) {
                // off-diagonal slots: row i (delta_i < k_i), column l > i, range [0, p^{delta_l})
                let mut slots = Vec::new();
                for i in 0..j {
                    if delta[i] < ks[i] {
                        for l in i + 1..j {
                            let range = p.pow(delta[l]);
                            if range > 1 {
                                slots.push((i, l, range));
                            }
                        }
                    }
                }
                let mut values = vec![0u64; slots.len()];
                loop {
                    examined += 1;
                    if examined > budget {
                        return Err(Error::BudgetExceeded { required: examined, budget });
                    }
                    let mut rows = vec![vec![0i64; j]; j];
                    for i in 0..j {
                        rows[i][i] = p.pow(delta[i]) as i64;
                    }
                    for (s, &(i, l, _)) in slots.iter().enumerate() {
                        rows[i][l] = values[s] as i64;
                    }
                    if let Some(sg) = Subgroup::from_candidate(ambient, rows) {
                        out.push(sg);
                    }
                    let mut pos = slots.len();
                    let mut done = true;
                    while pos > 0 {
                        pos -= 1;
                        values[pos] += 1;
                        if values[pos] < slots[pos].2 {
                            done = false;
                            break;
                        }
                        values[pos] = 0;
                    }
                    if done {
                        break;
                    }
                }
            }
            let mut pos = j;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                delta[pos] += 1;
                if delta[pos] <= ks[pos] {
                    done = false;
                    break;
                }
                delta[pos] = 0;
            }
            if done {
                break;
            }
        }
        out.sort();
        Ok(out)
    }

    /// Element set, handy for brute-force comparisons.
    pub fn element_set(&self) -> HashSet<Element> {
        self.elements().into_iter().collect()
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self.generators();
        write!(f, "<")?;
        for (i, g) in gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_subgroup_count(g: &AbelianPGroup) -> usize {
        // closure of every pair of elements covers all subgroups of rank <= 2
        let elems: Vec<Element> = g.elements().collect();
        let mut seen = HashSet::new();
        for a in &elems {
            for b in &elems {
                seen.insert(Subgroup::generated_by(g, &[a.clone(), b.clone()]));
            }
        }
        seen.len()
    }

    #[test]
    fn canonical_form_is_representation_independent() {
        let g = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let a = Subgroup::generated_by(&g, &[g.element(&[1, 1]).unwrap()]);
        let b = Subgroup::generated_by(&g, &[g.element(&[3, 1]).unwrap()]);
        assert_eq!(a, b);
        assert_eq!(a.order(), 4);
        let c = Subgroup::generated_by(&g, &[g.element(&[1, 0]).unwrap()]);
        assert_ne!(a, c);
    }

    #[test]
    fn elements_match_order() {
        let g = AbelianPGroup::new(3, &[2, 1]).unwrap();
        for s in Subgroup::enumerate(&g, None, 1 << 20).unwrap() {
            let e = s.elements();
            assert_eq!(e.len() as u64, s.order());
            assert!(e.iter().all(|a| s.contains(a)));
            assert_eq!(Subgroup::generated_by(&g, &e), s);
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for spec in [&[2u32, 1][..], &[1, 1], &[2, 2], &[3, 1], &[1, 1, 1]] {
            let g = AbelianPGroup::new(2, spec).unwrap();
            let all = Subgroup::enumerate(&g, None, 1 << 20).unwrap();
            if g.rank() <= 2 {
                assert_eq!(all.len(), brute_subgroup_count(&g), "{g}");
            }
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), all.len());
        }
        // (Z/2)^3 has 1 + 7 + 7 + 1 subgroups
        let g = AbelianPGroup::new(2, &[1, 1, 1]).unwrap();
        assert_eq!(Subgroup::enumerate(&g, None, 1 << 20).unwrap().len(), 16);
    }

    #[test]
    fn quotient_map_is_surjective_with_right_kernel() {
        let g = AbelianPGroup::new(2, &[2, 2]).unwrap();
        for s in Subgroup::enumerate(&g, None, 1 << 20).unwrap() {
            let q = s.quotient_map();
            assert!(q.is_surjective());
            assert_eq!(q.kernel(), s);
            assert_eq!(q.codomain().order() * s.order(), g.order());
        }
    }

    #[test]
    fn isomorphism_types() {
        let g = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let s = Subgroup::generated_by(&g, &[g.element(&[1, 1]).unwrap()]);
        assert_eq!(s.isomorphism_type().exponents(), &[2]);
        let w = Subgroup::whole(&g);
        assert_eq!(w.isomorphism_type(), g);
        assert!(Subgroup::trivial(&g).isomorphism_type().is_trivial());
    }
}
