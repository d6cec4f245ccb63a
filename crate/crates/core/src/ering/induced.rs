use super::algebra::{EAlgebra, RingElement};
use super::ideal::{transfer_ideal, transfer_unit};
use crate::error::{Error, Result};
use crate::groups::{family_of, family_pullback, Element, Homomorphism, LatticeMap};

/// The ring map `φ*: E^0(BA') -> E^0(BA)` induced by `φ: A -> A'`, stored by
/// the images of the generators `x'_i`.
#[derive(Clone, Debug)]
pub struct RingMap {
    source: EAlgebra,
    target: EAlgebra,
    images: Vec<RingElement>,
}

/// The character `χ'_i ∘ φ` of `A` for the i-th coordinate character of `A'`.
fn pulled_back_character(phi: &Homomorphism, i: usize) -> Element {
    let a = phi.domain();
    let b = phi.codomain();
    let p = a.p();
    let coords: Vec<i64> = phi
        .images()
        .iter()
        .enumerate()
        .map(|(l, img)| {
            let num = img.residues()[i] as u128 * p.pow(a.exponents()[l]) as u128;
            let den = p.pow(b.exponents()[i]) as u128;
            debug_assert_eq!(num % den, 0);
            (num / den) as i64
        })
        .collect();
    a.element(&coords).expect("coordinates are reduced")
}

/// Builds `φ*` with `x'_i ↦ e(χ'_i ∘ φ)`.
pub fn induced_map(target: &EAlgebra, phi: &Homomorphism, source: &EAlgebra) -> Result<RingMap> {
    if phi.domain() != target.group() || phi.codomain() != source.group() {
        return Err(Error::InvalidArgument("the homomorphism does not match the algebras".into()));
    }
    if target.mode() != source.mode() || target.height() != source.height() {
        return Err(Error::InvalidArgument("the algebras use different coefficient models".into()));
    }
    let images = (0..source.num_vars())
        .map(|i| target.euler_class(&pulled_back_character(phi, i)))
        .collect();
    Ok(RingMap { source: source.clone(), target: target.clone(), images })
}

impl RingMap {
    pub fn source(&self) -> &EAlgebra {
        &self.source
    }

    pub fn target(&self) -> &EAlgebra {
        &self.target
    }

    /// Images of the source generators.
    pub fn generator_images(&self) -> &[RingElement] {
        &self.images
    }

    pub fn apply(&self, a: &RingElement) -> RingElement {
        let t = &self.target;
        // powers[i][e] = images[i]^e
        let powers: Vec<Vec<RingElement>> = self
            .images
            .iter()
            .zip(self.source.bounds())
            .map(|(y, &b)| {
                let mut v = vec![t.one()];
                for _ in 1..b {
                    let next = t.mul(v.last().expect("nonempty"), y);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = t.zero();
        for (idx, c) in a.coeffs().iter().enumerate() {
            if c == &num_bigint::BigInt::from(0) {
                continue;
            }
            let exps = self.source.exponents_of(idx);
            let mut term = t.one();
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = t.mul(&term, &powers[i][e as usize]);
                }
            }
            acc = t.add(&acc, &t.scale(&term, c));
        }
        acc
    }

    /// `self ∘ other`, i.e. `(ψ ∘ φ)*` for `self = φ*` and `other = ψ*`.
    pub fn compose(&self, other: &RingMap) -> Result<RingMap> {
        if other.target.group() != self.source.group() {
            return Err(Error::InvalidArgument("composition of incompatible ring maps".into()));
        }
        let images = other.images.iter().map(|y| self.apply(y)).collect();
        Ok(RingMap { source: other.source.clone(), target: self.target.clone(), images })
    }
}

/// For a surjection `q: A -> A'` checks that `q*` carries the generators of
/// `I_{F_{q f}}` into `I_{F_f}`, so that it descends to the quotients.
/// Returns the index of the first generator that escapes.
pub fn quotient_compatibility(
    target: &EAlgebra,
    q: &Homomorphism,
    source: &EAlgebra,
    f: &LatticeMap,
) -> Result<Option<usize>> {
    let map = induced_map(target, q, source)?;
    let qf = f.then(q)?;
    let source_family = family_of(&qf);
    let target_ideal = transfer_ideal(target, &family_of(f))?;
    for (i, h) in source_family.maximal_members().iter().enumerate() {
        let g = transfer_unit(source, h)?;
        if !target_ideal.contains(&map.apply(&g)) {
            return Ok(Some(i));
        }
    }
    // the pulled back family must sit inside F_f
    let pulled = family_pullback(q, &source_family)?;
    if !pulled.is_subfamily_of(&family_of(f)) {
        return Ok(Some(source_family.maximal_members().len()));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{hom_set, AbelianPGroup, Subgroup};

    #[test]
    fn identity_is_identity() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let m = induced_map(&r, &Homomorphism::identity(&a), &r).unwrap();
        for i in 0..r.num_vars() {
            assert_eq!(m.generator_images()[i], r.var(i));
        }
        let x = r.add(&r.mul(&r.var(0), &r.var(1)), &r.constant(3));
        assert_eq!(m.apply(&x), x);
    }

    #[test]
    fn quotient_of_cyclic_four() {
        let a = AbelianPGroup::cyclic(2, 2).unwrap();
        let b = AbelianPGroup::cyclic(2, 1).unwrap();
        let q = Subgroup::generated_by(&a, &[a.element(&[2]).unwrap()]).quotient_map();
        assert_eq!(q.codomain(), &b);
        let ra = EAlgebra::integer(&a).unwrap();
        let rb = EAlgebra::integer(&b).unwrap();
        let m = induced_map(&ra, &q, &rb).unwrap();
        assert_eq!(ra.display(&m.generator_images()[0]), "x^2 + 2*x");
        // <2>([2](x)) = <4>(x) lies in the ideal for im f = 2Z/4
        let f = &hom_set(&a, 1)[2];
        assert_eq!(quotient_compatibility(&ra, &q, &rb, f).unwrap(), None);
        let g = m.apply(&transfer_unit(&rb, &Subgroup::trivial(&b)).unwrap());
        let fam = family_of(f);
        assert!(transfer_ideal(&ra, &fam).unwrap().contains(&g));
    }

    #[test]
    fn contravariant_functoriality() {
        let a = AbelianPGroup::new(2, &[2, 1]).unwrap();
        let b = AbelianPGroup::new(2, &[2]).unwrap();
        let c = AbelianPGroup::new(2, &[1]).unwrap();
        let phi = Homomorphism::new(a.clone(), b.clone(), vec![b.element(&[1]).unwrap(), b.element(&[2]).unwrap()]).unwrap();
        let psi = Homomorphism::new(b.clone(), c.clone(), vec![c.element(&[1]).unwrap()]).unwrap();
        let ra = EAlgebra::integer(&a).unwrap();
        let rb = EAlgebra::integer(&b).unwrap();
        let rc = EAlgebra::integer(&c).unwrap();
        let phi_star = induced_map(&ra, &phi, &rb).unwrap();
        let psi_star = induced_map(&rb, &psi, &rc).unwrap();
        let composite = induced_map(&ra, &phi.then(&psi).unwrap(), &rc).unwrap();
        let chained = phi_star.compose(&psi_star).unwrap();
        assert_eq!(composite.generator_images(), chained.generator_images());
    }
}
