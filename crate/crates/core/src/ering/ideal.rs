use super::algebra::{CoefficientMode, EAlgebra, RingElement};
use crate::error::Result;
use crate::groups::{maximal_subgroup_character, Subgroup, SubgroupFamily};
use crate::linalg::fp::FpSpace;
use crate::linalg::plattice::PLattice;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

/// The coefficient module spanned by an ideal: a `Z_(p)`-lattice in integer
/// mode and an `F_p`-subspace on the fiber.
#[derive(Clone, Debug)]
pub enum Lattice {
    Integral(PLattice),
    Fiber(FpSpace),
}

/// An ideal of an [`EAlgebra`], with the lattice spanned by all products of
/// generators with basis monomials.
#[derive(Clone, Debug)]
pub struct IdealLattice {
    generators: Vec<RingElement>,
    lattice: Lattice,
}

fn to_fp(v: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    v.iter().map(|x| x.mod_floor(&pb).to_u64().expect("reduced")).collect()
}

impl IdealLattice {
    pub fn zero(r: &EAlgebra) -> Self {
        let lattice = match r.mode() {
            CoefficientMode::IntegerExact => Lattice::Integral(PLattice::new(r.p(), r.rank())),
            CoefficientMode::FpFiber => Lattice::Fiber(FpSpace::new(r.p(), r.rank())),
        };
        IdealLattice { generators: Vec::new(), lattice }
    }

    pub fn generated(r: &EAlgebra, generators: &[RingElement]) -> Self {
        let mut ideal = Self::zero(r);
        for g in generators {
            ideal.add_generator(r, g);
        }
        ideal
    }

    /// Adds `g` together with all its monomial multiples.
    pub fn add_generator(&mut self, r: &EAlgebra, g: &RingElement) {
        self.generators.push(g.clone());
        let p = r.p();
        let lattice = &mut self.lattice;
        r.for_each_monomial_multiple(g, |_, row| match lattice {
            Lattice::Integral(l) => {
                l.insert(row.coeffs());
            }
            Lattice::Fiber(s) => {
                s.insert(to_fp(row.coeffs(), p));
            }
        });
    }

    /// Adds rows that are already known to lie in the ideal's span.
    pub(crate) fn absorb_rows<'a>(&mut self, rows: impl IntoIterator<Item = &'a RingElement>, p: u64) {
        for row in rows {
            match &mut self.lattice {
                Lattice::Integral(l) => {
                    l.insert(row.coeffs());
                }
                Lattice::Fiber(s) => {
                    s.insert(to_fp(row.coeffs(), p));
                }
            }
        }
    }

    pub(crate) fn push_generator_record(&mut self, g: RingElement) {
        self.generators.push(g);
    }

    pub fn generators(&self) -> &[RingElement] {
        &self.generators
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Rank of the span (over `Z_(p)`, or dimension over `F_p`).
    pub fn rank(&self) -> usize {
        match &self.lattice {
            Lattice::Integral(l) => l.rank(),
            Lattice::Fiber(s) => s.rank(),
        }
    }

    pub fn contains(&self, a: &RingElement) -> bool {
        match &self.lattice {
            Lattice::Integral(l) => l.contains(a.coeffs()),
            Lattice::Fiber(s) => s.contains(&to_fp(a.coeffs(), s.p())),
        }
    }

    /// Basis rows of the span, as integers.
    pub fn basis_rows(&self) -> Vec<Vec<BigInt>> {
        match &self.lattice {
            Lattice::Integral(l) => l.basis(),
            Lattice::Fiber(s) => s
                .rows()
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        }
    }

    pub fn is_subideal_of(&self, other: &IdealLattice) -> bool {
        match (&self.lattice, &other.lattice) {
            (Lattice::Integral(a), Lattice::Integral(b)) => a.is_sublattice_of(b),
            (Lattice::Fiber(a), Lattice::Fiber(b)) => a.is_subspace_of(b),
            _ => false,
        }
    }

    pub fn same_ideal(&self, other: &IdealLattice) -> bool {
        self.rank() == other.rank() && self.is_subideal_of(other) && other.is_subideal_of(self)
    }
}

/// `Tr_{H,A}(1) = <p>(e(chi_H))` for an index-p subgroup `H`, with `chi_H` the
/// lexicographically least character with kernel `H`.
pub fn transfer_unit(r: &EAlgebra, h: &Subgroup) -> Result<RingElement> {
    let chi = maximal_subgroup_character(h)?;
    Ok(r.angle_p(&r.euler_class(&chi)))
}

/// The ideal generated by the transfers from the members of `family`.
pub fn transfer_ideal(r: &EAlgebra, family: &SubgroupFamily) -> Result<IdealLattice> {
    let gens = family
        .maximal_members()
        .iter()
        .map(|h| transfer_unit(r, h))
        .collect::<Result<Vec<_>>>()?;
    Ok(IdealLattice::generated(r, &gens))
}
