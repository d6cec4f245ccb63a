use crate::error::{Error, Result};
use crate::fgl::{honda_law, variable_names, FglSpec, FglVariant, Series};
use crate::groups::{AbelianPGroup, Element};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientMode {
    /// Height one over the integers, with the multiplicative law.
    IntegerExact,
    /// The special fiber at height `n` over `F_p`, with the Honda law.
    FpFiber,
}

/// A free module element of the algebra, as a coefficient vector over the
/// monomial basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElement {
    coeffs: Vec<BigInt>,
}

impl RingElement {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// A finite free model of `E^0(BA) = E^0[[x_1..x_j]] / ([p^{k_i}](x_i))`.
///
/// The basis consists of the monomials `x^a` with `a_i < p^{k_i n}`, ordered
/// in mixed radix with the first variable most significant. In integer mode
/// `x_i^{p^{k_i}}` is rewritten using the monic polynomial `(1+x)^{p^k} - 1`;
/// on the fiber it is zero.
#[derive(Clone, Debug)]
pub struct EAlgebra {
    group: AbelianPGroup,
    fgl: FglSpec,
    mode: CoefficientMode,
    bounds: Vec<u32>,
    strides: Vec<usize>,
    size: usize,
    /// `x_i^{B_i} = sum_e relation[i][e] x_i^e`
    relation: Vec<Vec<BigInt>>,
    /// `(i, F_i(y))` with `F(x, y) = sum_i x^i F_i(y)`, for the fiber law
    law_rows: Vec<(u32, Series)>,
}

/// Smallest truncation degree that makes formal sums exact in the fiber model
/// of `A` at height `n`.
pub fn required_truncation(a: &AbelianPGroup, n: u32) -> u32 {
    let p = a.p() as u32;
    let total: u32 = a.exponents().iter().map(|&k| p.pow(k * n) - 1).sum();
    total.max(2)
}

impl EAlgebra {
    /// Builds the model; the law must match the mode.
    pub fn build(a: &AbelianPGroup, mode: CoefficientMode, fgl: FglSpec) -> Result<Self> {
        if fgl.p() != a.p() {
            return Err(Error::InvalidArgument("law and group have different primes".into()));
        }
        let n = match (mode, fgl.variant()) {
            (CoefficientMode::IntegerExact, FglVariant::Multiplicative) => 1,
            (CoefficientMode::FpFiber, FglVariant::HondaFiber(n)) => {
                let need = required_truncation(a, n);
                if fgl.truncation_degree().unwrap_or(0) < need {
                    return Err(Error::InvalidArgument(format!(
                        "the law must be truncated at degree >= {need} for this group"
                    )));
                }
                n
            }
            (mode, variant) => {
                return Err(Error::IncompatibleMode {
                    mode: format!("{mode:?}"),
                    fgl: format!("{variant:?}"),
                })
            }
        };
        let p = a.p();
        let bounds: Vec<u32> = a.exponents().iter().map(|&k| (p as u32).pow(k * n)).collect();
        let j = bounds.len();
        let mut strides = vec![1usize; j];
        for i in (0..j.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * bounds[i + 1] as usize;
        }
        let size: usize = bounds.iter().map(|&b| b as usize).product();
        let relation = a
            .exponents()
            .iter()
            .zip(&bounds)
            .map(|(&k, &b)| match mode {
                CoefficientMode::IntegerExact => {
                    let g = fgl.p_series(k);
                    (0..b).map(|e| -g.coefficient(&[e])).collect()
                }
                CoefficientMode::FpFiber => vec![BigInt::zero(); b as usize],
            })
            .collect();
        let law_rows = match mode {
            CoefficientMode::IntegerExact => Vec::new(),
            CoefficientMode::FpFiber => {
                let mut rows: std::collections::BTreeMap<u32, Series> = Default::default();
                for (e, c) in fgl.law().terms() {
                    let row = rows.entry(e[0]).or_insert_with(|| Series::zero(1, Some(p)));
                    row.add_term(vec![e[1]], c.clone());
                }
                rows.into_iter().collect()
            }
        };
        Ok(EAlgebra { group: a.clone(), fgl, mode, bounds, strides, size, relation, law_rows })
    }

    /// The height one model over the integers.
    pub fn integer(a: &AbelianPGroup) -> Result<Self> {
        Self::build(a, CoefficientMode::IntegerExact, FglSpec::multiplicative(a.p())?)
    }

    /// The fiber model at height `n`; `truncation` defaults to the smallest
    /// exact value.
    pub fn fiber(a: &AbelianPGroup, n: u32, truncation: Option<u32>) -> Result<Self> {
        let d = truncation.unwrap_or_else(|| required_truncation(a, n));
        Self::build(a, CoefficientMode::FpFiber, honda_law(a.p(), n, d)?)
    }

    pub fn group(&self) -> &AbelianPGroup {
        &self.group
    }

    pub fn fgl(&self) -> &FglSpec {
        &self.fgl
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    pub fn p(&self) -> u64 {
        self.group.p()
    }

    pub fn height(&self) -> u32 {
        self.fgl.height()
    }

    /// Rank of the algebra over its coefficients, `|A|^n`.
    pub fn rank(&self) -> usize {
        self.size
    }

    /// Nilpotency bounds `p^{k_i n}` of the variables.
    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn num_vars(&self) -> usize {
        self.bounds.len()
    }

    /// Basis index of the monomial with exponents `exps` (all in range).
    pub fn index_of(&self, exps: &[u32]) -> usize {
        exps.iter().zip(&self.strides).map(|(&e, &s)| e as usize * s).sum()
    }

    /// Exponent vector of basis monomial `idx`.
    pub fn exponents_of(&self, idx: usize) -> Vec<u32> {
        self.strides
            .iter()
            .zip(&self.bounds)
            .map(|(&s, &b)| ((idx / s) % b as usize) as u32)
            .collect()
    }

    fn reduce_coeff(&self, c: BigInt) -> BigInt {
        match self.mode {
            CoefficientMode::IntegerExact => c,
            CoefficientMode::FpFiber => c.mod_floor(&BigInt::from(self.p())),
        }
    }

    fn normalize(&self, mut coeffs: Vec<BigInt>) -> RingElement {
        if self.mode == CoefficientMode::FpFiber {
            let p = BigInt::from(self.p());
            for c in coeffs.iter_mut() {
                *c = c.mod_floor(&p);
            }
        }
        RingElement { coeffs }
    }

    pub fn element(&self, coeffs: Vec<BigInt>) -> Result<RingElement> {
        if coeffs.len() != self.size {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.size,
                coeffs.len()
            )));
        }
        Ok(self.normalize(coeffs))
    }

    pub fn zero(&self) -> RingElement {
        RingElement { coeffs: vec![BigInt::zero(); self.size] }
    }

    pub fn constant(&self, c: i64) -> RingElement {
        let mut z = self.zero();
        z.coeffs[0] = self.reduce_coeff(BigInt::from(c));
        z
    }

    pub fn one(&self) -> RingElement {
        self.constant(1)
    }

    /// The basis monomial `x^exps`; exponents must be below the bounds.
    pub fn monomial(&self, exps: &[u32]) -> RingElement {
        let mut z = self.zero();
        z.coeffs[self.index_of(exps)] = BigInt::one();
        z
    }

    pub fn var(&self, i: usize) -> RingElement {
        self.mul_by_var(&self.one(), i)
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.normalize(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.normalize(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        self.normalize(a.coeffs.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &RingElement, k: &BigInt) -> RingElement {
        self.normalize(a.coeffs.iter().map(|x| x * k).collect())
    }

    /// `a * x_i`.
    pub fn mul_by_var(&self, a: &RingElement, i: usize) -> RingElement {
        let mut out = vec![BigInt::zero(); self.size];
        let stride = self.strides[i];
        let bound = self.bounds[i] as usize;
        for (idx, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (idx / stride) % bound;
            if e + 1 < bound {
                out[idx + stride] += c;
            } else {
                let base = idx - e * stride;
                for (f, r) in self.relation[i].iter().enumerate() {
                    if !r.is_zero() {
                        out[base + f * stride] += c * r;
                    }
                }
            }
        }
        self.normalize(out)
    }

    /// Calls `visit(idx, a * x^exps(idx))` for every basis monomial, in basis
    /// order.
    pub fn for_each_monomial_multiple(&self, a: &RingElement, mut visit: impl FnMut(usize, &RingElement)) {
        fn rec(
            r: &EAlgebra,
            i: usize,
            idx: usize,
            cur: RingElement,
            visit: &mut dyn FnMut(usize, &RingElement),
        ) {
            if i == r.bounds.len() {
                visit(idx, &cur);
                return;
            }
            let mut cur = cur;
            for e in 0..r.bounds[i] as usize {
                if e + 1 < r.bounds[i] as usize {
                    let next = r.mul_by_var(&cur, i);
                    rec(r, i + 1, idx + e * r.strides[i], cur, visit);
                    cur = next;
                } else {
                    rec(r, i + 1, idx + e * r.strides[i], cur, visit);
                    break;
                }
            }
        }
        rec(self, 0, 0, a.clone(), &mut visit);
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let mut acc = vec![BigInt::zero(); self.size];
        self.for_each_monomial_multiple(a, |idx, prod| {
            let c = &b.coeffs[idx];
            if !c.is_zero() {
                for (o, x) in acc.iter_mut().zip(&prod.coeffs) {
                    if !x.is_zero() {
                        *o += c * x;
                    }
                }
            }
        });
        self.normalize(acc)
    }

    pub fn pow(&self, a: &RingElement, k: u64) -> RingElement {
        let mut result = self.one();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Evaluates a univariate polynomial at `y` by Horner's rule.
    pub fn eval_univariate(&self, s: &Series, y: &RingElement) -> RingElement {
        let Some(deg) = s.degree() else { return self.zero() };
        let mut acc = self.zero();
        for e in (0..=deg).rev() {
            acc = self.mul(&acc, y);
            let c = s.coefficient(&[e]);
            if !c.is_zero() {
                acc.coeffs[0] = self.reduce_coeff(&acc.coeffs[0] + c);
            }
        }
        acc
    }

    /// Interprets a polynomial in the variables `x_1..x_j`.
    pub fn from_series(&self, s: &Series) -> Result<RingElement> {
        if s.nvars() != self.num_vars() {
            return Err(Error::InvalidArgument("series has the wrong number of variables".into()));
        }
        let mut acc = self.zero();
        for (e, c) in s.terms() {
            let mut term = self.constant(1);
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = self.mul_by_var(&term, i);
                }
            }
            acc = self.add(&acc, &self.scale(&term, c));
        }
        Ok(acc)
    }

    pub fn to_series(&self, a: &RingElement) -> Series {
        let modulus = match self.mode {
            CoefficientMode::IntegerExact => None,
            CoefficientMode::FpFiber => Some(self.p()),
        };
        Series::from_terms(
            self.num_vars(),
            modulus,
            a.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(idx, c)| (self.exponents_of(idx), c.clone())),
        )
    }

    pub fn display(&self, a: &RingElement) -> String {
        self.to_series(a).display_with(&variable_names(self.num_vars()))
    }

    /// `a +_F b`; both must lie in the augmentation ideal.
    pub fn formal_sum(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        if !a.coeffs[0].is_zero() || !b.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        match self.mode {
            CoefficientMode::IntegerExact => {
                let ab = self.mul(a, b);
                Ok(self.add(&self.add(a, b), &ab))
            }
            CoefficientMode::FpFiber => {
                // F(a, b) = sum_i a^i F_i(b)
                let mut acc = self.zero();
                let mut a_power = self.one();
                let mut current = 0u32;
                for (i, row) in &self.law_rows {
                    while current < *i {
                        a_power = self.mul(&a_power, a);
                        current += 1;
                    }
                    if a_power.is_zero() {
                        break;
                    }
                    let fb = self.eval_univariate(row, b);
                    acc = self.add(&acc, &self.mul(&a_power, &fb));
                }
                Ok(acc)
            }
        }
    }

    /// `[m](y)` for `y` in the augmentation ideal and `m >= 0`.
    pub fn multiple(&self, y: &RingElement, m: u64) -> RingElement {
        match self.mode {
            CoefficientMode::IntegerExact => {
                let one = self.one();
                self.sub(&self.pow(&self.add(&one, y), m), &one)
            }
            CoefficientMode::FpFiber => self.eval_univariate(&self.fgl.multiple(m), y),
        }
    }

    /// The Euler class `e(chi) = [c_1](x_1) +_F ... +_F [c_j](x_j)` of the
    /// character with coordinates `c` in the self-dual presentation.
    pub fn euler_class(&self, chi: &Element) -> RingElement {
        let mut acc = self.zero();
        for (i, &c) in chi.residues().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = self.multiple(&self.var(i), c);
            acc = self.formal_sum(&acc, &term).expect("augmentation ideal is closed");
        }
        acc
    }

    /// `<p>(y) = [p](y) / y`.
    pub fn angle_p(&self, y: &RingElement) -> RingElement {
        let s = self.fgl.angle_series(1).expect("k = 1 is valid");
        self.eval_univariate(&s, y)
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let names = variable_names(self.num_vars());
        (0..self.size)
            .map(|idx| {
                let e = self.exponents_of(idx);
                let parts: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                    .collect();
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join("*")
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        let z2 = AbelianPGroup::cyclic(2, 1).unwrap();
        assert_eq!(EAlgebra::integer(&z2).unwrap().rank(), 2);
        let triv = AbelianPGroup::trivial(3).unwrap();
        assert_eq!(EAlgebra::integer(&triv).unwrap().rank(), 1);
        let klein = AbelianPGroup::new(2, &[1, 1]).unwrap();
        let r = EAlgebra::fiber(&klein, 2, None).unwrap();
        assert_eq!(r.rank(), 16);
        assert_eq!(r.bounds(), &[4, 4]);
    }

    #[test]
    fn incompatible_modes_are_rejected() {
        let z2 = AbelianPGroup::cyclic(2, 1).unwrap();
        let err = EAlgebra::build(&z2, CoefficientMode::FpFiber, FglSpec::multiplicative(2).unwrap());
        assert!(matches!(err, Err(Error::IncompatibleMode { .. })));
    }

    #[test]
    fn relation_of_z2() {
        let z2 = AbelianPGroup::cyclic(2, 1).unwrap();
        let r = EAlgebra::integer(&z2).unwrap();
        let x = r.var(0);
        assert_eq!(r.display(&r.mul(&x, &x)), "-2*x");
    }

    #[test]
    fn euler_class_of_product_character() {
        let klein = AbelianPGroup::new(2, &[1, 1]).unwrap();
        let r = EAlgebra::integer(&klein).unwrap();
        let e = r.euler_class(&klein.element(&[1, 1]).unwrap());
        assert_eq!(r.display(&e), "x*y + x + y");
        assert_eq!(r.display(&r.angle_p(&e)), "x*y + x + y + 2");
    }

    #[test]
    fn multiplication_is_associative_and_commutative() {
        let a = AbelianPGroup::new(3, &[1, 1]).unwrap();
        let r = EAlgebra::integer(&a).unwrap();
        let u = r.add(&r.var(0), &r.constant(2));
        let v = r.add(&r.mul(&r.var(0), &r.var(1)), &r.var(1));
        let w = r.sub(&r.var(1), &r.constant(5));
        assert_eq!(r.mul(&u, &v), r.mul(&v, &u));
        assert_eq!(r.mul(&r.mul(&u, &v), &w), r.mul(&u, &r.mul(&v, &w)));
    }

    #[test]
    fn euler_classes_are_additive() {
        for (p, exps, fiber) in [(2u64, vec![2u32, 1], false), (3, vec![1], false), (2, vec![1, 1], true)] {
            let a = AbelianPGroup::new(p, &exps).unwrap();
            let r = if fiber { EAlgebra::fiber(&a, 2, None).unwrap() } else { EAlgebra::integer(&a).unwrap() };
            for c1 in a.elements() {
                for c2 in a.elements() {
                    let lhs = r.euler_class(&a.add(&c1, &c2));
                    let rhs = r.formal_sum(&r.euler_class(&c1), &r.euler_class(&c2)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
