//! Sparse multivariate polynomials standing in for truncated power series.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Which monomials are kept after a multiplication.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Truncation {
    /// Drop monomials of total degree above this.
    pub total_degree: Option<u32>,
    /// Drop monomials with `e_i >= bounds[i]` (nilpotency `x_i^{b_i} = 0`).
    pub bounds: Option<Vec<u32>>,
}

impl Truncation {
    pub fn none() -> Self {
        Truncation::default()
    }

    pub fn degree(d: u32) -> Self {
        Truncation { total_degree: Some(d), bounds: None }
    }

    pub fn nilpotent(bounds: Vec<u32>) -> Self {
        Truncation { total_degree: None, bounds: Some(bounds) }
    }

    fn keeps(&self, exps: &[u32]) -> bool {
        if let Some(d) = self.total_degree {
            if exps.iter().sum::<u32>() > d {
                return false;
            }
        }
        if let Some(b) = &self.bounds {
            if exps.iter().zip(b).any(|(e, b)| e >= b) {
                return false;
            }
        }
        true
    }
}

/// A polynomial in `nvars` variables with integer coefficients, optionally
/// reduced modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Series {
    nvars: usize,
    modulus: Option<u64>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Series {
    pub fn zero(nvars: usize, modulus: Option<u64>) -> Self {
        Series { nvars, modulus, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, modulus: Option<u64>, c: BigInt) -> Self {
        let mut s = Self::zero(nvars, modulus);
        s.add_term(vec![0; nvars], c);
        s
    }

    pub fn one(nvars: usize, modulus: Option<u64>) -> Self {
        Self::constant(nvars, modulus, BigInt::one())
    }

    pub fn monomial(nvars: usize, modulus: Option<u64>, exps: Vec<u32>, c: BigInt) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut s = Self::zero(nvars, modulus);
        s.add_term(exps, c);
        s
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, modulus: Option<u64>, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, modulus, e, BigInt::one())
    }

    pub fn from_terms(
        nvars: usize,
        modulus: Option<u64>,
        terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>,
    ) -> Self {
        let mut s = Self::zero(nvars, modulus);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&vec![0; self.nvars])
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Lowest total degree of a term; `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    fn reduce_coeff(&self, c: BigInt) -> BigInt {
        match self.modulus {
            Some(m) => c.mod_floor(&BigInt::from(m)),
            None => c,
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        let current = self.terms.remove(&exps).unwrap_or_else(BigInt::zero);
        let sum = self.reduce_coeff(current + c);
        if !sum.is_zero() {
            self.terms.insert(exps, sum);
        }
    }

    fn check_compatible(&self, other: &Series) {
        assert_eq!(self.nvars, other.nvars, "series in different numbers of variables");
        assert_eq!(self.modulus, other.modulus, "series over different coefficient rings");
    }

    pub fn add(&self, other: &Series) -> Series {
        self.check_compatible(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Series {
        Series::from_terms(self.nvars, self.modulus, self.terms.iter().map(|(e, c)| (e.clone(), -c)))
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Series {
        Series::from_terms(self.nvars, self.modulus, self.terms.iter().map(|(e, c)| (e.clone(), c * k)))
    }

    pub fn truncate(&self, t: &Truncation) -> Series {
        Series {
            nvars: self.nvars,
            modulus: self.modulus,
            terms: self.terms.iter().filter(|(e, _)| t.keeps(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Series, t: &Truncation) -> Series {
        self.check_compatible(other);
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if !t.keeps(&e) {
                    continue;
                }
                *acc.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        let mut out = Series::zero(self.nvars, self.modulus);
        for (e, c) in acc {
            let c = out.reduce_coeff(c);
            if !c.is_zero() {
                out.terms.insert(e, c);
            }
        }
        out
    }

    pub fn pow(&self, k: u64, t: &Truncation) -> Series {
        let mut result = Series::one(self.nvars, self.modulus).truncate(t);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base, t);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, t);
            }
        }
        result
    }

    /// Substitutes `subs[i]` for the variable `x_i`.
    pub fn compose(&self, subs: &[Series], t: &Truncation) -> Series {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map_or(0, |s| s.nvars);
        let modulus = subs.first().map_or(self.modulus, |s| s.modulus);
        let mut out = Series::zero(target, modulus);
        // cache powers of each substituted series
        let mut powers: Vec<Vec<Series>> = subs.iter().map(|s| vec![Series::one(target, modulus), s.clone()]).collect();
        for (e, c) in &self.terms {
            let mut term = Series::constant(target, modulus, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().expect("nonempty").mul(&subs[i], t);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize], t);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out.truncate(t)
    }

    /// Reduces coefficients modulo `p`.
    pub fn reduce_mod(&self, p: u64) -> Series {
        Series::from_terms(self.nvars, Some(p), self.terms.iter().map(|(e, c)| (e.clone(), c.clone())))
    }

    /// Exact division of univariate polynomials; errors on a remainder.
    pub fn div_exact(&self, divisor: &Series) -> Result<Series> {
        self.check_compatible(divisor);
        assert_eq!(self.nvars, 1, "exact division is implemented for one variable");
        let dd = divisor.degree().ok_or(Error::InexactDivision)?;
        let lead = divisor.coefficient(&[dd]);
        let lead_inv = match self.modulus {
            Some(m) => {
                let l = lead.mod_floor(&BigInt::from(m)).to_u64().unwrap_or(0);
                Some(BigInt::from(crate::linalg::fp::inv_mod(l, m)))
            }
            None => None,
        };
        let mut rem = self.clone();
        let mut quotient = Series::zero(1, self.modulus);
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let rc = rem.coefficient(&[rd]);
            let q = match &lead_inv {
                Some(inv) => rc * inv,
                None => {
                    let (q, r) = rc.div_rem(&lead);
                    if !r.is_zero() {
                        return Err(Error::InexactDivision);
                    }
                    q
                }
            };
            let term = Series::monomial(1, self.modulus, vec![rd - dd], q);
            quotient = quotient.add(&term);
            rem = rem.sub(&term.mul(divisor, &Truncation::none()));
        }
        if rem.is_zero() {
            Ok(quotient)
        } else {
            Err(Error::InexactDivision)
        }
    }

    /// For a univariate series: the least `d` whose coefficient is a unit
    /// modulo `p`.
    pub fn weierstrass_degree(&self, p: u64) -> Option<u32> {
        assert_eq!(self.nvars, 1);
        let pb = BigInt::from(p);
        self.terms
            .iter()
            .filter(|(_, c)| !(*c).mod_floor(&pb).is_zero())
            .map(|(e, _)| e[0])
            .min()
    }

    /// Terms in canonical order: decreasing total degree, then decreasing
    /// lexicographic exponent vector.
    pub fn sorted_terms(&self) -> Vec<(&Vec<u32>, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// Default variable names: `x, y, z` for up to three variables, else `x1..xj`.
pub fn variable_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&variable_names(self.nvars)))
    }
}
