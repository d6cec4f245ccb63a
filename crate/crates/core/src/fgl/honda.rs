//! Formal group laws: the multiplicative law over the integers and the Honda
//! law of height `n` reduced to `F_p`.

use super::series::{Series, Truncation};
use crate::error::{Error, Result};
use crate::groups::is_prime;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FglVariant {
    /// `F(x, y) = x + y + xy` over the integers (height 1).
    Multiplicative,
    /// The Honda law of the given height, reduced mod p and truncated.
    HondaFiber(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FglSpec {
    variant: FglVariant,
    p: u64,
    truncation: Option<u32>,
    law: Series,
}

/// Univariate rational power series truncated at a fixed degree.
type RSeries = Vec<BigRational>;
/// Bivariate rational series keyed by `(i, j)`.
type RSeries2 = BTreeMap<(u32, u32), BigRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rzero(d: usize) -> RSeries {
    vec![BigRational::zero(); d + 1]
}

fn rmul(a: &RSeries, b: &RSeries) -> RSeries {
    let d = a.len() - 1;
    let mut out = rzero(d);
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(d + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `f(g)` for `g` without constant term.
fn rcompose(f: &RSeries, g: &RSeries) -> RSeries {
    let d = g.len() - 1;
    let mut out = rzero(d);
    let mut power = rzero(d);
    power[0] = BigRational::one();
    for c in f.iter() {
        if !c.is_zero() {
            for (o, x) in out.iter_mut().zip(&power) {
                *o += c * x;
            }
        }
        power = rmul(&power, g);
    }
    out
}

/// `log(x) = sum_i x^{p^{n i}} / p^i` up to degree `d`.
fn honda_log(p: u64, n: u32, d: usize) -> RSeries {
    let mut out = rzero(d);
    let mut i = 0u32;
    loop {
        let deg = (p as u128).pow(n * i);
        if deg > d as u128 {
            break;
        }
        out[deg as usize] = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), i as usize));
        i += 1;
    }
    out
}

/// Compositional inverse of a series `t + ...`.
fn rinverse(f: &RSeries) -> RSeries {
    let d = f.len() - 1;
    let mut t = rzero(d);
    if d >= 1 {
        t[1] = BigRational::one();
    }
    // Newton-free fixed point: g <- g - (f(g) - t); each pass fixes one degree
    let mut g = t.clone();
    for _ in 0..d {
        let fg = rcompose(f, &g);
        for k in 0..=d {
            g[k] = &g[k] - (&fg[k] - &t[k]);
        }
    }
    g
}

fn rexp_standard(d: usize) -> RSeries {
    let mut out = rzero(d);
    let mut fact = BigInt::one();
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        *slot = BigRational::new(BigInt::one(), fact.clone());
    }
    out
}

fn r2_mul(a: &RSeries2, b: &RSeries2, d: u32) -> RSeries2 {
    let mut out = RSeries2::new();
    for (&(i1, j1), x) in a {
        for (&(i2, j2), y) in b {
            if i1 + i2 + j1 + j2 <= d {
                *out.entry((i1 + i2, j1 + j2)).or_insert_with(BigRational::zero) += x * y;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn reduce_mod_p(q: &BigRational, p: u64) -> Option<BigInt> {
    let pb = BigInt::from(p);
    let den = q.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let inv = crate::linalg::fp::inv_mod(den.to_u64().expect("small"), p);
    Some((q.numer().mod_floor(&pb) * BigInt::from(inv)).mod_floor(&pb))
}

fn univariate_mod_p(f: &RSeries, p: u64) -> Result<Series> {
    let mut out = Series::zero(1, Some(p));
    for (k, c) in f.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let r = reduce_mod_p(c, p).ok_or(Error::NotIntegral {
            x_exp: k as u32,
            y_exp: 0,
            coefficient: c.to_string(),
        })?;
        out.add_term(vec![k as u32], r);
    }
    Ok(out)
}

/// The Honda law of height `n` at `p`, computed from its logarithm to total
/// degree `d` with exact rationals and then reduced mod `p`.
pub fn honda_law(p: u64, n: u32, d: u32) -> Result<FglSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("height must be positive".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("truncation degree must be at least 2".into()));
    }
    let du = d as usize;
    let log = honda_log(p, n, du);
    let exp = rinverse(&log);
    // u = log x + log y, then F = exp(u)
    let mut u = RSeries2::new();
    for (k, c) in log.iter().enumerate() {
        if !c.is_zero() {
            u.insert((k as u32, 0), c.clone());
            u.insert((0, k as u32), c.clone());
        }
    }
    let mut law = RSeries2::new();
    let mut power = RSeries2::new();
    power.insert((0, 0), BigRational::one());
    for c in exp.iter().take(du + 1) {
        if !c.is_zero() {
            for (&key, x) in &power {
                *law.entry(key).or_insert_with(BigRational::zero) += c * x;
            }
        }
        power = r2_mul(&power, &u, d);
        if power.is_empty() {
            break;
        }
    }
    let mut reduced = Series::zero(2, Some(p));
    for ((i, j), c) in law {
        if c.is_zero() {
            continue;
        }
        let r = reduce_mod_p(&c, p).ok_or(Error::NotIntegral {
            x_exp: i,
            y_exp: j,
            coefficient: c.to_string(),
        })?;
        reduced.add_term(vec![i, j], r);
    }
    Ok(FglSpec { variant: FglVariant::HondaFiber(n), p, truncation: Some(d), law: reduced })
}

/// `[m](x) = exp(m log x)` for the Honda law, from the logarithm directly.
pub fn honda_multiple_from_log(p: u64, n: u32, m: i64, d: u32) -> Result<Series> {
    let du = d as usize;
    let log = honda_log(p, n, du);
    let exp = rinverse(&log);
    let scaled: RSeries = log.iter().map(|c| c * rat(m, 1)).collect();
    univariate_mod_p(&rcompose(&exp, &scaled), p)
}

/// The series `E(x) - 1` for the Artin–Hasse exponential
/// `E(x) = exp(sum_i x^{p^i} / p^i)`, reduced mod `p`.
///
/// It is a strict isomorphism from the height one Honda law to the
/// multiplicative law.
pub fn artin_hasse_minus_one(p: u64, d: u32) -> Result<Series> {
    let du = d as usize;
    let log = honda_log(p, 1, du);
    let e = rcompose(&rexp_standard(du), &log);
    let mut s = univariate_mod_p(&e, p)?;
    s.add_term(vec![0], BigInt::from(-1));
    Ok(s)
}

impl FglSpec {
    pub fn multiplicative(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let x = Series::var(2, None, 0);
        let y = Series::var(2, None, 1);
        let law = x.add(&y).add(&Series::monomial(2, None, vec![1, 1], BigInt::one()));
        Ok(FglSpec { variant: FglVariant::Multiplicative, p, truncation: None, law })
    }

    pub fn variant(&self) -> FglVariant {
        self.variant
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn height(&self) -> u32 {
        match self.variant {
            FglVariant::Multiplicative => 1,
            FglVariant::HondaFiber(n) => n,
        }
    }

    pub fn truncation_degree(&self) -> Option<u32> {
        self.truncation
    }

    /// Coefficient modulus: `None` over the integers, `Some(p)` on the fiber.
    pub fn modulus(&self) -> Option<u64> {
        match self.variant {
            FglVariant::Multiplicative => None,
            FglVariant::HondaFiber(_) => Some(self.p),
        }
    }

    /// `F(x, y)` as a bivariate polynomial.
    pub fn law(&self) -> &Series {
        &self.law
    }

    /// A short statement of the coordinate in use.
    pub fn coordinate_convention(&self) -> String {
        match self.variant {
            FglVariant::Multiplicative => "multiplicative coordinate, F(x,y) = x + y + xy over Z".into(),
            FglVariant::HondaFiber(n) => format!(
                "Honda coordinate of height {n} over F_{}, log(x) = sum x^(p^({n}i))/p^i, truncated at degree {}",
                self.p,
                self.truncation.unwrap_or(0)
            ),
        }
    }

    fn series_truncation(&self) -> Truncation {
        match self.truncation {
            Some(d) => Truncation::degree(d),
            None => Truncation::none(),
        }
    }

    /// `[m](x)` for `m >= 0`.
    pub fn multiple(&self, m: u64) -> Series {
        let one = Series::one(1, self.modulus());
        let x = Series::var(1, self.modulus(), 0);
        match self.variant {
            FglVariant::Multiplicative => one.add(&x).pow(m, &Truncation::none()).sub(&one),
            FglVariant::HondaFiber(_) => {
                // double and add with the law
                let t = self.series_truncation();
                let mut result = Series::zero(1, self.modulus());
                let mut base = x;
                let mut m = m;
                while m > 0 {
                    if m & 1 == 1 {
                        result = self.law.compose(&[result, base.clone()], &t);
                    }
                    m >>= 1;
                    if m > 0 {
                        base = self.law.compose(&[base.clone(), base], &t);
                    }
                }
                result
            }
        }
    }

    /// `[p^k](x)`. On the fiber this is the monomial `x^{p^{kn}}`.
    pub fn p_series(&self, k: u32) -> Series {
        match self.variant {
            FglVariant::Multiplicative => self.multiple(self.p.pow(k)),
            FglVariant::HondaFiber(n) => Series::monomial(
                1,
                Some(self.p),
                vec![(self.p as u32).pow(k * n)],
                BigInt::one(),
            ),
        }
    }

    /// `<p^k>(x) = [p^k](x) / [p^{k-1}](x)`.
    pub fn angle_series(&self, k: u32) -> Result<Series> {
        if k == 0 {
            return Err(Error::InvalidArgument("the angle series needs k >= 1".into()));
        }
        self.p_series(k).div_exact(&self.p_series(k - 1))
    }

    /// `a +_F b` with monomials outside `t` discarded.
    pub fn formal_sum(&self, a: &Series, b: &Series, t: &Truncation) -> Result<Series> {
        if !a.constant_term().is_zero() || !b.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(self.law.compose(&[a.clone(), b.clone()], t))
    }

    /// The coefficient table `[[i, j, c], ...]` of the law as JSON.
    pub fn table_json(&self) -> serde_json::Value {
        let coefficients: Vec<serde_json::Value> = self
            .law
            .terms()
            .iter()
            .map(|(e, c)| serde_json::json!([e[0], e[1], c.to_string()]))
            .collect();
        serde_json::json!({
            "p": self.p,
            "height": self.height(),
            "truncation": self.truncation,
            "coefficients": coefficients,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicative_p_series() {
        let f = FglSpec::multiplicative(2).unwrap();
        assert_eq!(f.p_series(1).to_string(), "x^2 + 2*x");
        assert_eq!(f.p_series(0).to_string(), "x");
        assert_eq!(f.angle_series(1).unwrap().to_string(), "x + 2");
        assert_eq!(f.angle_series(2).unwrap().to_string(), "x^2 + 2*x + 2");
    }

    #[test]
    fn honda_height_two_at_two() {
        let f = honda_law(2, 2, 16).unwrap();
        let four = honda_multiple_from_log(2, 2, 2, 16).unwrap();
        assert_eq!(four, f.p_series(1));
        assert_eq!(f.multiple(2), f.p_series(1));
        assert_eq!(f.angle_series(1).unwrap().to_string(), "x^3");
    }

    #[test]
    fn honda_unit_and_symmetry() {
        let f = honda_law(3, 2, 9).unwrap();
        let x = Series::var(1, Some(3), 0);
        let t = Truncation::degree(9);
        assert_eq!(f.formal_sum(&x, &Series::zero(1, Some(3)), &t).unwrap(), x);
        for (e, c) in f.law().terms() {
            assert_eq!(&f.law().coefficient(&[e[1], e[0]]), c);
        }
    }

    #[test]
    fn height_one_honda_is_isomorphic_to_multiplicative() {
        let d = 8;
        let f = honda_law(2, 1, d).unwrap();
        let g = FglSpec::multiplicative(2).unwrap().law().reduce_mod(2);
        let phi = artin_hasse_minus_one(2, d).unwrap();
        let t = Truncation::degree(d);
        let x = Series::var(2, Some(2), 0);
        let y = Series::var(2, Some(2), 1);
        let phi_x = phi.compose(&[x], &t);
        let phi_y = phi.compose(&[y], &t);
        let lhs = g.compose(&[phi_x, phi_y], &t);
        let rhs = phi.compose(&[f.law().clone()], &t);
        assert_eq!(lhs, rhs);
        // but the two laws differ as power series mod 2
        assert_ne!(f.law().truncate(&t), g.truncate(&t));
    }

    #[test]
    fn formal_sum_rejects_constants() {
        let f = FglSpec::multiplicative(3).unwrap();
        let one = Series::one(1, None);
        let x = Series::var(1, None, 0);
        assert!(matches!(f.formal_sum(&one, &x, &Truncation::none()), Err(Error::NonzeroConstantTerm)));
    }
}
