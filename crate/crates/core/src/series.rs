//! Exact formal series in the couplings and in N.
//!
//! A term is keyed by its coupling multidegree and a rational exponent of N.
//! Coefficients are exact rationals; numerical evaluation is separate.

use std::collections::BTreeMap;
use std::fmt;

use num::rational::Rational64;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesTerm {
    pub coupling_degrees: Vec<u32>,
    pub n_exponent: Rational64,
    pub coefficient: BigRational,
}

pub type Key = (Vec<u32>, Rational64);

/// Equality compares terms only; `order` records the truncation the series
/// was assembled at, if any.
#[derive(Clone, Debug, Default)]
pub struct FormalSeries {
    couplings: usize,
    terms: BTreeMap<Key, BigRational>,
    order: Option<u32>,
}

impl PartialEq for FormalSeries {
    fn eq(&self, other: &Self) -> bool {
        self.couplings == other.couplings && self.terms == other.terms
    }
}

impl Eq for FormalSeries {}

impl FormalSeries {
    pub fn zero(couplings: usize) -> Self {
        FormalSeries {
            couplings,
            terms: BTreeMap::new(),
            order: None,
        }
    }

    pub fn one(couplings: usize) -> Self {
        let mut s = Self::zero(couplings);
        s.add_term(vec![0; couplings], Rational64::zero(), BigRational::one());
        s
    }

    pub fn from_term(t: &SeriesTerm) -> Self {
        let mut s = Self::zero(t.coupling_degrees.len());
        s.add_term(t.coupling_degrees.clone(), t.n_exponent, t.coefficient.clone());
        s
    }

    pub fn couplings(&self) -> usize {
        self.couplings
    }

    pub fn order(&self) -> Option<u32> {
        self.order
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = Some(order);
        self
    }

    pub fn add_term(&mut self, degrees: Vec<u32>, n_exp: Rational64, coef: BigRational) {
        assert_eq!(degrees.len(), self.couplings, "coupling count mismatch");
        if coef.is_zero() {
            return;
        }
        let key = (degrees, n_exp);
        let e = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *e += coef;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, t: &SeriesTerm, weight: &BigRational) {
        self.add_term(
            t.coupling_degrees.clone(),
            t.n_exponent,
            &t.coefficient * weight,
        );
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, degrees: &[u32], n_exp: Rational64) -> BigRational {
        self.terms
            .get(&(degrees.to_vec(), n_exp))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Terms of total coupling degree `d`, as a map from N-exponent to coefficient.
    pub fn at_degree(&self, d: u32) -> BTreeMap<Rational64, BigRational> {
        let mut out: BTreeMap<Rational64, BigRational> = BTreeMap::new();
        for ((deg, n), c) in &self.terms {
            if deg.iter().sum::<u32>() == d {
                *out.entry(*n).or_insert_with(BigRational::zero) += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn max_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(d, _)| d.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn truncate(&self, order: u32) -> Self {
        let mut s = self.clone();
        s.terms.retain(|(d, _), _| d.iter().sum::<u32>() <= order);
        s.order = Some(self.order.map_or(order, |o| o.min(order)));
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for ((d, n), c) in &other.terms {
            s.add_term(d.clone(), *n, c.clone());
        }
        s
    }

    pub fn scale(&self, w: &BigRational) -> Self {
        let mut s = Self::zero(self.couplings);
        for ((d, n), c) in &self.terms {
            s.add_term(d.clone(), *n, c * w);
        }
        s
    }

    /// Product truncated at total coupling degree `order`.
    pub fn mul_trunc(&self, other: &Self, order: u32) -> Self {
        let mut s = Self::zero(self.couplings);
        for ((d1, n1), c1) in &self.terms {
            let t1: u32 = d1.iter().sum();
            if t1 > order {
                continue;
            }
            for ((d2, n2), c2) in &other.terms {
                if t1 + d2.iter().sum::<u32>() > order {
                    continue;
                }
                let d: Vec<u32> = d1.iter().zip(d2).map(|(a, b)| a + b).collect();
                s.add_term(d, n1 + n2, c1 * c2);
            }
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_trunc(other, u32::MAX)
    }

    fn constant_term(&self) -> BigRational {
        self.terms
            .iter()
            .filter(|((d, _), _)| d.iter().all(|&x| x == 0))
            .map(|(_, c)| c.clone())
            .fold(BigRational::zero(), |a, b| a + b)
    }

    fn has_n_dependent_constant(&self) -> bool {
        self.terms
            .keys()
            .any(|(d, n)| d.iter().all(|&x| x == 0) && !n.is_zero())
    }

    /// `exp(self)` through total degree `order`; `self` must have no constant term.
    pub fn exp_trunc(&self, order: u32) -> Result<Self> {
        if !self.constant_term().is_zero() || self.has_n_dependent_constant() {
            return Err(Error::Invalid("exp needs a series without constant term".into()));
        }
        let mut out = Self::one(self.couplings);
        let mut power = Self::one(self.couplings);
        for k in 1..=order {
            power = power.mul_trunc(self, order);
            let inv = BigRational::new(BigInt::one(), factorial(k as usize));
            out = out.add(&power.scale(&inv));
        }
        Ok(out)
    }

    /// `log(self)` through total degree `order`; the constant term must be exactly 1.
    pub fn log_trunc(&self, order: u32) -> Result<Self> {
        if self.constant_term() != BigRational::one() || self.has_n_dependent_constant() {
            return Err(Error::Invalid("log needs constant term 1".into()));
        }
        let x = self.add(&Self::one(self.couplings).scale(&-BigRational::one()));
        let mut out = Self::zero(self.couplings);
        let mut power = Self::one(self.couplings);
        for k in 1..=order {
            power = power.mul_trunc(&x, order);
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&power.scale(&BigRational::new(sign.into(), (k as i64).into())));
        }
        Ok(out)
    }

    /// `1/self` through total degree `order`; the constant term must be exactly 1.
    pub fn inverse_trunc(&self, order: u32) -> Result<Self> {
        if self.constant_term() != BigRational::one() || self.has_n_dependent_constant() {
            return Err(Error::Invalid("inverse needs constant term 1".into()));
        }
        let x = self.add(&Self::one(self.couplings).scale(&-BigRational::one()));
        let mut out = Self::one(self.couplings);
        let mut power = Self::one(self.couplings);
        for k in 1..=order {
            power = power.mul_trunc(&x, order);
            let s = if k % 2 == 1 { -BigRational::one() } else { BigRational::one() };
            out = out.add(&power.scale(&s));
        }
        Ok(out)
    }

    /// Largest N-exponent among the stored terms.
    pub fn max_n_exponent(&self) -> Option<Rational64> {
        self.terms.keys().map(|(_, n)| *n).max()
    }

    /// Numerical value at coupling values `lambda` and size `n`.
    pub fn evaluate(&self, lambda: &[f64], n: f64) -> f64 {
        let mut acc = 0.0;
        for ((d, e), c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (l, &k) in lambda.iter().zip(d) {
                t *= l.powi(k as i32);
            }
            t *= n.powf(*e.numer() as f64 / *e.denom() as f64);
            acc += t;
        }
        acc
    }

    pub fn rows(&self) -> Vec<SeriesRow> {
        self.terms
            .iter()
            .map(|((d, n), c)| SeriesRow {
                degrees: d.clone(),
                n_exponent: format_ratio64(*n),
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
            })
            .collect()
    }

    pub fn to_csv(&self, coupling_names: &[String]) -> String {
        let mut s = String::new();
        for name in coupling_names {
            s.push_str(&format!("deg_{name},"));
        }
        s.push_str("n_exponent,numerator,denominator\n");
        for r in self.rows() {
            for d in &r.degrees {
                s.push_str(&format!("{d},"));
            }
            s.push_str(&format!("{},{},{}\n", r.n_exponent, r.numerator, r.denominator));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesRow {
    pub degrees: Vec<u32>,
    pub n_exponent: String,
    pub numerator: String,
    pub denominator: String,
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((d, n), c)| {
                let lam: Vec<String> = d
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, k)| format!("g{i}^{k}"))
                    .collect();
                format!("({c}) {} N^{}", lam.join(" "), format_ratio64(*n))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn format_ratio64(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Split off a power of two so huge numerators and denominators stay finite.
    let n = r.numer();
    let d = r.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = (nb - 60).max(0) - (db - 60).max(0);
    let n_small = if nb > 60 { n >> (nb - 60) as usize } else { n.clone() };
    let d_small = if db > 60 { d >> (db - 60) as usize } else { d.clone() };
    let nf: f64 = n_small.to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = d_small.to_string().parse().unwrap_or(f64::NAN);
    let v = nf / df * 2f64.powi(shift as i32);
    if r.is_negative() && v > 0.0 {
        -v
    } else {
        v
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn catalan(n: usize) -> BigInt {
    binomial(2 * n, n) / BigInt::from(n + 1)
}

/// `exp(connected) = full` through total degree `order`, coefficient for coefficient.
pub fn connected_relation_check(full: &FormalSeries, connected: &FormalSeries, order: u32) -> Result<bool> {
    for o in [full.order(), connected.order()].into_iter().flatten() {
        if o < order {
            return Err(Error::TruncationMismatch(o, order));
        }
    }
    if full.couplings() != connected.couplings() {
        return Err(Error::Invalid("series over different couplings".into()));
    }
    let lhs = connected.truncate(order).exp_trunc(order)?;
    Ok(lhs == full.truncate(order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exp_log_inverse() {
        let mut s = FormalSeries::zero(1);
        s.add_term(vec![1], Rational64::from_integer(3), q(-3, 2));
        s.add_term(vec![1], Rational64::from_integer(2), q(-3, 2));
        s.add_term(vec![2], Rational64::new(1, 2), q(5, 7));
        let e = s.exp_trunc(4).unwrap();
        assert_eq!(e.log_trunc(4).unwrap(), s);
        let inv = e.inverse_trunc(4).unwrap();
        assert_eq!(inv.mul_trunc(&e, 4), FormalSeries::one(1));
        assert!(connected_relation_check(&e, &s, 4).unwrap());
        assert!(FormalSeries::one(1).exp_trunc(2).is_err());
    }

    #[test]
    fn order_zero_relation() {
        assert!(connected_relation_check(&FormalSeries::one(1), &FormalSeries::zero(1), 0).unwrap());
    }

    #[test]
    fn catalan_numbers() {
        let c: Vec<i64> = (0..9).map(|n| catalan(n).try_into().unwrap()).collect();
        assert_eq!(c, vec![1, 1, 2, 5, 14, 42, 132, 429, 1430]);
    }

    #[test]
    fn big_rational_to_float() {
        let r = BigRational::new(factorial(40), factorial(38));
        assert!((rational_to_f64(&r) - 1560.0).abs() < 1e-9);
        assert!((rational_to_f64(&q(-1, 3)) + 1.0 / 3.0).abs() < 1e-15);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_series() -> impl Strategy<Value = FormalSeries> {
        proptest::collection::vec((0u32..3, 0u32..3, -3i64..4, 1i64..3, -5i64..6, 1i64..5), 0..5).prop_map(
            |ts| {
                let mut s = FormalSeries::zero(2);
                for (a, b, n, nd, c, cd) in ts {
                    s.add_term(vec![a, b], Rational64::new(n, nd), BigRational::new(c.into(), cd.into()));
                }
                s
            },
        )
    }

    proptest! {
        #[test]
        fn addition_associates(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }

        #[test]
        fn multiplication_commutes(a in arb_series(), b in arb_series()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn no_zero_coefficients(a in arb_series(), b in arb_series()) {
            let p = a.mul(&b).add(&a.scale(&BigRational::from_integer((-1).into())));
            prop_assert!(p.terms().all(|(_, c)| !c.is_zero()));
        }
    }
}
