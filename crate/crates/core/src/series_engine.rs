//! Series assembled from enumerated maps, and the closed forms they resum to.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use crate::colour_kernel::{BoundaryGraph, ModelSpec, Propagator};
use crate::enumeration::{for_each_map, EnumSpec, DEFAULT_MAX_EDGES};
use crate::error::{Error, Result};
use crate::series::{catalan, factorial, FormalSeries};
use crate::stranded_maps::omega_min;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observable {
    /// `log Z`, summed over connected vacuum maps with at least one edge.
    FreeEnergy,
    /// `Z / Z_0`, summed over all labelled vacuum maps.
    Partition,
    /// The cumulant with the given boundary graph.
    Cumulant(BoundaryGraph),
}

fn check_model(spec: &ModelSpec) -> Result<()> {
    spec.validate()?;
    if spec.propagator != Propagator::Identity {
        return Err(Error::UnsupportedModel("series need the identity covariance".into()));
    }
    Ok(())
}

/// Sums weighted map amplitudes through total coupling degree `order`.
pub fn assemble_series(obs: &Observable, spec: &ModelSpec, order: u32) -> Result<FormalSeries> {
    check_model(spec)?;
    let mut out = FormalSeries::zero(spec.couplings.len());
    let (k, connected, first) = match obs {
        Observable::FreeEnergy => (0, true, 1),
        Observable::Partition => {
            out = FormalSeries::one(spec.couplings.len());
            (0, false, 1)
        }
        Observable::Cumulant(b) => {
            if b.rank() != spec.rank {
                return Err(Error::Invalid("boundary rank differs from the model rank".into()));
            }
            (b.k(), true, 0)
        }
    };
    for e in first..=order as usize {
        let es = EnumSpec {
            model: spec.clone(),
            edges: e,
            cilia: k,
            connected_only: connected,
            vacuum: k == 0,
            max_edges: DEFAULT_MAX_EDGES,
        };
        let mut err = None;
        for_each_map(&es, |m, w| {
            if let Observable::Cumulant(b) = obs {
                if m.map_boundary().as_ref() != Ok(b) {
                    return;
                }
            }
            match m.amplitude(spec) {
                Ok(t) => out.add_scaled(&t, w),
                Err(x) => err = Some(x),
            }
        })?;
        if let Some(x) = err {
            return Err(x);
        }
    }
    Ok(out.with_order(order))
}

/// Connected maps with `k` cilia grouped by boundary graph.
pub fn cumulants_by_boundary(spec: &ModelSpec, k: usize, order: u32) -> Result<BTreeMap<String, (BoundaryGraph, FormalSeries)>> {
    check_model(spec)?;
    let mut out: BTreeMap<String, (BoundaryGraph, FormalSeries)> = BTreeMap::new();
    for e in 0..=order as usize {
        let es = EnumSpec::connected(spec.clone(), e, k);
        let mut err = None;
        for_each_map(&es, |m, w| {
            let b = match m.map_boundary() {
                Ok(b) => b,
                Err(x) => {
                    err = Some(x);
                    return;
                }
            };
            let key = serde_json::to_string(&b).expect("boundary serialises");
            let entry = out
                .entry(key)
                .or_insert_with(|| (b, FormalSeries::zero(spec.couplings.len()).with_order(order)));
            match m.amplitude(spec) {
                Ok(t) => entry.1.add_scaled(&t, w),
                Err(x) => err = Some(x),
            }
        })?;
        if let Some(x) = err {
            return Err(x);
        }
    }
    Ok(out)
}

/// No term of a cumulant series carries a power of N above `-Omega_min`.
pub fn exponent_bound_holds(series: &FormalSeries, b: &BoundaryGraph, spec: &ModelSpec) -> Result<bool> {
    let bound = -omega_min(b, spec)?;
    Ok(series
        .max_n_exponent()
        .map_or(true, |e| e <= num::rational::Rational64::from_integer(bound)))
}

/// Coefficients `(-D)^n C_n` of the leading two-point function.
pub fn melonic_coefficients(d: usize, n: usize) -> Vec<BigInt> {
    (0..=n)
        .map(|i| {
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            sign * BigInt::from(d).pow(i as u32) * catalan(i)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MelonicComparison {
    pub d: usize,
    pub lambda: f64,
    pub closed_form: f64,
    pub partial_sums: Vec<f64>,
    pub deviations: Vec<f64>,
}

/// `(-1 + sqrt(1 + 4 D lambda)) / (2 D lambda)`, with the limit 1 at zero.
pub fn melonic_closed_form(lambda: f64, d: usize) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    let x = 4.0 * d as f64 * lambda;
    // rationalised to avoid cancellation for small lambda
    2.0 / (1.0 + (1.0 + x).sqrt())
}

pub fn melonic_two_point(lambda: f64, d: usize, terms: usize) -> MelonicComparison {
    let closed = melonic_closed_form(lambda, d);
    let mut partial = Vec::with_capacity(terms + 1);
    let mut acc = 0.0;
    let mut c = 1.0f64;
    let mut pow = 1.0f64;
    for n in 0..=terms {
        if n > 0 {
            // C_n = C_{n-1} * 2(2n-1)/(n+1)
            c *= 2.0 * (2 * n - 1) as f64 / (n + 1) as f64;
            pow *= -(d as f64) * lambda;
        }
        acc += c * pow;
        partial.push(acc);
    }
    let deviations = partial.iter().map(|s| (s - closed).abs()).collect();
    MelonicComparison {
        d,
        lambda,
        closed_form: closed,
        partial_sums: partial,
        deviations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutSide {
    /// `sqrt(lambda) = +i sqrt|lambda|` on the negative axis.
    Upper,
    Lower,
}

/// The two roots of `a = -i s / (1 + i s D a)` with `s = sqrt(lambda)`:
/// the melonic vacuum `a0` (analytic at zero) and the instanton `a_inst`.
pub fn vacuum_solutions(lambda: Complex64, d: usize, side: CutSide) -> Result<(Complex64, Complex64)> {
    if lambda == Complex64::zero() {
        return Err(Error::Invalid("lambda must be nonzero".into()));
    }
    let s = sqrt_lambda(lambda, side);
    let df = d as f64;
    let root = (Complex64::one() + 4.0 * df * lambda).sqrt();
    let i = Complex64::i();
    let a0 = i * (Complex64::one() - root) / (2.0 * s * df);
    let a_inst = i * (Complex64::one() + root) / (2.0 * s * df);
    Ok((a0, a_inst))
}

pub fn sqrt_lambda(lambda: Complex64, side: CutSide) -> Complex64 {
    if lambda.im == 0.0 && lambda.re < 0.0 {
        let m = (-lambda.re).sqrt();
        match side {
            CutSide::Upper => Complex64::new(0.0, m),
            CutSide::Lower => Complex64::new(0.0, -m),
        }
    } else {
        lambda.sqrt()
    }
}

/// `|a - (-i s / (1 + i s D a))|`.
pub fn self_consistency_residual(a: Complex64, lambda: Complex64, d: usize, side: CutSide) -> f64 {
    let s = sqrt_lambda(lambda, side);
    let i = Complex64::i();
    (a - (-i * s) / (Complex64::one() + i * s * d as f64 * a)).norm()
}

/// Coefficients `c_n` in `a0 = -i sqrt(lambda) sum_n c_n lambda^n`.
pub fn a0_series_coefficients(d: usize, n: usize) -> Vec<BigInt> {
    melonic_coefficients(d, n)
}

/// Large-N free energy per `N^D`: `-(D/2) a0^2 - log(1 + i D sqrt(lambda) a0)`.
pub fn large_n_free_energy(lambda: f64, d: usize) -> Result<f64> {
    let l = Complex64::new(lambda, 0.0);
    let (a0, _) = vacuum_solutions(l, d, CutSide::Upper)?;
    let s = sqrt_lambda(l, CutSide::Upper);
    let df = d as f64;
    let f = -0.5 * df * a0 * a0 - (Complex64::one() + Complex64::i() * df * s * a0).ln();
    Ok(f.re)
}

/// Coefficients of `N^D` in the free energy, from vacuum plane trees:
/// `(-D)^E (2v-3)! / ((v-1)! v!)` with `v = E + 1`.
pub fn leading_free_energy_coefficients(d: usize, order: usize) -> Vec<BigRational> {
    (1..=order)
        .map(|e| {
            let v = e + 1;
            let sign = if e % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            BigRational::new(
                sign * BigInt::from(d).pow(e as u32) * factorial(2 * v - 3),
                factorial(v - 1) * factorial(v),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour_kernel::Scaling;
    use crate::series::{connected_relation_check, rational_to_f64};
    use num::rational::Rational64;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn first_order_free_energy() {
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let f = assemble_series(&Observable::FreeEnergy, &spec, 1).unwrap();
        assert_eq!(f.coefficient(&[1], Rational64::from_integer(3)), q(-3, 2));
        assert_eq!(f.coefficient(&[1], Rational64::from_integer(2)), q(-3, 2));
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn two_point_low_orders() {
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let one = BoundaryGraph::identity(1, 3);
        let k = assemble_series(&Observable::Cumulant(one.clone()), &spec, 1).unwrap();
        assert_eq!(k.coefficient(&[0], Rational64::from_integer(0)), q(1, 1));
        assert_eq!(k.coefficient(&[1], Rational64::from_integer(0)), q(-3, 1));
        assert!(exponent_bound_holds(&k, &one, &spec).unwrap());
        let k3 = assemble_series(&Observable::Cumulant(one), &spec, 4).unwrap();
        let lead = melonic_coefficients(3, 4);
        for n in 0..=4u32 {
            assert_eq!(k3.coefficient(&[n], Rational64::from_integer(0)), BigRational::from_integer(lead[n as usize].clone()));
        }
    }

    #[test]
    fn exp_of_connected_is_full() {
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let conn = assemble_series(&Observable::FreeEnergy, &spec, 2).unwrap();
        let full = assemble_series(&Observable::Partition, &spec, 2).unwrap();
        assert!(connected_relation_check(&full, &conn, 2).unwrap());
        let toy = ModelSpec::melonic(2, Scaling::Invariant).unwrap();
        let conn = assemble_series(&Observable::FreeEnergy, &toy, 2).unwrap();
        let full = assemble_series(&Observable::Partition, &toy, 2).unwrap();
        assert!(connected_relation_check(&full, &conn, 2).unwrap());
        assert_eq!(
            connected_relation_check(&full, &conn, 3),
            Err(Error::TruncationMismatch(2, 3))
        );
    }

    #[test]
    fn leading_free_energy_from_trees() {
        let spec = ModelSpec::melonic(4, Scaling::Invariant).unwrap();
        let f = assemble_series(&Observable::FreeEnergy, &spec, 3).unwrap();
        let lead = leading_free_energy_coefficients(4, 3);
        for e in 1..=3u32 {
            assert_eq!(f.coefficient(&[e], Rational64::from_integer(4)), lead[e as usize - 1]);
        }
        let lambda: f64 = 0.002;
        let tree_sum: f64 = leading_free_energy_coefficients(4, 12)
            .iter()
            .enumerate()
            .map(|(i, c)| rational_to_f64(c) * lambda.powi(i as i32 + 1))
            .sum();
        assert!((tree_sum - large_n_free_energy(lambda, 4).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn melonic_sums() {
        for (d, l) in [(3, 0.01), (4, 0.005)] {
            let r = melonic_two_point(l, d, 30);
            assert!(r.deviations[30] < 1e-10);
        }
        assert_eq!(melonic_two_point(0.0, 3, 5).closed_form, 1.0);
        let c = melonic_coefficients(3, 3);
        assert_eq!(c, vec![1.into(), (-3).into(), 18.into(), (-135).into()]);
    }

    #[test]
    fn vacuum_roots() {
        for d in [3, 4, 5] {
            for l in [Complex64::new(0.3, 0.1), Complex64::new(0.01, -0.2), Complex64::new(2.0, 0.0)] {
                let (a0, ai) = vacuum_solutions(l, d, CutSide::Upper).unwrap();
                assert!((a0 * ai - 1.0 / d as f64).norm() < 1e-12);
                assert!(self_consistency_residual(a0, l, d, CutSide::Upper) < 1e-12);
                assert!(self_consistency_residual(ai, l, d, CutSide::Upper) < 1e-12);
            }
            // collapse point: sqrt(lambda) = i / (2 sqrt D)
            let l = Complex64::new(-1.0 / (4.0 * d as f64), 0.0);
            let (a0, ai) = vacuum_solutions(l, d, CutSide::Upper).unwrap();
            let target = 1.0 / (d as f64).sqrt();
            assert!((a0 - target).norm() < 1e-7 && (ai - target).norm() < 1e-7);
        }
        assert!(vacuum_solutions(Complex64::zero(), 3, CutSide::Upper).is_err());
    }

    #[test]
    fn a0_matches_its_series() {
        let d = 3;
        let l: f64 = 0.004;
        let (a0, _) = vacuum_solutions(Complex64::new(l, 0.0), d, CutSide::Upper).unwrap();
        let c = a0_series_coefficients(d, 40);
        let sum: f64 = c.iter().enumerate().map(|(n, x)| x.to_string().parse::<f64>().unwrap() * l.powi(n as i32)).sum();
        let series = -Complex64::i() * l.sqrt() * sum;
        assert!((a0 - series).norm() < 1e-13);
    }
}
