//! Exact enumeration of the binomial inequalities behind the variance bound.

use std::f64::consts::PI;

use num::bigint::BigInt;
use num::pow;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

use super::{BoundParams, BoundReport};
use crate::stats::binomial_pmf;

/// `E[1/(1+Z)]`, `E[(1/Z) 1{Z>=1}]` and `E[1/(1+Z^2)]` for `Z ~ Binomial(N, p)`,
/// summed in exact rational arithmetic (`p` is taken at its exact binary value).
pub fn inverse_moments_exact(big_n: usize, p: f64) -> [BigRational; 3] {
    // p = a / b with b a power of two; each mass is C(N,k) a^k (b-a)^(N-k) / b^N
    let p = BigRational::from_float(p).expect("finite p");
    let (a, b) = (p.numer().clone(), p.denom().clone());
    let c = &b - &a;
    let weights: [fn(u64) -> Option<u64>; 3] = [|k| Some(k + 1), |k| (k >= 1).then_some(k), |k| Some(k * k + 1)];
    let scale = pow(b, big_n);
    weights.map(|w| {
        let dens: Vec<Option<u64>> = (0..=big_n as u64).map(w).collect();
        let common = dens.iter().flatten().fold(BigInt::one(), |l, &v| num::integer::lcm(l, BigInt::from(v)));
        let mut total = BigInt::zero();
        let mut choose = BigInt::one();
        for (k, den) in dens.iter().enumerate() {
            if let Some(den) = den {
                let mass = &choose * pow(a.clone(), k) * pow(c.clone(), big_n - k);
                total += mass * (&common / BigInt::from(*den));
            }
            choose = choose * BigInt::from(big_n - k) / BigInt::from(k + 1);
        }
        BigRational::new(total, common * &scale)
    })
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("representable")
}

/// [`inverse_moments_exact`] rounded to the nearest doubles.
pub fn inverse_moments(big_n: usize, p: f64) -> [f64; 3] {
    inverse_moments_exact(big_n, p).map(|r| to_f64(&r))
}

/// The three inverse-moment bounds for `Z ~ Binomial(N, p)`, `p in (0, 1]`:
/// `1/((N+1)p)`, `2/((N+1)p)` and `3/((N+1)(N+2)p^2)`.
///
/// Both sides are exact rationals rounded to the nearest double. Rounding is
/// monotone, so a violation can only show up if the exact inequality fails.
/// The first bound is tight up to `(1-p)^(N+1)`, far below double precision
/// for large `N p`.
pub fn inverse_moment_check(big_n: usize, p: f64) -> [BoundReport; 3] {
    let [inv, inv_pos, inv_sq] = inverse_moments_exact(big_n, p);
    let pr = BigRational::from_float(p).expect("finite p");
    let n1 = BigRational::from_integer(BigInt::from(big_n + 1));
    let n2 = BigRational::from_integer(BigInt::from(big_n + 2));
    let b1 = (&n1 * &pr).recip();
    let b2 = &b1 * BigRational::from_integer(BigInt::from(2));
    let b3 = BigRational::from_integer(BigInt::from(3)) / (&n1 * &n2 * &pr * &pr);
    let params = BoundParams { big_n: Some(big_n), p: Some(p), ..Default::default() };
    [
        BoundReport::exact("inverse moment E[1/(1+Z)]", params.clone(), to_f64(&inv), to_f64(&b1)),
        BoundReport::exact("inverse moment E[1/Z;Z>=1]", params.clone(), to_f64(&inv_pos), to_f64(&b2)),
        BoundReport::exact("inverse moment E[1/(1+Z^2)]", params, to_f64(&inv_sq), to_f64(&b3)),
    ]
}

/// Law of `Z1 - Z2` for independent `Z1, Z2 ~ Binomial(N, p)` by discrete
/// convolution; entry `j + N` holds `P(Z1 - Z2 = j)`.
pub fn difference_pmf(big_n: usize, p: f64) -> Vec<f64> {
    let pmf = binomial_pmf(big_n, p);
    let mut out = vec![0.0; 2 * big_n + 1];
    for (a, pa) in pmf.iter().enumerate() {
        for (b, pb) in pmf.iter().enumerate() {
            out[a + big_n - b] += pa * pb;
        }
    }
    out
}

/// Generating function `E[z^(Z1 - Z2)] = [p(1-p)(z + 1/z) + 1 - 2p(1-p)]^N`
/// for real `z != 0`.
pub fn phi(big_n: usize, p: f64, z: f64) -> f64 {
    let pq = p * (1.0 - p);
    (pq * (z + 1.0 / z) + 1.0 - 2.0 * pq).powi(big_n as i32)
}

/// Same law as [`difference_pmf`], recovered from the generating function by
/// the trapezoidal rule on the unit circle.
///
/// On `z = e^{iθ}` the generating function is the real, even trigonometric
/// polynomial `[1 + 2p(1-p)(cos θ - 1)]^N` of degree `N`; with more than `2N`
/// nodes the rule is exact up to rounding.
pub fn difference_pmf_by_contour(big_n: usize, p: f64) -> Vec<f64> {
    let nodes = 4 * big_n + 8;
    let pq = p * (1.0 - p);
    let values: Vec<(f64, f64)> = (0..nodes)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / nodes as f64;
            (theta, (1.0 + 2.0 * pq * (theta.cos() - 1.0)).powi(big_n as i32))
        })
        .collect();
    (0..=2 * big_n)
        .map(|idx| {
            let j = idx as f64 - big_n as f64;
            values.iter().map(|(theta, v)| v * (j * theta).cos()).sum::<f64>() / nodes as f64
        })
        .collect()
}

/// Exact `E[2^{-d (Z1 - Z2)_+}]`.
pub fn positive_part_exact(big_n: usize, p: f64, d: usize) -> f64 {
    difference_pmf(big_n, p)
        .iter()
        .enumerate()
        .map(|(idx, w)| {
            let j = idx as i64 - big_n as i64;
            w * 2f64.powi(-(d as i32) * j.max(0) as i32)
        })
        .sum()
}

/// `(24/π) min(1, sqrt(π / (16 N p (1-p))))`.
pub fn positive_part_bound(big_n: usize, p: f64) -> f64 {
    let denom = 16.0 * big_n as f64 * p * (1.0 - p);
    24.0 / PI * (PI / denom).sqrt().min(1.0)
}

/// Checks the bound on `E[2^{-d (Z1 - Z2)_+}]`, then the closed form of the
/// generating function at `z = 1` and `z = 1/2` against brute-force expectations.
pub fn positive_part_check(big_n: usize, p: f64, d: usize) -> Vec<BoundReport> {
    let params = BoundParams { big_n: Some(big_n), p: Some(p), d: Some(d), ..Default::default() };
    let mut out = vec![BoundReport::exact(
        "positive part E[2^-d(Z1-Z2)+]",
        params.clone(),
        positive_part_exact(big_n, p, d),
        positive_part_bound(big_n, p),
    )];
    out.extend(phi_identity_reports(big_n, p, &difference_pmf(big_n, p)));
    out
}

/// Closed form of the generating function at `z = 1` and `z = 1/2` against the
/// expectation of `z^(Z1 - Z2)` under the law `diff`.
pub(crate) fn phi_identity_reports(big_n: usize, p: f64, diff: &[f64]) -> Vec<BoundReport> {
    let params = BoundParams { big_n: Some(big_n), p: Some(p), ..Default::default() };
    [1.0f64, 0.5]
        .into_iter()
        .map(|z| {
            let brute: f64 = diff.iter().enumerate().map(|(idx, w)| w * z.powi(idx as i32 - big_n as i32)).sum();
            let closed = phi(big_n, p, z);
            let rel = (brute - closed).abs() / closed.abs().max(1.0);
            BoundReport::exact(format!("generating function phi({z})"), params.clone(), rel, 1e-12)
        })
        .collect()
}

/// Largest deviation between the contour-integral and convolution laws of
/// `Z1 - Z2`, checked against `1e-10`.
pub fn contour_inversion_check(big_n: usize, p: f64) -> BoundReport {
    let conv = difference_pmf(big_n, p);
    let contour = difference_pmf_by_contour(big_n, p);
    let worst = conv.iter().zip(&contour).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    BoundReport::exact(
        "contour inversion",
        BoundParams { big_n: Some(big_n), p: Some(p), ..Default::default() },
        worst,
        1e-10,
    )
}
