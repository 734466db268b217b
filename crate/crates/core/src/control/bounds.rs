//! Upper bounds on the design parameter ε from the critical-point analysis.

use serde::Serialize;

use super::params::ControlParams;
use crate::error::ControlError;
use crate::scalar::Scalar;

/// `ξ = r² N c_max`.
pub fn xi<T: Scalar>(p: &ControlParams<T>) -> T {
    p.r * p.r * T::from_usize_lossy(p.n) * p.c_max
}

/// Radius of the neighbourhood of a goal center that contains the minima:
/// `r_S(ε) = √(3Nε) + √((N−1) ε^{3/2} ξ)`.
pub fn r_s<T: Scalar>(eps: T, p: &ControlParams<T>) -> T {
    let n = T::from_usize_lossy(p.n);
    let three = T::lit(3.0);
    (three * n * eps).sqrt() + ((n - T::one()) * eps * eps.sqrt() * xi(p)).sqrt()
}

/// Every threshold together with their minimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsilonBounds<T> {
    pub xi: T,
    pub eps0: T,
    pub eps1: T,
    pub eps2: T,
    pub eps3: T,
    pub eps4: T,
    pub eps5: T,
    pub eps6: T,
    pub eps7: T,
    pub eps_min: T,
}

impl<T: Scalar> EpsilonBounds<T> {
    /// `(name, value)` pairs in a fixed order, for reports.
    pub fn entries(&self) -> [(&'static str, T); 10] {
        [
            ("xi", self.xi),
            ("eps0", self.eps0),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("eps3", self.eps3),
            ("eps4", self.eps4),
            ("eps5", self.eps5),
            ("eps6", self.eps6),
            ("eps7", self.eps7),
            ("eps_min", self.eps_min),
        ]
    }
}

/// Solves `r_S(ε) = target` by bisection. `r_S` is strictly increasing with
/// `r_S(0) = 0`, so the root is unique; the bracket grows by doubling.
pub fn solve_r_s<T: Scalar>(target: T, p: &ControlParams<T>, tol: T) -> T {
    let mut lo = T::zero();
    let mut hi = T::one();
    while r_s(hi, p) < target {
        lo = hi;
        hi = hi + hi;
    }
    let two = T::lit(2.0);
    for _ in 0..500 {
        let mid = (lo + hi) / two;
        let v = r_s(mid, p);
        if (v - target).abs() <= tol {
            return mid;
        }
        if mid <= lo || mid >= hi {
            return mid;
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

pub fn epsilon_bounds<T: Scalar>(p: &ControlParams<T>) -> Result<EpsilonBounds<T>, ControlError> {
    p.validate()?;
    let lit = T::lit;
    let n = T::from_usize_lossy(p.n);
    let inf = T::infinity();
    let xi = xi(p);

    // Equality case of (N−1)·√(ε^{3/2} ξ) = r − δ.
    let eps0 = if p.n == 1 {
        inf
    } else {
        let k = (p.r - p.delta) / (n - T::one());
        (k * k / xi).powf(lit(2.0) / lit(3.0))
    };
    let eps1 = eps0.min(n / (lit(0.1) * p.r * p.r));
    let eps2 = solve_r_s(p.r_min, p, lit(1e-12));
    let eps3 = lit(0.07) * p.r_min * p.r_min;
    let eps4 = lit(4.1) / (xi * xi);
    let eps5 = if p.n == 1 {
        inf
    } else {
        lit(0.8) * p.r_min * p.r_min / ((n - T::one()) * (n - T::one()))
    };
    let eps6 = eps3.min(eps4).min(eps5);
    let g_hat = lit(2.0) / (p.r_min * p.r_min);
    let a = n / (lit(0.08) * p.r * p.r);
    let eps7 = ((a * a + lit(4.0) / (p.r * p.r * g_hat)).sqrt() - a) / lit(2.0);
    let eps_min = eps1.min(eps2).min(eps6).min(eps7);

    let b = EpsilonBounds {
        xi,
        eps0,
        eps1,
        eps2,
        eps3,
        eps4,
        eps5,
        eps6,
        eps7,
        eps_min,
    };
    for (name, v) in b.entries() {
        if v.is_nan() || v <= T::zero() {
            return Err(ControlError::InvalidParams(format!(
                "threshold {name} is not positive ({v})"
            )));
        }
    }
    Ok(b)
}
