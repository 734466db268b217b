//! Scalar coefficient functions of the control laws and the potential.
//! All of them take squared distances.

use crate::error::ControlError;
use crate::scalar::Scalar;

/// Goal gain `d = ε³/(s)² + ε²/(2s)` with `s = ‖p‖² + ε`.
pub fn coeff_d<T: Scalar>(p_sq: T, eps: T) -> T {
    let s = p_sq + eps;
    eps.powi(3) / (s * s) + eps * eps / (T::lit(2.0) * s)
}

/// `d′ = −4ε³/s³ − ε²/s²`, twice the derivative of `d` in `‖p‖²`.
pub fn coeff_d_prime<T: Scalar>(p_sq: T, eps: T) -> T {
    let s = p_sq + eps;
    -T::lit(4.0) * eps.powi(3) / s.powi(3) - eps * eps / (s * s)
}

fn check_range<T: Scalar>(dist_sq: T, r: T) -> Result<T, ControlError> {
    let gap = r * r - dist_sq;
    if gap > T::zero() && dist_sq >= T::zero() {
        Ok(gap)
    } else {
        Err(ControlError::Domain {
            dist: dist_sq.sqrt().to_f64().unwrap_or(f64::NAN),
            r: r.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Cohesion gain `h = r²/(r² − ‖x‖²)²`, defined below the sensing radius.
pub fn coeff_h<T: Scalar>(dist_sq: T, r: T) -> Result<T, ControlError> {
    let gap = check_range(dist_sq, r)?;
    Ok(r * r / (gap * gap))
}

/// `h′ = 4r²/(r² − ‖x‖²)³`.
pub fn coeff_h_prime<T: Scalar>(dist_sq: T, r: T) -> Result<T, ControlError> {
    let gap = check_range(dist_sq, r)?;
    Ok(T::lit(4.0) * r * r / gap.powi(3))
}

/// Edge potential `½‖x‖²/(r² − ‖x‖²)`.
pub fn phi_c<T: Scalar>(dist_sq: T, r: T) -> Result<T, ControlError> {
    let gap = check_range(dist_sq, r)?;
    Ok(T::lit(0.5) * dist_sq / gap)
}

/// Goal potential `(ε²/2)‖p‖²/(‖p‖²+ε) + (ε²/4)ln(‖p‖²+ε)`; its gradient in
/// the agent position is `d·p`.
pub fn phi_g<T: Scalar>(p_sq: T, eps: T) -> T {
    let s = p_sq + eps;
    let e2 = eps * eps;
    e2 / T::lit(2.0) * p_sq / s + e2 / T::lit(4.0) * s.ln()
}

/// Magnitude of the goal term, `d(‖p‖²)·‖p‖`, as a function of the goal
/// distance.
pub fn goal_pull<T: Scalar>(p: T, eps: T) -> T {
    coeff_d(p * p, eps) * p
}
