//! Continuous layer: control laws, the potential they descend, and the
//! analytic bounds on the design parameter ε.

mod bounds;
mod coeffs;
mod field;
mod params;

pub use bounds::{epsilon_bounds, r_s, solve_r_s, xi, EpsilonBounds};
pub use coeffs::{coeff_d, coeff_d_prime, coeff_h, coeff_h_prime, goal_pull, phi_c, phi_g};
pub use field::{
    control_input, control_inputs, grad_v, hessian_v, neighbor_lists, potential_v,
    translational_hessian, v_dot, Mode,
};
pub use params::ControlParams;
