//! The potential V, its gradient and Hessian, and the control laws that
//! descend it.
//!
//! V = Σ_{edges} φ_c(‖x_ij‖²) + Σ_i b_i φ_g(‖p_i‖²), and the law of agent i
//! is exactly the negated i-th gradient block.

use super::coeffs::{coeff_d, coeff_d_prime, coeff_h, coeff_h_prime, phi_c, phi_g};
use crate::error::ControlError;
use crate::linalg::Matrix;
use crate::scalar::{Scalar, Vec2};

/// Controller mode of one agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode<T> {
    Passive,
    /// Steering toward the goal region centered at `goal`.
    Active { goal: Vec2<T>, radius: T },
}

impl<T: Scalar> Mode<T> {
    pub fn is_active(&self) -> bool {
        matches!(self, Mode::Active { .. })
    }

    pub fn goal(&self) -> Option<Vec2<T>> {
        match self {
            Mode::Active { goal, .. } => Some(*goal),
            Mode::Passive => None,
        }
    }
}

fn edge_gain<T: Scalar>(
    x: &[Vec2<T>],
    i: usize,
    j: usize,
    r: T,
    f: fn(T, T) -> Result<T, ControlError>,
) -> Result<(Vec2<T>, T), ControlError> {
    let xij = x[i] - x[j];
    let q = xij.norm_sq();
    match f(q, r) {
        Ok(v) => Ok((xij, v)),
        Err(_) => Err(ControlError::OutOfRange {
            i,
            j,
            dist: q.sqrt().to_f64().unwrap_or(f64::NAN),
            r: r.to_f64().unwrap_or(f64::NAN),
        }),
    }
}

/// Input of agent `i`: `−b_i d_i p_i − Σ_{j∈N_i} h_ij x_ij`.
pub fn control_input<T: Scalar>(
    i: usize,
    x: &[Vec2<T>],
    neighbors: &[usize],
    mode: &Mode<T>,
    eps: T,
    r: T,
) -> Result<Vec2<T>, ControlError> {
    let mut u = Vec2::zero();
    if let Mode::Active { goal, .. } = mode {
        let p = x[i] - *goal;
        u -= p * coeff_d(p.norm_sq(), eps);
    }
    for &j in neighbors {
        let (xij, h) = edge_gain(x, i, j, r, coeff_h)?;
        u -= xij * h;
    }
    Ok(u)
}

/// Adjacency lists for an undirected edge list.
pub fn neighbor_lists(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    adj
}

/// Inputs of all agents.
pub fn control_inputs<T: Scalar>(
    x: &[Vec2<T>],
    edges: &[(usize, usize)],
    modes: &[Mode<T>],
    eps: T,
    r: T,
) -> Result<Vec<Vec2<T>>, ControlError> {
    let adj = neighbor_lists(x.len(), edges);
    (0..x.len())
        .map(|i| control_input(i, x, &adj[i], &modes[i], eps, r))
        .collect()
}

/// The potential; each undirected edge counts once.
pub fn potential_v<T: Scalar>(
    x: &[Vec2<T>],
    edges: &[(usize, usize)],
    modes: &[Mode<T>],
    eps: T,
    r: T,
) -> Result<T, ControlError> {
    let mut v = T::zero();
    for &(i, j) in edges {
        v += edge_gain(x, i, j, r, phi_c)?.1;
    }
    for (xi, m) in x.iter().zip(modes) {
        if let Some(g) = m.goal() {
            v += phi_g((*xi - g).norm_sq(), eps);
        }
    }
    Ok(v)
}

/// Gradient of V, one block per agent. Equal to the negated inputs.
pub fn grad_v<T: Scalar>(
    x: &[Vec2<T>],
    edges: &[(usize, usize)],
    modes: &[Mode<T>],
    eps: T,
    r: T,
) -> Result<Vec<Vec2<T>>, ControlError> {
    Ok(control_inputs(x, edges, modes, eps, r)?
        .into_iter()
        .map(|u| -u)
        .collect())
}

fn add_block<T: Scalar>(h: &mut Matrix<T>, bi: usize, bj: usize, diag: T, outer: T, v: Vec2<T>) {
    let c = [v.x, v.y];
    for a in 0..2 {
        for b in 0..2 {
            let id = if a == b { diag } else { T::zero() };
            h[(2 * bi + a, 2 * bj + b)] += id + outer * c[a] * c[b];
        }
    }
}

/// Hessian of V, a symmetric 2N×2N matrix with agent-major ordering
/// `(x_1, y_1, x_2, y_2, …)`.
pub fn hessian_v<T: Scalar>(
    x: &[Vec2<T>],
    edges: &[(usize, usize)],
    modes: &[Mode<T>],
    eps: T,
    r: T,
) -> Result<Matrix<T>, ControlError> {
    let n = x.len();
    let mut h = Matrix::zeros(2 * n, 2 * n);
    for (i, m) in modes.iter().enumerate() {
        if let Some(g) = m.goal() {
            let p = x[i] - g;
            let q = p.norm_sq();
            add_block(&mut h, i, i, coeff_d(q, eps), coeff_d_prime(q, eps), p);
        }
    }
    for &(i, j) in edges {
        let (xij, hij) = edge_gain(x, i, j, r, coeff_h)?;
        let (_, hp) = edge_gain(x, i, j, r, coeff_h_prime)?;
        add_block(&mut h, i, i, hij, hp, xij);
        add_block(&mut h, j, j, hij, hp, xij);
        add_block(&mut h, i, j, -hij, -hp, xij);
        add_block(&mut h, j, i, -hij, -hp, xij);
    }
    Ok(h)
}

/// Hessian restricted to rigid translations `1_N ⊗ z`: the 2×2 matrix
/// `Σ_i b_i (d_i I + d_i′ p_i p_iᵀ)`. Edge terms cancel.
pub fn translational_hessian<T: Scalar>(x: &[Vec2<T>], modes: &[Mode<T>], eps: T) -> Matrix<T> {
    let mut m = Matrix::zeros(2, 2);
    for (xi, mode) in x.iter().zip(modes) {
        if let Some(g) = mode.goal() {
            let p = *xi - g;
            let q = p.norm_sq();
            add_block(&mut m, 0, 0, coeff_d(q, eps), coeff_d_prime(q, eps), p);
        }
    }
    m
}

/// Analytic time derivative of V along the flow, `−Σ‖u_i‖²`.
pub fn v_dot<T: Scalar>(u: &[Vec2<T>]) -> T {
    -u.iter().fold(T::zero(), |a, ui| a + ui.norm_sq())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 0.03;
    const R: f64 = 8.0;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    #[test]
    fn passive_isolated_agent_does_not_move() {
        let u = control_input(0, &[v(3.0, 4.0)], &[], &Mode::Passive, EPS, R).unwrap();
        assert_eq!(u, Vec2::zero());
    }

    #[test]
    fn symmetric_passive_pair_is_antisymmetric() {
        let x = [v(-2.0, 1.0), v(2.0, -1.0)];
        let u = control_inputs(&x, &[(0, 1)], &[Mode::Passive; 2], EPS, R).unwrap();
        assert_eq!(u[0], -u[1]);
        assert!(u[0].x > 0.0);
    }

    #[test]
    fn active_agent_pulled_to_goal() {
        let m = Mode::Active {
            goal: Vec2::zero(),
            radius: 2.0,
        };
        let u = control_input(0, &[v(1.0, 0.0)], &[], &m, EPS, R).unwrap();
        assert!((u.x + coeff_d(1.0, EPS)).abs() < 1e-18);
        assert!((u.x + 4.62e-4).abs() < 1e-6);
        assert_eq!(u.y, 0.0);
    }

    #[test]
    fn out_of_range_edge_names_pair() {
        let x = [v(0.0, 0.0), v(9.0, 0.0)];
        match control_inputs(&x, &[(0, 1)], &[Mode::Passive; 2], EPS, R) {
            Err(ControlError::OutOfRange { i: 0, j: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn potential_examples() {
        let goals = [v(1.0, 1.0), v(5.0, 2.0), v(-3.0, 0.5)];
        let modes: Vec<_> = goals
            .iter()
            .map(|&g| Mode::Active { goal: g, radius: 2.0 })
            .collect();
        let pot = potential_v(&goals, &[], &modes, EPS, R).unwrap();
        assert!((pot - 3.0 * phi_g(0.0, EPS)).abs() < 1e-15);

        let pair = [v(0.0, 0.0), v(7.5, 0.0)];
        let pot = potential_v(&pair, &[(0, 1)], &[Mode::Passive; 2], EPS, R).unwrap();
        assert!((pot - 3.6290).abs() < 1e-4);
    }

    #[test]
    fn hessian_at_goal_is_scaled_identity() {
        let m = [Mode::Active {
            goal: v(2.0, 2.0),
            radius: 2.0,
        }];
        let h = hessian_v(&[v(2.0, 2.0)], &[], &m, EPS, R).unwrap();
        assert!((h[(0, 0)] - 1.5 * EPS).abs() < 1e-15);
        assert!((h[(1, 1)] - 1.5 * EPS).abs() < 1e-15);
        assert_eq!(h[(0, 1)], 0.0);
    }

    #[test]
    fn passive_hessian_annihilates_translations() {
        let x = [v(0.0, 0.0), v(3.0, 1.0), v(1.0, 4.0)];
        let h = hessian_v(&x, &[(0, 1), (1, 2), (0, 2)], &[Mode::Passive; 3], EPS, R).unwrap();
        let z = [0.7, -1.3];
        let stacked: Vec<f64> = (0..6).map(|k| z[k % 2]).collect();
        for y in h.mul_vec(&stacked) {
            assert!(y.abs() < 1e-14);
        }
    }
}
