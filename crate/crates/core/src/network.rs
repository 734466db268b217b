//! Time-varying connectivity graph with add-hysteresis, and the weighted
//! Laplacian used in the convergence analysis.

use std::collections::{BTreeMap, VecDeque};

use crate::control::coeff_h;
use crate::error::{ControlError, NetworkError};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::scalar::{Scalar, Vec2};

/// An edge that appeared during a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeAdded<T> {
    pub step: u64,
    pub i: usize,
    pub j: usize,
    pub dist: T,
}

/// Undirected graph over agents `0..n`. Edges are stored as `(i, j)` with
/// `i < j`, mapped to the step at which they appeared (0 for initial edges).
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectivityGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), u64>,
}

fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl ConnectivityGraph {
    pub fn empty(n: usize) -> Self {
        ConnectivityGraph {
            n,
            edges: BTreeMap::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(i, j) in edges {
            assert!(i != j && i < n && j < n, "bad edge ({i},{j})");
            g.edges.insert(key(i, j), 0);
        }
        g
    }

    /// Initial graph: an edge wherever the distance is strictly below `r`.
    /// A disconnected result is rejected.
    pub fn init<T: Scalar>(x: &[Vec2<T>], r: T) -> Result<Self, NetworkError> {
        let mut g = Self::empty(x.len());
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                if (x[i] - x[j]).norm() < r {
                    g.edges.insert((i, j), 0);
                }
            }
        }
        if !g.is_connected() {
            return Err(NetworkError::Disconnected);
        }
        Ok(g)
    }

    /// One hysteresis update: a missing pair joins at distance `≤ r − δ`,
    /// an existing edge survives up to `r`. Losing an edge is an error.
    pub fn update<T: Scalar>(
        &mut self,
        x: &[Vec2<T>],
        r: T,
        delta: T,
        step: u64,
    ) -> Result<Vec<EdgeAdded<T>>, NetworkError> {
        for &(i, j) in self.edges.keys() {
            let dist = (x[i] - x[j]).norm();
            if dist > r {
                return Err(NetworkError::EdgeLost {
                    step,
                    i,
                    j,
                    dist: dist.to_f64().unwrap_or(f64::NAN),
                    r: r.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let mut added = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.edges.contains_key(&(i, j)) {
                    continue;
                }
                let dist = (x[i] - x[j]).norm();
                if dist <= r - delta {
                    self.edges.insert((i, j), step);
                    added.push(EdgeAdded { step, i, j, dist });
                }
            }
        }
        Ok(added)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&key(i, j))
    }

    /// Edges in ascending `(i, j)` order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.edges.keys().copied().collect()
    }

    /// Step at which the edge appeared.
    pub fn created_at(&self, i: usize, j: usize) -> Option<u64> {
        self.edges.get(&key(i, j)).copied()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| j != i && self.has_edge(i, j)).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Signed Laplacian with weights `h_ij`: diagonal `Σ_j h_ij`,
    /// off-diagonal `−h_ij` on edges.
    pub fn laplacian<T: Scalar>(&self, x: &[Vec2<T>], r: T) -> Result<Matrix<T>, ControlError> {
        let mut l = Matrix::zeros(self.n, self.n);
        for &(i, j) in self.edges.keys() {
            let q = (x[i] - x[j]).norm_sq();
            let h = coeff_h(q, r).map_err(|_| ControlError::OutOfRange {
                i,
                j,
                dist: q.sqrt().to_f64().unwrap_or(f64::NAN),
                r: r.to_f64().unwrap_or(f64::NAN),
            })?;
            l[(i, j)] -= h;
            l[(j, i)] -= h;
            l[(i, i)] += h;
            l[(j, j)] += h;
        }
        Ok(l)
    }

    /// Laplacian with unit weights.
    pub fn unit_laplacian<T: Scalar>(&self) -> Matrix<T> {
        let mut l = Matrix::zeros(self.n, self.n);
        for &(i, j) in self.edges.keys() {
            l[(i, j)] -= T::one();
            l[(j, i)] -= T::one();
            l[(i, i)] += T::one();
            l[(j, j)] += T::one();
        }
        l
    }
}

/// Second-smallest eigenvalue (algebraic connectivity) of a Laplacian.
pub fn lambda2<T: Scalar>(l: &Matrix<T>) -> Result<T, ControlError> {
    let ev = symmetric_eigenvalues(l, T::lit(1e-12))?;
    Ok(ev.get(1).copied().unwrap_or(T::zero()))
}
