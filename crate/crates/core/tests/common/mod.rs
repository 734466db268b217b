//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::PathBuf;

use hybrid_mas::control::{control_inputs, potential_v, Mode};
use hybrid_mas::sim::{compile, run, Compiled, RunOutcome, Scenario, SimConfig};
use hybrid_mas::{Matrix, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const R: f64 = 8.0;
pub const EPS: f64 = 0.03;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

pub fn load(name: &str) -> Compiled {
    let s = Scenario::load(scenario_path(name)).unwrap();
    compile(&s).unwrap()
}

pub fn run_for(c: &Compiled, horizon: f64, seed: u64) -> RunOutcome {
    let cfg = SimConfig {
        horizon,
        seed,
        ..SimConfig::for_scenario(c)
    };
    run(c, &cfg).unwrap()
}

/// Prints one summary line and hands back the verdict.
pub fn report(criterion: u32, pass: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion}: {}  {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

/// A random state: positions in [0,40]², the edges closer than `r` (with
/// a margin so that finite differences stay inside the domain) and random
/// modes with random goals.
pub struct Config {
    pub x: Vec<Point>,
    pub edges: Vec<(usize, usize)>,
    pub modes: Vec<Mode<f64>>,
}

pub fn random_config(rng: &mut ChaCha8Rng, n: usize, margin: f64) -> Config {
    let pt = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0));
    let x: Vec<Point> = (0..n).map(|_| pt(rng)).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (x[i] - x[j]).norm() < R - margin {
                edges.push((i, j));
            }
        }
    }
    let modes = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Mode::Active {
                    goal: pt(rng),
                    radius: 2.0,
                }
            } else {
                Mode::Passive
            }
        })
        .collect();
    Config { x, edges, modes }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn flat(x: &[Point]) -> Vec<f64> {
    x.iter().flat_map(|p| [p.x, p.y]).collect()
}

fn unflat(v: &[f64]) -> Vec<Point> {
    v.chunks(2).map(|c| Point::new(c[0], c[1])).collect()
}

/// Central differences of V, with a fourth-order stencil.
pub fn fd_gradient(c: &Config, eps: f64, h: f64) -> Vec<f64> {
    let base = flat(&c.x);
    let v = |z: &[f64]| potential_v(&unflat(z), &c.edges, &c.modes, eps, R).unwrap();
    (0..base.len())
        .map(|k| {
            let at = |off: f64| {
                let mut z = base.clone();
                z[k] += off;
                v(&z)
            };
            (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
        })
        .collect()
}

/// Stacked analytic gradient from the negated control inputs.
pub fn analytic_gradient(c: &Config, eps: f64) -> Vec<f64> {
    control_inputs(&c.x, &c.edges, &c.modes, eps, R)
        .unwrap()
        .iter()
        .flat_map(|u| [-u.x, -u.y])
        .collect()
}

/// Central differences of the analytic gradient, column by column.
pub fn fd_hessian(c: &Config, eps: f64, h: f64) -> Matrix {
    let base = flat(&c.x);
    let n = base.len();
    let g = |z: &[f64]| {
        let cfg = Config {
            x: unflat(z),
            edges: c.edges.clone(),
            modes: c.modes.clone(),
        };
        analytic_gradient(&cfg, eps)
    };
    let mut m = Matrix::zeros(n, n);
    for k in 0..n {
        let at = |off: f64| {
            let mut z = base.clone();
            z[k] += off;
            g(&z)
        };
        let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
        for row in 0..n {
            m[(row, k)] = (8.0 * (p1[row] - m1[row]) - (p2[row] - m2[row])) / (12.0 * h);
        }
    }
    m
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn frobenius(m: &Matrix) -> f64 {
    let mut s = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            s += m[(i, j)] * m[(i, j)];
        }
    }
    s.sqrt()
}
pub mod criteria;
