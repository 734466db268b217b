mod common;

use common::*;
use hybrid_mas::control::{
    coeff_d, goal_pull, hessian_v, potential_v, translational_hessian, v_dot, Mode,
};
use hybrid_mas::network::{lambda2, ConnectivityGraph};
use hybrid_mas::{f32, ControlParams, Point};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inputs_are_the_negated_gradient(seed in any::<u64>()) {
        let c = random_config(&mut rng(seed), 4, 0.05);
        let g = analytic_gradient(&c, EPS);
        let fd = fd_gradient(&c, EPS, 1e-4);
        let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&diff) <= 1e-5 * norm(&g).max(1e-3), "{g:?} vs {fd:?}");
    }

    #[test]
    fn hessian_is_symmetric_and_matches_differences(seed in any::<u64>()) {
        let c = random_config(&mut rng(seed), 4, 0.05);
        let h = hessian_v(&c.x, &c.edges, &c.modes, EPS, R).unwrap();
        prop_assert!(h.asymmetry() <= 1e-12 * frobenius(&h).max(1.0));
        let fd = fd_hessian(&c, EPS, 1e-4);
        let mut diff = h.clone();
        for i in 0..8 {
            for j in 0..8 {
                diff[(i, j)] -= fd[(i, j)];
            }
        }
        prop_assert!(frobenius(&diff) <= 1e-4 * frobenius(&h).max(1e-3));
    }

    #[test]
    fn potential_never_rises_along_the_flow(seed in any::<u64>()) {
        let c = random_config(&mut rng(seed), 4, 0.05);
        let g = analytic_gradient(&c, EPS);
        let u: Vec<Point> = g.chunks(2).map(|a| Point::new(-a[0], -a[1])).collect();
        prop_assert!(v_dot(&u) <= 0.0);
        let h = 1e-7;
        let moved: Vec<Point> = c.x.iter().zip(&u).map(|(x, u)| *x + *u * h).collect();
        let v0 = potential_v(&c.x, &c.edges, &c.modes, EPS, R).unwrap();
        let v1 = potential_v(&moved, &c.edges, &c.modes, EPS, R).unwrap();
        prop_assert!(v1 <= v0 + 1e-9 * (1.0 + v0.abs()));
    }

    #[test]
    fn goal_pull_peaks_once(eps in 1e-3f64..50.0) {
        let peak = ((2.0 * 3f64.sqrt() - 3.0) * eps).sqrt();
        let f = |p: f64| goal_pull(p, eps);
        for k in 1..50 {
            let a = peak * k as f64 / 50.0;
            let b = peak * (k + 1) as f64 / 50.0;
            prop_assert!(f(a) < f(b));
            let c = peak * (1.0 + k as f64 / 10.0);
            let d = peak * (1.0 + (k + 1) as f64 / 10.0);
            prop_assert!(f(c) > f(d));
        }
        prop_assert!(coeff_d(0.0, eps) > 0.0);
    }

    #[test]
    fn laplacian_spectrum(seed in any::<u64>()) {
        let c = random_config(&mut rng(seed), 5, 0.0);
        let g = ConnectivityGraph::from_edges(5, &c.edges);
        let l = g.laplacian(&c.x, R).unwrap();
        for i in 0..5 {
            let row: f64 = (0..5).map(|j| l[(i, j)]).sum();
            prop_assert!(row.abs() < 1e-12);
        }
        let l2 = lambda2(&l).unwrap();
        prop_assert!(l2 > -1e-12);
        prop_assert_eq!(l2 > 1e-9, g.is_connected());
    }

    #[test]
    fn translations_see_only_goal_terms(seed in any::<u64>()) {
        let c = random_config(&mut rng(seed), 4, 0.05);
        let h = hessian_v(&c.x, &c.edges, &c.modes, EPS, R).unwrap();
        let t = translational_hessian(&c.x, &c.modes, EPS);
        for (a, b) in [(0, 0), (0, 1), (1, 1)] {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += h[(2 * i + a, 2 * j + b)];
                }
            }
            prop_assert!((s - t[(a, b)]).abs() <= 1e-9 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn single_precision_tracks_double(seed in any::<u64>()) {
        let c = random_config(&mut rng(seed), 4, 0.5);
        let x32: Vec<f32::Point> = c.x.iter().map(|p| p.cast()).collect();
        let m32: Vec<f32::Mode> = c
            .modes
            .iter()
            .map(|m| match m {
                Mode::Active { goal, radius } => Mode::Active { goal: goal.cast(), radius: *radius as f32 },
                Mode::Passive => Mode::Passive,
            })
            .collect();
        let v64 = potential_v(&c.x, &c.edges, &c.modes, 1.0, R).unwrap();
        let v32 = potential_v(&x32, &c.edges, &m32, 1.0f32, R as f32).unwrap();
        prop_assert!((v64 - v32 as f64).abs() <= 1e-4 * (1.0 + v64.abs()));
    }
}

#[test]
fn case_study_parameters_are_valid() {
    let p = ControlParams {
        r: 8.0,
        delta: 0.5,
        eps: 0.03,
        c_max: 40.0,
        r_min: 2.0,
        n: 4,
    };
    assert!(p.validate().is_ok());
    let mut q = p;
    q.delta = 9.0;
    assert!(q.validate().is_err());
}
