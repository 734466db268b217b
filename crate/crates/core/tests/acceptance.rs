//! Acceptance suite at the case-study parameters. Each test prints one
//! `criterion N: PASS|FAIL` line; run with `--nocapture` to see them.

mod common;

use std::time::Instant;

use common::criteria::*;
use common::*;
use hybrid_mas::control::{epsilon_bounds, hessian_v, r_s, xi};
use hybrid_mas::ltl::*;
use hybrid_mas::protocol::{detector_query, DetectorBuffer, DetectorParams};
use hybrid_mas::{ControlParams, Point};

const SCLTL: &str = "case_study_scltl.json";
const STUCK: &str = "case_study_ltl_scltl_protocol.json";
const ROUNDS: &str = "case_study_ltl_fullltl.json";

fn paper_params() -> ControlParams {
    ControlParams {
        r: 8.0,
        delta: 0.5,
        eps: EPS,
        c_max: 40.0,
        r_min: 2.0,
        n: 4,
    }
}

#[test]
fn criterion_01_gradient() {
    let start = Instant::now();
    let mut rng = rng(1);
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for _ in 0..200 {
        let c = random_config(&mut rng, 4, 0.05);
        let g = analytic_gradient(&c, EPS);
        let from_v = hybrid_mas::control::grad_v(&c.x, &c.edges, &c.modes, EPS, R).unwrap();
        exact &= from_v.iter().flat_map(|p| [p.x, p.y]).eq(g.iter().copied());
        let fd = fd_gradient(&c, EPS, 1e-4);
        let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
        worst = worst.max(norm(&diff) / norm(&g).max(1e-12));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = report(
        1,
        exact && worst <= 1e-5 && secs < 5.0,
        &format!("200 configurations, worst relative error {worst:.2e}, inputs equal -grad V: {exact}, {secs:.2} s"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_hessian() {
    let mut rng = rng(2);
    let mut worst: f64 = 0.0;
    let mut asym: f64 = 0.0;
    for _ in 0..50 {
        let c = random_config(&mut rng, 4, 0.05);
        let h = hessian_v(&c.x, &c.edges, &c.modes, EPS, R).unwrap();
        asym = asym.max(h.asymmetry());
        let fd = fd_hessian(&c, EPS, 1e-4);
        let mut diff = h.clone();
        for i in 0..8 {
            for j in 0..8 {
                diff[(i, j)] -= fd[(i, j)];
            }
        }
        worst = worst.max(frobenius(&diff) / frobenius(&h).max(1e-12));
    }
    let pass = report(
        2,
        worst <= 1e-4 && asym <= 1e-12,
        &format!("50 configurations, worst relative error {worst:.2e}, largest asymmetry {asym:.1e}"),
    );
    assert!(pass);
}

const CORPUS: &[&str] = &[
    "F (a & F (b & F a))",
    "F (a | b) & F c",
    "G F (a | b | c)",
    "G F a & G F b",
    "a U b",
    "a R b",
    "X (a & X !b)",
    "!(a U b)",
    "F G a",
    "(a U b) R c",
    "G (!a | F b)",
    "a U (b & X c)",
];

#[test]
fn criterion_03_automata() {
    let start = Instant::now();
    let alpha = Alphabet::new(["a", "b", "c"]).unwrap();
    let letters: Vec<Letter> = (0..8).map(Letter::from_mask).collect();
    let words = enumerate_lassos(&letters, 6);
    let results: Vec<(usize, usize)> = std::thread::scope(|s| {
        let handles: Vec<_> = CORPUS
            .iter()
            .map(|text| {
                let f = parse_formula(text, &alpha).unwrap();
                let words = &words;
                s.spawn(move || {
                    let b = translate_to_buchi(&f.to_nnf(), DEFAULT_STATE_CAP).unwrap();
                    let nfa = f
                        .is_syntactically_cosafe()
                        .then(|| translate_cosafe_to_nfa(&f, DEFAULT_STATE_CAP).unwrap());
                    let mut wrong = 0;
                    for w in words {
                        let truth = eval_lasso(&f, w);
                        wrong += usize::from(buchi_accepts(&b, w) != truth);
                        if let Some(n) = &nfa {
                            wrong += usize::from(nfa_accepts_some_prefix(n, w) != truth);
                        }
                    }
                    (wrong, usize::from(nfa.is_some()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let wrong: usize = results.iter().map(|r| r.0).sum();
    let with_nfa: usize = results.iter().map(|r| r.1).sum();
    let secs = start.elapsed().as_secs_f64();
    let pass = report(
        3,
        wrong == 0 && secs < 60.0,
        &format!(
            "{} formulas ({with_nfa} co-safe) on {} lasso words, {wrong} disagreements, {secs:.1} s",
            CORPUS.len(),
            words.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_cosafe_reproduction() {
    let start = Instant::now();
    let (ok, detail) = cosafe_reproduction(SCLTL, 30.0, 7.5 * 1.05);
    let secs = start.elapsed().as_secs_f64();
    assert!(report(4, ok && secs < 120.0, &format!("{detail}, {secs:.1} s")));
}

#[test]
fn criterion_05_stuck_mode() {
    let (ok, detail) = stuck_mode(STUCK, 1.0);
    assert!(report(5, ok, &detail));
}

#[test]
fn criterion_06_round_liveness() {
    let (ok, detail) = round_liveness(ROUNDS, 0..5);
    assert!(report(6, ok, &detail));
}

#[test]
fn criterion_07_bounds() {
    let p = paper_params();
    let b = epsilon_bounds(&p).unwrap();
    let xi_exact = xi(&p) == 10240.0;
    let r_s_err = (r_s(b.eps2, &p) - p.r_min).abs();
    let positive = b.entries().iter().all(|(_, v)| *v > 0.0);
    let breakdown: Vec<String> = b
        .entries()
        .iter()
        .map(|(k, v)| format!("{k}={v:.3e}"))
        .collect();
    let pass = report(
        7,
        xi_exact && r_s_err <= 1e-9 && positive,
        &format!(
            "{}; |r_S(eps2) - r_min| = {r_s_err:.1e}; literal eps_min {:.3e} differs from the quoted 0.031 (known)",
            breakdown.join(" "),
            b.eps_min
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_detector() {
    let thr = DetectorParams::with_defaults(&paper_params(), None, None, None);
    let stream = |norms: &[f64]| {
        let mut b = DetectorBuffer::new();
        for (k, &n) in norms.iter().enumerate() {
            b.push(k as u64, Point::new(n, 0.0), 100);
        }
        b
    };
    let steady = detector_query(&stream(&[1e-6; 100]), Point::new(1e-6, 0.0), &thr).is_none();
    let jump = detector_query(&stream(&[1e-2, 1e-4, 1e-2]), Point::new(1e-4 + 3e-3, 0.0), &thr)
        == Some(1);
    let no_small = detector_query(&stream(&[1e-2; 100]), Point::new(2e-2, 0.0), &thr).is_none();
    let synthetic = steady && jump && no_small;
    let (in_trace, detail) = detections_complete(SCLTL);
    let pass = report(
        8,
        synthetic && in_trace,
        &format!("synthetic examples {}; trace: {detail}", if synthetic { "ok" } else { "failed" }),
    );
    assert!(pass);
}

#[test]
fn criterion_09_lyapunov() {
    let (ok, detail) = lyapunov_descent(&[SCLTL, STUCK, ROUNDS]);
    assert!(report(9, ok, &detail));
}

#[test]
fn criterion_10_determinism() {
    let (ok, detail) = deterministic(ROUNDS, 0..5);
    assert!(report(10, ok, &detail));
}
