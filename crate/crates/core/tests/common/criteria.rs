//! Closed-loop checks shared by the acceptance and supplementary targets.
//! Each returns a verdict plus a one-line explanation.

use std::collections::BTreeMap;

use super::{load, run_for};
use hybrid_mas::sim::{verify, EventKind, RunStatus, Verdict};

pub type Check = (bool, String);

/// Co-safe reproduction: every word accepted by its automaton no later
/// than `deadline` seconds, neighbors below `r` at every step and at most
/// `dist_cap` apart, and no edge lost.
pub fn cosafe_reproduction(scenario: &str, deadline: f64, dist_cap: f64) -> Check {
    let c = load(scenario);
    let o = run_for(&c, 60.0, 0);
    let rep = verify(&o.trace, &c).unwrap();
    let sat = &rep.satisfaction;
    let satisfied = sat.agents.iter().all(|a| a.verdict == Verdict::Satisfied);
    let done = sat
        .agents
        .iter()
        .filter_map(|a| a.times.last())
        .max()
        .map(|&s| o.trace.time(s));
    let in_time = satisfied && done.is_some_and(|t| t <= deadline);
    let no_loss = !matches!(o.status, RunStatus::Violation { .. }) && rep.is_sound();
    let below_r = no_loss && rep.max_initial_edge_dist < c.params.r;
    let close = o.max_edge_dist <= dist_cap;
    let words: Vec<String> = sat.agents.iter().map(|a| format!("{}:{}", a.id, a.word.len())).collect();
    (
        in_time && below_r && close && no_loss,
        format!(
            "(a) {} [provided {} by t={}] (b) {} [max neighbor distance {:.3}, cap {dist_cap:.3}] (c) {}",
            ok(in_time),
            words.join(" "),
            done.map_or("never".into(), |t| format!("{t:.3}")),
            ok(below_r && close),
            o.max_edge_dist,
            ok(no_loss),
        ),
    )
}

/// Stuck mode: one agent keeps reaching one region, nobody else reaches a
/// goal once the team has come to rest, and the team ends within `spread`.
pub fn stuck_mode(scenario: &str, spread: f64) -> Check {
    let c = load(scenario);
    let o = run_for(&c, 20.0, 0);
    let t = &o.trace;
    let mut reaches: BTreeMap<usize, Vec<(u64, String)>> = BTreeMap::new();
    for e in t.events_of("goal_reached") {
        if let EventKind::GoalReached { region, .. } = &e.kind {
            reaches.entry(e.agent).or_default().push((e.step, region.clone()));
        }
    }
    let repeated: Vec<usize> = reaches
        .iter()
        .filter(|(_, r)| r.len() > 1 && r.iter().all(|x| x.1 == r[0].1))
        .map(|(a, _)| *a)
        .collect();
    // At rest: every input below a millimeter per second.
    let rest = t
        .samples
        .iter()
        .find(|s| s.u_norms.iter().all(|&u| u < 1e-3))
        .map(|s| s.step);
    let late_others = match (rest, repeated.as_slice()) {
        (Some(r), [one]) => reaches
            .iter()
            .filter(|(a, v)| *a != one && v.iter().any(|x| x.0 >= r))
            .count(),
        _ => usize::MAX,
    };
    let last = t.samples.last().unwrap();
    let final_spread = last.dists.iter().copied().fold(0.0, f64::max);
    let one_agent = repeated.len() == 1 && late_others == 0;
    let tight = final_spread <= spread;
    (
        one_agent && tight,
        format!(
            "reaching agents {:?}, repeating {:?}, at rest from t={}, final spread {:.3} (cap {spread})",
            reaches.iter().map(|(a, r)| (*a, r.len())).collect::<Vec<_>>(),
            repeated,
            rest.map_or("never".into(), |s| format!("{:.3}", t.time(s))),
            final_spread,
        ),
    )
}

/// Round protocol liveness over `seeds`: at least two rounds, two reaches
/// per agent and no disagreement between the round counters.
pub fn round_liveness(scenario: &str, seeds: std::ops::Range<u64>) -> Check {
    let c = load(scenario);
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in seeds {
        let o = run_for(&c, 60.0, seed);
        let rep = verify(&o.trace, &c).unwrap();
        let rounds = rep.satisfaction.round_ends.len();
        let min_reaches = rep
            .satisfaction
            .agents
            .iter()
            .map(|a| a.word.len())
            .min()
            .unwrap_or(0);
        let disagreements = o.trace.events_of("warning").count();
        pass &= rounds >= 2 && min_reaches >= 2 && disagreements == 0 && rep.is_sound();
        parts.push(format!(
            "seed {seed}: {rounds} rounds, min reaches {min_reaches}, disagreements {disagreements}"
        ));
    }
    (pass, parts.join("; "))
}

/// Every goal reach seen by each neighbor within the window.
pub fn detections_complete(scenario: &str) -> Check {
    let c = load(scenario);
    let o = run_for(&c, 60.0, 0);
    let rep = verify(&o.trace, &c).unwrap();
    (
        rep.goal_reaches > 0 && rep.missed_detections == 0,
        format!(
            "{} goal reaches, {} neighbor reaches not detected within {} s",
            rep.goal_reaches, rep.missed_detections, c.detector.dt_window
        ),
    )
}

/// Online per-step descent monitor never fired, the offline scan agrees,
/// and the recorded V̇ equals −Σ‖u‖² and is never positive.
pub fn lyapunov_descent(scenarios: &[&str]) -> Check {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in scenarios {
        let c = load(name);
        let o = run_for(&c, 60.0, 0);
        let rep = verify(&o.trace, &c).unwrap();
        let online = !matches!(o.status, RunStatus::Violation { .. });
        let vdot_ok = o.trace.samples.iter().all(|s| {
            let want = -s.u_norms.iter().map(|u| u * u).sum::<f64>();
            s.vdot <= 0.0 && (s.vdot - want).abs() <= 1e-9 * (1.0 + want.abs())
        });
        pass &= online && rep.is_sound() && vdot_ok;
        parts.push(format!(
            "{name}: online {} offline {} vdot {}",
            ok(online),
            ok(rep.is_sound()),
            ok(vdot_ok)
        ));
    }
    (pass, parts.join("; "))
}

/// Two runs per seed give byte-identical event files.
pub fn deterministic(scenario: &str, seeds: std::ops::Range<u64>) -> Check {
    let c = load(scenario);
    let mut pass = true;
    let mut sizes = Vec::new();
    for seed in seeds {
        let bytes = || {
            let mut buf = Vec::new();
            run_for(&c, 60.0, seed).trace.write_events(&mut buf).unwrap();
            buf
        };
        let (a, b) = (bytes(), bytes());
        pass &= a == b;
        sizes.push(a.len());
    }
    (pass, format!("event file sizes {sizes:?}"))
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "failed"
    }
}
