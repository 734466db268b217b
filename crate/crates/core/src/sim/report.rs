//! Offline checks on a recorded trace: task verdicts and an invariant scan
//! that does not reuse the online monitors.

use std::collections::BTreeSet;
use std::fmt;

use super::scenario::Compiled;
use super::trace::{pair_index, EventKind, EventTrace};
use crate::ltl::{nfa_accepts, translate_cosafe_to_nfa, Letter, DEFAULT_STATE_CAP};
use crate::network::ConnectivityGraph;
use crate::protocol::round_boundaries;

/// Finite traces can only certify co-safe tasks.
pub const FINITE_TRACE_NOTE: &str =
    "a finite trace cannot certify satisfaction of a non co-safe task; such tasks get a progress verdict";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The provided word is a good prefix of the co-safe task.
    Satisfied,
    NotYetSatisfied,
    /// The word follows the plan and `rounds` full rounds were completed.
    ConsistentProgress { rounds: usize },
    /// The word departs from the plan at this position.
    Inconsistent { position: usize },
}

impl Verdict {
    pub fn is_success(&self) -> bool {
        matches!(self, Verdict::Satisfied | Verdict::ConsistentProgress { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Satisfied => write!(f, "satisfied"),
            Verdict::NotYetSatisfied => write!(f, "not-yet-satisfied"),
            Verdict::ConsistentProgress { rounds } => {
                write!(f, "consistent-progress ({rounds} rounds)")
            }
            Verdict::Inconsistent { position } => write!(f, "inconsistent at word position {position}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentVerdict {
    pub id: usize,
    pub formula: String,
    pub cosafe: bool,
    pub word: Vec<Letter>,
    /// Steps at which the services were provided.
    pub times: Vec<u64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SatisfactionReport {
    pub agents: Vec<AgentVerdict>,
    /// Round end steps from the provision times.
    pub round_ends: Vec<u64>,
}

impl SatisfactionReport {
    pub fn all_success(&self) -> bool {
        self.agents.iter().all(|a| a.verdict.is_success())
    }
}

/// Verdict per agent from the goal-reach events of a trace.
pub fn satisfaction_report(trace: &EventTrace, c: &Compiled) -> Result<SatisfactionReport, String> {
    let n = c.n();
    let ids = c.ids();
    let mut words = vec![Vec::new(); n];
    let mut times = vec![Vec::new(); n];
    for e in trace.events_of("goal_reached") {
        let EventKind::GoalReached { services, .. } = &e.kind else {
            continue;
        };
        let i = ids
            .iter()
            .position(|&id| id == e.agent)
            .ok_or_else(|| format!("unknown agent {}", e.agent))?;
        let letter = c.missions[i]
            .alphabet
            .letter(services)
            .map_err(|err| format!("agent {}: {err}", e.agent))?;
        words[i].push(letter);
        times[i].push(e.step);
    }
    let round_ends = round_boundaries(&times);
    let mut agents = Vec::new();
    for (i, m) in c.missions.iter().enumerate() {
        let word = std::mem::take(&mut words[i]);
        let cosafe = m.is_cosafe();
        let verdict = if cosafe {
            let nfa = translate_cosafe_to_nfa(&m.formula, DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
            if nfa_accepts(&nfa, &word) {
                Verdict::Satisfied
            } else {
                Verdict::NotYetSatisfied
            }
        } else {
            let plan = &c.plans[i];
            let off = word
                .iter()
                .enumerate()
                .position(|(k, w)| plan.step_at(k).map(|s| s.services) != Some(*w));
            match off {
                Some(position) => Verdict::Inconsistent { position },
                None if !round_ends.is_empty() => Verdict::ConsistentProgress {
                    rounds: round_ends.len(),
                },
                None => Verdict::NotYetSatisfied,
            }
        };
        agents.push(AgentVerdict {
            id: ids[i],
            formula: m.formula_text.clone(),
            cosafe,
            word,
            times: std::mem::take(&mut times[i]),
            verdict,
        });
    }
    Ok(SatisfactionReport { agents, round_ends })
}

/// Result of [`verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    /// Broken invariants; empty for a sound trace.
    pub violations: Vec<String>,
    /// Diagnostics that do not invalidate the trace.
    pub warnings: Vec<String>,
    pub satisfaction: SatisfactionReport,
    /// Largest distance over the edges present at each sample.
    pub max_edge_dist: f64,
    /// Largest distance over the initial edges.
    pub max_initial_edge_dist: f64,
    pub goal_reaches: usize,
    /// Neighbor goal reaches with no matching detection within the window.
    pub missed_detections: usize,
    /// Detections with no goal reach of the target within the window.
    pub unexplained_detections: usize,
    /// Goal reaches that happened while the graph was not complete.
    pub incomplete_reaches: usize,
}

impl VerifyReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-derives the invariants from the recorded samples and events.
pub fn verify(trace: &EventTrace, c: &Compiled) -> Result<VerifyReport, String> {
    let p = &c.params;
    let n = c.n();
    let ids = c.ids();
    let index = |id: usize| ids.iter().position(|&x| x == id);
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    if trace.events.windows(2).any(|w| w[0].step > w[1].step) {
        violations.push("events are not in time order".to_string());
    }
    if trace.samples.windows(2).any(|w| w[0].step >= w[1].step) {
        violations.push("samples are not in time order".to_string());
    }
    for e in &trace.events {
        match &e.kind {
            EventKind::Violation { message } => {
                violations.push(format!("online monitor at step {}: {message}", e.step))
            }
            EventKind::Warning { message } => {
                warnings.push(format!("step {}: {message}", e.step))
            }
            _ => {}
        }
    }

    // Edge set over time: the initial graph plus the recorded additions.
    let g0 = ConnectivityGraph::init(&c.scenario.starts(), p.r).map_err(|e| e.to_string())?;
    let initial: Vec<(usize, usize)> = g0.edges();
    let mut added: Vec<(u64, usize, usize)> = Vec::new();
    for e in trace.events_of("edge_added") {
        if let EventKind::EdgeAdded { other, .. } = e.kind {
            let (Some(a), Some(b)) = (index(e.agent), index(other)) else {
                return Err(format!("edge event with unknown agents at step {}", e.step));
            };
            added.push((e.step, a.min(b), a.max(b)));
        }
    }
    let edges_at = |step: u64| -> BTreeSet<(usize, usize)> {
        let mut s: BTreeSet<_> = initial.iter().copied().collect();
        s.extend(added.iter().filter(|e| e.0 <= step).map(|e| (e.1, e.2)));
        s
    };

    let mut max_edge_dist: f64 = 0.0;
    let mut max_initial: f64 = 0.0;
    for s in &trace.samples {
        if s.x.len() != n || s.dists.len() != n * n.saturating_sub(1) / 2 {
            return Err(format!("sample at step {} has the wrong width", s.step));
        }
        for i in 0..n {
            for j in i + 1..n {
                let d = s.dists[pair_index(n, i, j)];
                let from_x = (s.x[i] - s.x[j]).norm();
                if (d - from_x).abs() > 1e-9 * (1.0 + d) {
                    violations.push(format!(
                        "step {}: distance {}-{} is {d} but positions give {from_x}",
                        s.step, ids[i], ids[j]
                    ));
                }
            }
        }
        for (i, j) in edges_at(s.step) {
            let d = s.dists[pair_index(n, i, j)];
            max_edge_dist = max_edge_dist.max(d);
            if initial.contains(&(i, j)) {
                max_initial = max_initial.max(d);
            }
            if !(d < p.r) {
                violations.push(format!(
                    "step {}: edge {}-{} at distance {d}, not below r={}",
                    s.step, ids[i], ids[j], p.r
                ));
            }
        }
        if s.vdot > 0.0 {
            violations.push(format!("step {}: vdot={} is positive", s.step, s.vdot));
        }
    }

    // Potential descent between samples with no discrete change in between.
    let mut changes: Vec<u64> = trace
        .events
        .iter()
        .filter(|e| e.kind.is_discrete_change())
        .map(|e| e.step)
        .collect();
    changes.sort_unstable();
    for w in trace.samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let lo = changes.partition_point(|&s| s <= a.step);
        let quiet = changes.get(lo).is_none_or(|&s| s > b.step);
        if quiet && b.v > a.v + b.vtol {
            violations.push(format!(
                "potential rose from {} at step {} to {} at step {} (allowed {})",
                a.v, a.step, b.v, b.step, b.vtol
            ));
        }
    }

    // Detector bookkeeping: every detection should follow a reach of its
    // target, and every reach should be seen by the neighbors.
    let window = (c.detector.dt_window / trace.dt).round() as u64;
    let reaches: Vec<(u64, usize)> = trace
        .events_of("goal_reached")
        .map(|e| (e.step, e.agent))
        .collect();
    let detections: Vec<(u64, usize, usize)> = trace
        .events_of("detection")
        .filter_map(|e| match e.kind {
            EventKind::Detection { target, .. } => Some((e.step, e.agent, target)),
            _ => None,
        })
        .collect();
    let unexplained_detections = detections
        .iter()
        .filter(|&&(s, _, j)| {
            !reaches
                .iter()
                .any(|&(rs, a)| a == j && rs <= s && s <= rs + window)
        })
        .count();
    let mut missed = 0;
    for &(rs, j) in &reaches {
        let Some(jx) = index(j) else { continue };
        let edges = edges_at(rs);
        for (ix, &i) in ids.iter().enumerate() {
            if ix == jx || !edges.contains(&(ix.min(jx), ix.max(jx))) {
                continue;
            }
            let seen = detections
                .iter()
                .any(|&(s, a, t)| a == i && t == j && s + window >= rs && s <= rs + window);
            if !seen {
                missed += 1;
            }
        }
    }
    let incomplete_reaches = trace
        .events_of("goal_reached")
        .filter(|e| matches!(e.kind, EventKind::GoalReached { complete: false, .. }))
        .count();

    Ok(VerifyReport {
        violations,
        warnings,
        satisfaction: satisfaction_report(trace, c)?,
        max_edge_dist,
        max_initial_edge_dist: max_initial,
        goal_reaches: reaches.len(),
        missed_detections: missed,
        unexplained_detections,
        incomplete_reaches,
    })
}
