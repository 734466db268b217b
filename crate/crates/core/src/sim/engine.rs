//! Fixed-step closed loop with online invariant monitors.

use serde::{Deserialize, Serialize};

use super::scenario::Compiled;
use super::trace::{Event, EventKind, EventTrace, Sample};
use crate::control::{control_inputs, hessian_v, potential_v, v_dot, Mode};
use crate::network::ConnectivityGraph;
use crate::protocol::{
    detector_query_since, AgentProtocolState, DetectorBuffer, ProtocolKind, Provided,
};
use crate::scalar::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Integration step in seconds.
    pub dt: f64,
    /// Simulated seconds before the run stops.
    pub horizon: f64,
    pub seed: u64,
    /// Extra seconds simulated once every agent has finished its plan.
    pub settle: f64,
    /// A sample row every this many steps.
    pub sample_every: u64,
    /// Lyapunov comparison every this many steps (0 disables it).
    pub check_every: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-3,
            horizon: 60.0,
            seed: 0,
            settle: 1.0,
            sample_every: 10,
            check_every: 1,
        }
    }
}

impl SimConfig {
    /// Defaults overridden by the scenario's own run section.
    pub fn for_scenario(c: &Compiled) -> Self {
        let r = c.scenario.run;
        let d = SimConfig::default();
        SimConfig {
            dt: r.dt.unwrap_or(d.dt),
            horizon: r.horizon.unwrap_or(d.horizon),
            seed: r.seed.unwrap_or(d.seed),
            ..d
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.settle >= 0.0) {
            return Err("settle must be non-negative".into());
        }
        if self.sample_every == 0 {
            return Err("sample_every must be positive".into());
        }
        Ok(())
    }

    pub fn steps(&self, seconds: f64) -> u64 {
        (seconds / self.dt).round() as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    /// Every agent finished its plan and the settle time elapsed.
    Completed,
    /// The horizon was reached first.
    Horizon,
    /// An online invariant failed at `step`.
    Violation { step: u64, message: String },
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub trace: EventTrace,
    pub status: RunStatus,
    pub end_step: u64,
    /// Last goal reach that was not a repeat of the same agent's reach at
    /// the same region in the previous step.
    pub last_progress: Option<u64>,
    /// Largest distance over all edges present at any step.
    pub max_edge_dist: f64,
    pub words: Vec<Vec<Provided>>,
    pub rounds: Vec<u32>,
}

/// State of the closed loop between steps.
pub struct World<'a> {
    c: &'a Compiled,
    cfg: SimConfig,
    ids: Vec<usize>,
    pub step: u64,
    pub x: Vec<Vec2<f64>>,
    pub graph: ConnectivityGraph,
    pub states: Vec<AgentProtocolState>,
    /// Input applied during the next step.
    pub u: Vec<Vec2<f64>>,
    modes: Vec<Mode<f64>>,
    buffers: Vec<DetectorBuffer>,
    /// Whether `i`'s detector for `j` fired at the previous step.
    firing: Vec<Vec<bool>>,
    window: u64,
    pub trace: EventTrace,
    vtol_acc: f64,
    last_reach: Vec<Option<(u64, usize)>>,
    pub last_progress: Option<u64>,
    pub max_edge_dist: f64,
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

impl<'a> World<'a> {
    pub fn new(c: &'a Compiled, cfg: SimConfig) -> Result<Self, String> {
        cfg.validate()?;
        let n = c.n();
        let p = &c.params;
        let x = c.scenario.starts();
        let graph = ConnectivityGraph::init(&x, p.r).map_err(err)?;
        let states: Vec<_> = (0..n)
            .map(|i| AgentProtocolState::new(i, n, cfg.seed))
            .collect();
        let mut w = World {
            c,
            cfg,
            ids: c.ids(),
            step: 0,
            x,
            graph,
            states,
            u: Vec::new(),
            modes: Vec::new(),
            buffers: vec![DetectorBuffer::new(); n],
            firing: vec![vec![false; n]; n],
            window: cfg.steps(c.detector.dt_window),
            trace: EventTrace::new(c.ids(), cfg.dt),
            vtol_acc: 0.0,
            last_reach: vec![None; n],
            last_progress: None,
            max_edge_dist: 0.0,
        };
        w.modes = w.current_modes();
        w.u = control_inputs(&w.x, &w.graph.edges(), &w.modes, p.eps, p.r).map_err(err)?;
        w.max_edge_dist = w.edge_distance_max();
        w.sample();
        Ok(w)
    }

    pub fn modes(&self) -> &[Mode<f64>] {
        &self.modes
    }

    fn current_modes(&self) -> Vec<Mode<f64>> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.active {
                    let r = &self.c.missions[i].regions[s.goal(&self.c.plans[i])];
                    Mode::Active {
                        goal: r.center,
                        radius: r.radius,
                    }
                } else {
                    Mode::Passive
                }
            })
            .collect()
    }

    fn edge_distance_max(&self) -> f64 {
        self.graph
            .edges()
            .iter()
            .map(|&(i, j)| (self.x[i] - self.x[j]).norm())
            .fold(0.0, f64::max)
    }

    fn event(&mut self, agent: usize, kind: EventKind) {
        self.trace.events.push(Event {
            step: self.step,
            agent: self.ids[agent],
            kind,
        });
    }

    fn sample(&mut self) {
        let p = &self.c.params;
        let n = self.x.len();
        let mut dists = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                dists.push((self.x[i] - self.x[j]).norm());
            }
        }
        let v = potential_v(&self.x, &self.graph.edges(), &self.modes, p.eps, p.r)
            .unwrap_or(f64::INFINITY);
        self.trace.samples.push(Sample {
            step: self.step,
            x: self.x.clone(),
            dists,
            v,
            vdot: v_dot(&self.u),
            vtol: self.vtol_acc,
            u_norms: self.u.iter().map(|u| u.norm()).collect(),
        });
        self.vtol_acc = 0.0;
    }

    pub fn all_finished(&self) -> bool {
        self.states.iter().all(|s| s.finished)
    }

    /// One integration step in the fixed order: inputs, Euler update,
    /// graph update, detector buffers, goal reaches, detections and rounds,
    /// logging. An `Err` is a failed invariant.
    pub fn advance(&mut self) -> Result<(), String> {
        let c = self.c;
        let p = &c.params;
        let n = self.x.len();
        let dt = self.cfg.dt;
        let k = self.step;

        // (1) inputs were computed at the end of the previous step.
        let edges = self.graph.edges();
        let v_before = potential_v(&self.x, &edges, &self.modes, p.eps, p.r).map_err(err)?;
        let curv_before = hessian_v(&self.x, &edges, &self.modes, p.eps, p.r)
            .map_err(err)?
            .gershgorin_bound();

        // (2)
        let x_new: Vec<_> = self
            .x
            .iter()
            .zip(&self.u)
            .map(|(x, u)| *x + *u * dt)
            .collect();

        // (3)
        let added = self
            .graph
            .update(&x_new, p.r, p.delta, k + 1)
            .map_err(err)?;
        for (i, j) in self.graph.edges() {
            let d = (x_new[i] - x_new[j]).norm();
            if d >= p.r {
                return Err(format!(
                    "agents {} and {} are {d} apart, not below r={}",
                    self.ids[i], self.ids[j], p.r
                ));
            }
            self.max_edge_dist = self.max_edge_dist.max(d);
        }

        // V may only rise by the second-order Euler term.
        let v_after = potential_v(&x_new, &edges, &self.modes, p.eps, p.r).map_err(err)?;
        let curv_after = hessian_v(&x_new, &edges, &self.modes, p.eps, p.r)
            .map_err(err)?
            .gershgorin_bound();
        let u_sq = -v_dot(&self.u);
        let tol = 1e-6 * (1.0 + v_before.abs())
            + 0.5 * dt * dt * curv_before.max(curv_after) * u_sq;
        self.vtol_acc += tol;
        if self.cfg.check_every > 0 && k % self.cfg.check_every == 0 && v_after > v_before + tol
        {
            return Err(format!(
                "potential rose from {v_before} to {v_after} (allowed {tol})"
            ));
        }

        self.x = x_new;
        self.step = k + 1;
        let s = self.step;
        for e in added {
            self.event(
                e.i,
                EventKind::EdgeAdded {
                    other: self.ids[e.j],
                    dist: e.dist,
                },
            );
        }

        // (4) samples are stamped with the step at which the input started.
        for j in 0..n {
            self.buffers[j].push(k, self.u[j], self.window);
        }

        // (5) goal reaches in id order.
        let complete = self.graph.is_complete();
        for i in 0..n {
            if !self.states[i].active {
                continue;
            }
            let plan = &c.plans[i];
            let goal = self.states[i].goal(plan);
            let region = &c.missions[i].regions[goal];
            if (self.x[i] - region.center).norm() >= region.radius {
                self.states[i].waiting = false;
                continue;
            }
            let kappa = self.states[i].kappa;
            let outcome = match c.scenario.protocol {
                ProtocolKind::Scltl => self.states[i].scltl_on_goal_reach(plan, s),
                ProtocolKind::Fullltl => {
                    if self.u[i].norm() >= c.detector.du {
                        self.states[i].waiting = true;
                        continue;
                    }
                    self.states[i].fullltl_on_goal_reach(plan, s, dt, &c.scenario.fprob)
                }
            };
            let Some(provided) = outcome.provided else {
                continue;
            };
            let services = c.missions[i]
                .alphabet
                .letter_names(provided.services)
                .into_iter()
                .map(String::from)
                .collect();
            self.event(
                i,
                EventKind::GoalReached {
                    region: region.id.clone(),
                    services,
                    kappa,
                    complete,
                },
            );
            if let Some((active, reason)) = outcome.switched {
                self.event(
                    i,
                    EventKind::ModeSwitch {
                        active,
                        reason: reason.as_str().into(),
                    },
                );
            }
            if self.last_reach[i] != Some((s - 1, goal)) {
                self.last_progress = Some(s);
            }
            self.last_reach[i] = Some((s, goal));
        }
        self.modes = self.current_modes();
        let mut u_next =
            control_inputs(&self.x, &self.graph.edges(), &self.modes, p.eps, p.r).map_err(err)?;

        // (6) detections from the inputs that hold from now on.
        let mut detected = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let hit = if self.graph.has_edge(i, j) {
                    detector_query_since(&self.buffers[j], u_next[j], &c.detector, self.states[i].chi)
                } else {
                    None
                };
                if let Some(witness) = hit {
                    if !self.firing[i][j] {
                        detected[i].push(j);
                        self.event(
                            i,
                            EventKind::Detection {
                                target: self.ids[j],
                                witness,
                            },
                        );
                    }
                }
                self.firing[i][j] = hit.is_some();
            }
        }
        if c.scenario.protocol == ProtocolKind::Fullltl {
            let mut changed = false;
            for i in 0..n {
                let was_active = self.states[i].active;
                if self.states[i].round_update(&detected[i], s) {
                    let round = self.states[i].rounds;
                    self.event(i, EventKind::RoundComplete { round });
                    if !was_active && self.states[i].active {
                        changed = true;
                        self.event(
                            i,
                            EventKind::ModeSwitch {
                                active: true,
                                reason: "round_start".into(),
                            },
                        );
                    }
                }
            }
            if complete && detected.iter().any(|d| !d.is_empty()) {
                self.check_agreement();
            }
            if changed {
                self.modes = self.current_modes();
                u_next = control_inputs(&self.x, &self.graph.edges(), &self.modes, p.eps, p.r)
                    .map_err(err)?;
            }
        }
        self.u = u_next;

        // (7)
        if s % self.cfg.sample_every == 0 {
            self.sample();
        }
        Ok(())
    }

    // Agents that observe each other agree on the round start and on which
    // agents have already been seen this round.
    fn check_agreement(&mut self) {
        let first = &self.states[0];
        let support = |s: &AgentProtocolState| s.upsilon.iter().map(|&c| c > 0).collect::<Vec<_>>();
        let want = (first.chi, support(first));
        let bad: Vec<usize> = self
            .states
            .iter()
            .filter(|s| (s.chi, support(s)) != want)
            .map(|s| self.ids[s.agent])
            .collect();
        if !bad.is_empty() {
            let detail: Vec<String> = self
                .states
                .iter()
                .map(|s| format!("{}:{:?}@{}", self.ids[s.agent], s.upsilon, s.chi))
                .collect();
            self.event(
                0,
                EventKind::Warning {
                    message: format!("round counters disagree {}", detail.join(" ")),
                },
            );
        }
    }
}

/// Runs until the horizon, or until every agent has finished its plan plus
/// the settle time. A failed invariant ends the run early; the trace up to
/// that point is kept.
pub fn run(c: &Compiled, cfg: &SimConfig) -> Result<RunOutcome, String> {
    let mut w = World::new(c, *cfg)?;
    let horizon = cfg.steps(cfg.horizon);
    let settle = cfg.steps(cfg.settle);
    let mut settle_until: Option<u64> = None;
    let status = loop {
        if w.step >= horizon {
            break RunStatus::Horizon;
        }
        if settle_until.is_some_and(|end| w.step >= end) {
            break RunStatus::Completed;
        }
        if let Err(message) = w.advance() {
            let step = w.step;
            w.event(
                0,
                EventKind::Violation {
                    message: message.clone(),
                },
            );
            break RunStatus::Violation { step, message };
        }
        if settle_until.is_none() && w.all_finished() {
            settle_until = Some(w.step + settle);
        }
    };
    if w.trace.samples.last().map(|s| s.step) != Some(w.step) {
        w.sample();
    }
    Ok(RunOutcome {
        status,
        end_step: w.step,
        last_progress: w.last_progress,
        max_edge_dist: w.max_edge_dist,
        words: w.states.iter().map(|s| s.word.clone()).collect(),
        rounds: w.states.iter().map(|s| s.rounds).collect(),
        trace: w.trace,
    })
}

/// Runs one scenario under several configurations on scoped threads. The
/// runs share nothing mutable; results come back in input order.
pub fn run_batch(c: &Compiled, cfgs: &[SimConfig]) -> Vec<Result<RunOutcome, String>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut out: Vec<Option<Result<RunOutcome, String>>> = vec![None; cfgs.len()];
    for (chunk_cfg, chunk_out) in cfgs.chunks(workers).zip(out.chunks_mut(workers)) {
        std::thread::scope(|scope| {
            for (cfg, slot) in chunk_cfg.iter().zip(chunk_out.iter_mut()) {
                scope.spawn(move || *slot = Some(run(c, cfg)));
            }
        });
    }
    out.into_iter().map(|r| r.expect("every run finished")).collect()
}
