//! Discrete plan synthesis over an agent's regions of interest.
//!
//! The workspace is obstacle-free, so every region can follow every other
//! one and the region graph is complete. A plan is a shortest path (co-safe
//! tasks) or a shortest lasso (general tasks) through the product of that
//! graph with the task automaton.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{LtlError, PlanError};
use crate::ltl::{
    eval_lasso, eval_padded, parse_formula_extending, translate_cosafe_to_nfa, translate_to_buchi,
    Alphabet, Automaton, FiniteWord, Formula, LassoWord, Letter, DEFAULT_STATE_CAP,
};
use crate::scalar::Vec2;

/// A region of interest as written in a scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub id: String,
    pub center: Vec2<f64>,
    pub radius: f64,
    #[serde(default)]
    pub labels: Vec<String>,
}

/// A region with labels resolved against the agent's alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub id: String,
    pub center: Vec2<f64>,
    pub radius: f64,
    pub labels: Letter,
}

/// Everything one agent needs for planning.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentMission {
    pub id: usize,
    pub alphabet: Alphabet,
    pub regions: Vec<Region>,
    pub formula: Formula,
    pub formula_text: String,
    pub start: Vec2<f64>,
}

impl AgentMission {
    /// Builds the alphabet from the region labels (sorted by name), then
    /// appends any atom that only the formula mentions.
    pub fn new(
        id: usize,
        start: Vec2<f64>,
        regions: &[RegionSpec],
        formula: &str,
    ) -> Result<Self, PlanError> {
        if regions.is_empty() {
            return Err(PlanError::NoRegions);
        }
        let mut names: Vec<&str> = regions
            .iter()
            .flat_map(|r| r.labels.iter().map(String::as_str))
            .collect();
        names.sort_unstable();
        names.dedup();
        let mut alphabet = Alphabet::new(names)?;
        let parsed = parse_formula_extending(formula, &mut alphabet)?;
        let regions = regions
            .iter()
            .map(|r| {
                Ok(Region {
                    id: r.id.clone(),
                    center: r.center,
                    radius: r.radius,
                    labels: alphabet.letter(&r.labels)?,
                })
            })
            .collect::<Result<Vec<_>, LtlError>>()?;
        Ok(AgentMission {
            id,
            alphabet,
            regions,
            formula: parsed,
            formula_text: formula.to_string(),
            start,
        })
    }

    pub fn is_cosafe(&self) -> bool {
        self.formula.is_syntactically_cosafe()
    }
}

/// Complete directed graph (self-loops included) over region indices.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGraph {
    pub labels: Vec<Letter>,
}

impl RegionGraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn successors(&self, _from: usize) -> std::ops::Range<usize> {
        0..self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.len() * self.len()
    }
}

/// Checks the layout assumption on one agent's regions and builds the graph.
pub fn build_region_graph(
    m: &AgentMission,
    c_max: f64,
    r_min: f64,
) -> Result<RegionGraph, PlanError> {
    if m.regions.is_empty() {
        return Err(PlanError::NoRegions);
    }
    for (k, a) in m.regions.iter().enumerate() {
        if a.radius < r_min {
            return Err(PlanError::Assumption {
                region: a.id.clone(),
                reason: format!("radius {} is below r_min = {r_min}", a.radius),
            });
        }
        if a.center.norm() >= c_max {
            return Err(PlanError::Assumption {
                region: a.id.clone(),
                reason: format!("center norm {} is not below c_max = {c_max}", a.center.norm()),
            });
        }
        for b in &m.regions[k + 1..] {
            let d = (a.center - b.center).norm();
            if d <= 2.0 * r_min {
                return Err(PlanError::Assumption {
                    region: a.id.clone(),
                    reason: format!("center is {d} from `{}`, need more than {}", b.id, 2.0 * r_min),
                });
            }
        }
    }
    Ok(RegionGraph {
        labels: m.regions.iter().map(|r| r.labels).collect(),
    })
}

/// One plan step: visit `region` and provide `services` there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlanStep {
    pub region: usize,
    pub services: Letter,
}

/// `steps[..suffix_start]` is the prefix, the rest the repeated suffix. A
/// co-safe plan has an empty suffix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscretePlan {
    pub steps: Vec<PlanStep>,
    pub suffix_start: usize,
}

/// Word of a plan: finite for co-safe tasks, a lasso otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanWord {
    Finite(FiniteWord),
    Lasso(LassoWord),
}

impl DiscretePlan {
    pub fn prefix(&self) -> &[PlanStep] {
        &self.steps[..self.suffix_start]
    }

    pub fn suffix(&self) -> &[PlanStep] {
        &self.steps[self.suffix_start..]
    }

    /// `k_i`: number of prefix steps.
    pub fn k(&self) -> usize {
        self.suffix_start
    }

    /// `K_i`: total number of steps.
    pub fn big_k(&self) -> usize {
        self.steps.len()
    }

    pub fn is_finite(&self) -> bool {
        self.suffix().is_empty()
    }

    /// Word of services at 0-based step `index` of the infinite plan
    /// execution (the suffix repeats). `None` past the end of a finite plan.
    pub fn step_at(&self, index: usize) -> Option<PlanStep> {
        if index < self.steps.len() {
            return Some(self.steps[index]);
        }
        let suf = self.suffix();
        if suf.is_empty() {
            return None;
        }
        Some(suf[(index - self.suffix_start) % suf.len()])
    }

    /// Serializable form with names.
    pub fn to_serial(&self, m: &AgentMission) -> SerialPlan {
        SerialPlan {
            agent: m.id,
            formula: m.formula_text.clone(),
            steps: self
                .steps
                .iter()
                .map(|s| {
                    (
                        m.regions[s.region].id.clone(),
                        m.alphabet
                            .letter_names(s.services)
                            .into_iter()
                            .map(str::to_string)
                            .collect(),
                    )
                })
                .collect(),
            suffix_start: self.suffix_start,
        }
    }
}

/// Plan as `(region_id, [services])` pairs plus the suffix start index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerialPlan {
    pub agent: usize,
    pub formula: String,
    pub steps: Vec<(String, Vec<String>)>,
    pub suffix_start: usize,
}

pub fn plan_word(p: &DiscretePlan) -> PlanWord {
    let letters = |s: &[PlanStep]| s.iter().map(|s| s.services).collect::<Vec<_>>();
    if p.is_finite() {
        PlanWord::Finite(letters(&p.steps))
    } else {
        PlanWord::Lasso(LassoWord {
            prefix: letters(p.prefix()),
            cycle: letters(p.suffix()),
        })
    }
}

/// Checks the plan's word against the formula with the direct semantics;
/// finite words are padded with the empty letter.
pub fn validate_plan(p: &DiscretePlan, f: &Formula) -> bool {
    if p.steps.is_empty() {
        return false;
    }
    match plan_word(p) {
        PlanWord::Finite(w) => eval_padded(f, &w, Letter::EMPTY),
        PlanWord::Lasso(w) => eval_lasso(f, &w),
    }
}

// Product state: the last region visited (None before the first step) and
// the automaton state.
type ProductState = (Option<usize>, usize);

struct Product<'a> {
    graph: &'a RegionGraph,
    aut: &'a Automaton,
    m: usize,
}

impl Product<'_> {
    fn index(&self, (r, q): ProductState) -> usize {
        q * (self.m + 1) + r.map_or(0, |r| r + 1)
    }

    fn state(&self, idx: usize) -> ProductState {
        let (q, r) = (idx / (self.m + 1), idx % (self.m + 1));
        (if r == 0 { None } else { Some(r - 1) }, q)
    }

    fn size(&self) -> usize {
        self.aut.len() * (self.m + 1)
    }

    /// Successors in fixed order: region index, then service subsets from
    /// largest to smallest (lexicographic among equal sizes), then automaton
    /// transition order. Providing a region's whole label is tried first.
    fn successors(&self, idx: usize) -> Vec<(PlanStep, usize)> {
        let (r, q) = self.state(idx);
        let regions: Vec<usize> = match r {
            Some(r) => self.graph.successors(r).collect(),
            None => (0..self.m).collect(),
        };
        let mut out = Vec::new();
        for j in regions {
            let mut subsets = self.graph.labels[j].subsets();
            subsets.sort_by_key(|l| std::cmp::Reverse(l.len()));
            for services in subsets {
                for t in self.aut.successors(q, services) {
                    out.push((PlanStep { region: j, services }, self.index((Some(j), t))));
                }
            }
        }
        out
    }

    /// BFS from `sources`; returns parent links (step, predecessor) and the
    /// states in order of discovery.
    fn bfs(&self, sources: &[usize]) -> (Vec<Option<(PlanStep, usize)>>, Vec<usize>) {
        let mut parent = vec![None; self.size()];
        let mut seen = vec![false; self.size()];
        let mut queue = VecDeque::new();
        let mut order = Vec::new();
        for &s in sources {
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for (step, w) in self.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((step, v));
                    queue.push_back(w);
                }
            }
        }
        (parent, order)
    }

    fn path(&self, parent: &[Option<(PlanStep, usize)>], to: usize, from: usize) -> Vec<PlanStep> {
        let mut steps = Vec::new();
        let mut cur = to;
        while cur != from {
            let (step, prev) = parent[cur].expect("reachable state");
            steps.push(step);
            cur = prev;
        }
        steps.reverse();
        steps
    }
}

fn depth(parent: &[Option<(PlanStep, usize)>], mut v: usize, root: usize) -> Option<usize> {
    let mut d = 0;
    while v != root {
        let (_, p) = parent[v]?;
        v = p;
        d += 1;
    }
    Some(d)
}

/// Shortest path of at least one step from `root` to an accepting state.
fn shortest_accepting_path(prod: &Product<'_>, root: usize) -> Option<Vec<PlanStep>> {
    let mut seen = vec![false; prod.size()];
    let mut parent: Vec<Option<(PlanStep, usize)>> = vec![None; prod.size()];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for (step, w) in prod.successors(v) {
            if prod.aut.accepting[prod.state(w).1] {
                parent[w] = Some((step, v));
                let mut steps = vec![step];
                let mut cur = v;
                while cur != root {
                    let (s, p) = parent[cur].expect("bfs tree");
                    steps.push(s);
                    cur = p;
                }
                steps.reverse();
                return Some(steps);
            }
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((step, v));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Synthesizes a plan: shortest good prefix for co-safe formulas, otherwise
/// the lasso with the fewest total steps. The result is always validated.
pub fn synthesize_plan(m: &AgentMission, graph: &RegionGraph) -> Result<DiscretePlan, PlanError> {
    let unrealizable = || PlanError::Unrealizable {
        formula: m.formula_text.clone(),
    };
    let plan = if m.is_cosafe() {
        let nfa = translate_cosafe_to_nfa(&m.formula, DEFAULT_STATE_CAP)?;
        let prod = Product {
            graph,
            aut: &nfa,
            m: graph.len(),
        };
        let root = prod.index((None, nfa.initial[0]));
        let steps = shortest_accepting_path(&prod, root).ok_or_else(unrealizable)?;
        DiscretePlan {
            suffix_start: steps.len(),
            steps,
        }
    } else {
        let buchi = translate_to_buchi(&m.formula, DEFAULT_STATE_CAP)?;
        let prod = Product {
            graph,
            aut: &buchi,
            m: graph.len(),
        };
        let root = prod.index((None, buchi.initial[0]));
        let (parent, discovered) = prod.bfs(&[root]);
        let mut best: Option<(usize, Vec<PlanStep>, Vec<PlanStep>)> = None;
        // Accepting states in BFS discovery order (so by depth, and among
        // equal depths by the successor order) keep ties deterministic.
        let order: Vec<(usize, usize)> = discovered
            .into_iter()
            .filter(|&v| v != root && prod.aut.accepting[prod.state(v).1])
            .filter_map(|v| depth(&parent, v, root).map(|d| (d, v)))
            .collect();
        for (d, v) in order {
            if best.as_ref().is_some_and(|b| d >= b.0) {
                break;
            }
            let Some(cycle) = shortest_accepting_cycle(&prod, v) else {
                continue;
            };
            let total = d + cycle.len();
            if best.as_ref().is_none_or(|b| total < b.0) {
                best = Some((total, prod.path(&parent, v, root), cycle));
            }
        }
        let (_, mut prefix, mut cycle) = best.ok_or_else(unrealizable)?;
        // Rotate the cycle backwards over any prefix tail that repeats it.
        while let (Some(a), Some(b)) = (prefix.last(), cycle.last()) {
            if a != b {
                break;
            }
            prefix.pop();
            let last = cycle.pop().expect("non-empty");
            cycle.insert(0, last);
        }
        let suffix_start = prefix.len();
        prefix.extend(cycle);
        DiscretePlan {
            steps: prefix,
            suffix_start,
        }
    };
    if !validate_plan(&plan, &m.formula) {
        return Err(PlanError::Invalid {
            formula: m.formula_text.clone(),
        });
    }
    Ok(plan)
}

/// Shortest non-empty path from `v` back to itself.
fn shortest_accepting_cycle(prod: &Product<'_>, v: usize) -> Option<Vec<PlanStep>> {
    let mut seen = vec![false; prod.size()];
    let mut parent: Vec<Option<(PlanStep, usize)>> = vec![None; prod.size()];
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for (step, w) in prod.successors(x) {
            if w == v {
                let mut steps = vec![step];
                let mut cur = x;
                while cur != v {
                    let (s, p) = parent[cur].expect("bfs tree");
                    steps.push(s);
                    cur = p;
                }
                steps.reverse();
                return Some(steps);
            }
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((step, x));
                queue.push_back(w);
            }
        }
    }
    None
}
