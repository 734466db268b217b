//! LTL to Büchi translation.
//!
//! Tableau expansion in the style of Gerth, Peled, Vardi and Wolper: every
//! node records the obligations it has discharged now (`old`) and the ones it
//! hands to its successors (`next`). Each `Until` contributes one acceptance
//! set; a counter over those sets turns the generalized condition into a
//! single one.

use std::collections::BTreeSet;

use super::alphabet::LassoWord;
use super::automaton::{Automaton, Guard};
use super::formula::Formula;
use super::scc::tarjan;
use crate::error::LtlError;

/// Default bound on the number of automaton states.
pub const DEFAULT_STATE_CAP: usize = 100_000;

/// An automaton read with the Büchi condition: a run accepts if it visits
/// an accepting state infinitely often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton(pub Automaton);

impl std::ops::Deref for BuchiAutomaton {
    type Target = Automaton;
    fn deref(&self) -> &Automaton {
        &self.0
    }
}

type Set = BTreeSet<Formula>;

struct Pending {
    incoming: BTreeSet<usize>,
    new: Set,
    old: Set,
    next: Set,
}

struct Node {
    incoming: BTreeSet<usize>,
    old: Set,
    next: Set,
}

// Rewrites F and G through U and R so the expansion handles two temporal
// cases instead of four.
fn core(f: &Formula) -> Formula {
    match f {
        Formula::Eventually(a) => Formula::until(Formula::True, core(a)),
        Formula::Always(a) => Formula::release(Formula::False, core(a)),
        Formula::Not(a) => Formula::not(core(a)),
        Formula::And(a, b) => Formula::and(core(a), core(b)),
        Formula::Or(a, b) => Formula::or(core(a), core(b)),
        Formula::Next(a) => Formula::next(core(a)),
        Formula::Until(a, b) => Formula::until(core(a), core(b)),
        Formula::Release(a, b) => Formula::release(core(a), core(b)),
        leaf => leaf.clone(),
    }
}

fn untils(f: &Formula, out: &mut Vec<(Formula, Formula)>) {
    if let Formula::Until(_, b) = f {
        if !out.iter().any(|(u, _)| u == f) {
            out.push((f.clone(), (**b).clone()));
        }
    }
    for c in f.children() {
        untils(c, out);
    }
}

fn negation_of(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Atom(_) => Some(Formula::not(f.clone())),
        Formula::Not(a) => Some((**a).clone()),
        Formula::True => Some(Formula::False),
        _ => None,
    }
}

fn expand(f: &Formula, cap: usize) -> Result<Vec<Node>, LtlError> {
    // Node ids start at 1; 0 stands for the initial pseudo-node.
    let mut nodes: Vec<Node> = Vec::new();
    let mut stack = vec![Pending {
        incoming: BTreeSet::from([0]),
        new: Set::from([f.clone()]),
        old: Set::new(),
        next: Set::new(),
    }];

    while let Some(mut p) = stack.pop() {
        let Some(eta) = p.new.pop_first() else {
            if let Some(n) = nodes.iter_mut().find(|n| n.old == p.old && n.next == p.next) {
                n.incoming.extend(p.incoming);
                continue;
            }
            if nodes.len() >= cap {
                return Err(LtlError::StateCap { cap });
            }
            nodes.push(Node {
                incoming: p.incoming,
                old: p.old,
                next: p.next.clone(),
            });
            stack.push(Pending {
                incoming: BTreeSet::from([nodes.len()]),
                new: p.next,
                old: Set::new(),
                next: Set::new(),
            });
            continue;
        };
        if p.old.contains(&eta) {
            stack.push(p);
            continue;
        }
        match &eta {
            Formula::False => {}
            Formula::True | Formula::Atom(_) | Formula::Not(_) => {
                if negation_of(&eta).is_some_and(|n| p.old.contains(&n)) {
                    continue;
                }
                p.old.insert(eta);
                stack.push(p);
            }
            Formula::And(a, b) => {
                for x in [a, b] {
                    if !p.old.contains(&**x) {
                        p.new.insert((**x).clone());
                    }
                }
                p.old.insert(eta);
                stack.push(p);
            }
            Formula::Next(a) => {
                p.next.insert((**a).clone());
                p.old.insert(eta);
                stack.push(p);
            }
            Formula::Or(a, b) | Formula::Until(a, b) | Formula::Release(a, b) => {
                // First branch: (new1, next1); second branch: new2.
                let (new1, next1, new2): (Vec<&Formula>, Option<&Formula>, Vec<&Formula>) =
                    match &eta {
                        Formula::Or(..) => (vec![a], None, vec![b]),
                        Formula::Until(..) => (vec![a], Some(&eta), vec![b]),
                        _ => (vec![b], Some(&eta), vec![a, b]),
                    };
                let mut q = Pending {
                    incoming: p.incoming.clone(),
                    new: p.new.clone(),
                    old: p.old.clone(),
                    next: p.next.clone(),
                };
                for x in new1 {
                    if !p.old.contains(x) {
                        p.new.insert(x.clone());
                    }
                }
                if let Some(n) = next1 {
                    p.next.insert(n.clone());
                }
                for x in new2 {
                    if !q.old.contains(x) {
                        q.new.insert(x.clone());
                    }
                }
                p.old.insert(eta.clone());
                q.old.insert(eta);
                // Push the second branch first so the first is explored first.
                stack.push(q);
                stack.push(p);
            }
            Formula::Eventually(_) | Formula::Always(_) => unreachable!("rewritten by core"),
        }
    }
    Ok(nodes)
}

fn label(old: &Set) -> Guard {
    let mut g = Guard::TRUE;
    for f in old {
        match f {
            Formula::Atom(a) => g.required.insert(*a),
            Formula::Not(inner) => {
                if let Formula::Atom(a) = &**inner {
                    g.forbidden.insert(*a)
                }
            }
            _ => {}
        }
    }
    g
}

/// Translates an NNF formula into a Büchi automaton accepting exactly the
/// words that satisfy it. Non-NNF input is normalized first.
pub fn translate_to_buchi(f: &Formula, cap: usize) -> Result<BuchiAutomaton, LtlError> {
    let f = core(&f.to_nnf());
    let nodes = expand(&f, cap)?;

    let mut goals = Vec::new();
    untils(&f, &mut goals);
    // in_set[k][n]: node n is in acceptance set k.
    let in_set: Vec<Vec<bool>> = goals
        .iter()
        .map(|(u, b)| {
            nodes
                .iter()
                .map(|n| !n.old.contains(u) || n.old.contains(b))
                .collect()
        })
        .collect();
    let k = goals.len().max(1);
    if 1 + nodes.len() * k > cap {
        return Err(LtlError::StateCap { cap });
    }

    // State 0 is the initial state; node n (1-based) with counter c is
    // state 1 + (n-1)*k + c.
    let id = |n: usize, c: usize| 1 + (n - 1) * k + c;
    let mut aut = Automaton::default();
    aut.add_state(false);
    for n in 1..=nodes.len() {
        for c in 0..k {
            let acc = c == 0 && (goals.is_empty() || in_set[0][n - 1]);
            aut.add_state(acc);
        }
    }
    aut.initial.push(0);

    let advance = |m: usize, c: usize| -> usize {
        if goals.is_empty() {
            return 0;
        }
        if in_set[c][m - 1] {
            (c + 1) % k
        } else {
            c
        }
    };
    for (idx, node) in nodes.iter().enumerate() {
        let n = idx + 1;
        let guard = label(&node.old);
        if !guard.is_satisfiable() {
            continue;
        }
        for &m in &node.incoming {
            if m == 0 {
                aut.add_transition(0, guard, id(n, 0));
                continue;
            }
            for c in 0..k {
                aut.add_transition(id(m, c), guard, id(n, advance(m, c)));
            }
        }
    }
    Ok(BuchiAutomaton(aut))
}

/// States from which some accepting run exists on some word.
pub fn live_states(aut: &Automaton) -> Vec<bool> {
    let succ = |s: usize| -> Vec<usize> {
        aut.transitions[s]
            .iter()
            .filter(|t| t.guard.is_satisfiable())
            .map(|t| t.target)
            .collect()
    };
    let comps = tarjan(aut.len(), succ);
    let mut live = vec![false; aut.len()];
    for s in 0..aut.len() {
        if aut.accepting[s] && comps.cyclic[comps.component[s]] {
            live[s] = true;
        }
    }
    // Backward closure over satisfiable edges.
    let mut preds = vec![Vec::new(); aut.len()];
    for s in 0..aut.len() {
        for t in succ(s) {
            preds[t].push(s);
        }
    }
    let mut work: Vec<usize> = (0..aut.len()).filter(|&s| live[s]).collect();
    while let Some(s) = work.pop() {
        for &p in &preds[s] {
            if !live[p] {
                live[p] = true;
                work.push(p);
            }
        }
    }
    live
}

/// Membership of a lasso word: searches the product of the automaton with
/// the word's positions for a reachable cycle through an accepting state.
pub fn buchi_accepts(aut: &BuchiAutomaton, word: &LassoWord) -> bool {
    let len = word.len();
    let total = aut.len() * len;

    // Reachable part, numbered in discovery order, with its edges in
    // compressed rows so that the SCC pass does not recompute them.
    let mut local = vec![usize::MAX; total];
    let mut order: Vec<usize> = Vec::with_capacity(total);
    for &q in &aut.initial {
        let v = q * len;
        if local[v] == usize::MAX {
            local[v] = order.len();
            order.push(v);
        }
    }
    let mut offsets = Vec::with_capacity(total + 1);
    offsets.push(0);
    let mut targets = Vec::with_capacity(4 * total);
    let mut k = 0;
    while k < order.len() {
        let (q, pos) = (order[k] / len, order[k] % len);
        let next = word.succ(pos);
        for t in aut.successors(q, word.at(pos)) {
            let w = t * len + next;
            if local[w] == usize::MAX {
                local[w] = order.len();
                order.push(w);
            }
            targets.push(local[w]);
        }
        offsets.push(targets.len());
        k += 1;
    }
    // An accepting node on a cycle: search back to it from its successors.
    // The product has at most a few hundred nodes, so a search per accepting
    // node is cheaper than an SCC pass with its bookkeeping.
    let mut visited = vec![false; order.len()];
    let mut stack = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        // Prefix positions are never revisited.
        if !aut.accepting[v / len] || v % len < word.prefix.len() {
            continue;
        }
        visited.fill(false);
        stack.clear();
        stack.extend_from_slice(&targets[offsets[i]..offsets[i + 1]]);
        while let Some(w) = stack.pop() {
            if w == i {
                return true;
            }
            if !visited[w] {
                visited[w] = true;
                stack.extend_from_slice(&targets[offsets[w]..offsets[w + 1]]);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::alphabet::{enumerate_lassos, Letter};
    use crate::ltl::{eval_lasso, parse_formula, Alphabet};

    const A: Letter = Letter::from_mask(1);
    const E: Letter = Letter::EMPTY;

    fn buchi(s: &str) -> (Formula, BuchiAutomaton) {
        let alpha = Alphabet::new(["a", "b"]).unwrap();
        let f = parse_formula(s, &alpha).unwrap();
        let b = translate_to_buchi(&f, DEFAULT_STATE_CAP).unwrap();
        (f, b)
    }

    fn lasso(p: &[Letter], c: &[Letter]) -> LassoWord {
        LassoWord::new(p.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn always_a() {
        let (_, b) = buchi("G a");
        assert!(b.is_well_formed());
        assert!(buchi_accepts(&b, &lasso(&[], &[A])));
        assert!(!buchi_accepts(&b, &lasso(&[A, A, A], &[E])));
        assert!(!buchi_accepts(&b, &lasso(&[A], &[E])));
    }

    #[test]
    fn eventually_a_after_delay() {
        let (_, b) = buchi("F a");
        for k in 0..=4 {
            let mut pre = vec![E; k];
            pre.push(A);
            assert!(buchi_accepts(&b, &lasso(&pre, &[E])));
        }
        assert!(!buchi_accepts(&b, &lasso(&[E, E], &[E])));
    }

    #[test]
    fn infinitely_often_matches_oracle() {
        let (f, b) = buchi("G F a");
        for w in enumerate_lassos(&[E, A], 6) {
            assert_eq!(buchi_accepts(&b, &w), eval_lasso(&f, &w), "{w:?}");
        }
    }

    #[test]
    fn contradiction_has_no_live_states() {
        let (_, b) = buchi("a & !a");
        assert!(live_states(&b).iter().all(|l| !l));
        let (_, b) = buchi("F a");
        assert!(live_states(&b)[0]);
    }

    #[test]
    fn state_cap_is_enforced() {
        let alpha = Alphabet::new(["a", "b"]).unwrap();
        let f = parse_formula("G F a & G F b", &alpha).unwrap();
        assert_eq!(
            translate_to_buchi(&f, 2),
            Err(LtlError::StateCap { cap: 2 })
        );
    }
}
