//! Good-prefix automata for syntactically co-safe formulas.
//!
//! A finite word u is a good prefix of f when every infinite continuation of
//! u satisfies f, i.e. when no continuation satisfies ¬f. We build the Büchi
//! automaton of ¬f, mark the states that still have an accepting future, and
//! track the reachable set of those states letter by letter: the word is good
//! exactly when that set holds no live state.

use std::collections::{BTreeMap, VecDeque};

use super::alphabet::{FiniteWord, LassoWord, Letter};
use super::automaton::{Automaton, Guard};
use super::buchi::{live_states, translate_to_buchi};
use super::formula::Formula;
use crate::error::LtlError;

/// An automaton read with the finite-word condition: a word is accepted if
/// some run ends in an accepting state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAutomaton(pub Automaton);

impl std::ops::Deref for FiniteAutomaton {
    type Target = Automaton;
    fn deref(&self) -> &Automaton {
        &self.0
    }
}

/// Translates a syntactically co-safe formula into an automaton over finite
/// words that accepts exactly its good prefixes.
pub fn translate_cosafe_to_nfa(f: &Formula, cap: usize) -> Result<FiniteAutomaton, LtlError> {
    if !f.is_syntactically_cosafe() {
        return Err(LtlError::NotCosafe);
    }
    let atoms = Letter::from_mask(f.atoms());
    let neg = translate_to_buchi(&Formula::not(f.clone()), cap)?;
    let live = live_states(&neg);

    let letters = atoms.subsets();
    let mut aut = Automaton::default();
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();

    // Once no live state remains, every extension is good too, so all such
    // subsets collapse into one absorbing accepting state.
    let mut sink: Option<usize> = None;
    let mut intern = |set: Vec<usize>,
                      aut: &mut Automaton,
                      queue: &mut VecDeque<(usize, Vec<usize>)>|
     -> Result<usize, LtlError> {
        if !set.iter().any(|&s| live[s]) {
            return Ok(*sink.get_or_insert_with(|| {
                let s = aut.add_state(true);
                aut.add_transition(s, Guard::TRUE, s);
                s
            }));
        }
        if let Some(&id) = index.get(&set) {
            return Ok(id);
        }
        if aut.len() >= cap {
            return Err(LtlError::StateCap { cap });
        }
        let id = aut.add_state(false);
        index.insert(set.clone(), id);
        queue.push_back((id, set));
        Ok(id)
    };

    let start: Vec<usize> = neg.initial.clone();
    let init = intern(start, &mut aut, &mut queue)?;
    aut.initial.push(init);

    while let Some((id, set)) = queue.pop_front() {
        for &letter in &letters {
            let mut next: Vec<usize> = set
                .iter()
                .flat_map(|&s| neg.successors(s, letter))
                .filter(|&s| live[s])
                .collect();
            next.sort_unstable();
            next.dedup();
            let target = intern(next, &mut aut, &mut queue)?;
            let guard = Guard {
                required: letter,
                forbidden: Letter::from_mask(atoms.mask() & !letter.mask()),
            };
            aut.add_transition(id, guard, target);
        }
    }
    Ok(FiniteAutomaton(aut))
}

fn step(aut: &Automaton, set: &[usize], letter: Letter) -> Vec<usize> {
    let mut next: Vec<usize> = set
        .iter()
        .flat_map(|&s| aut.successors(s, letter))
        .collect();
    next.sort_unstable();
    next.dedup();
    next
}

fn any_accepting(aut: &Automaton, set: &[usize]) -> bool {
    set.iter().any(|&s| aut.accepting[s])
}

/// Subset-simulation membership for finite words.
pub fn nfa_accepts(aut: &FiniteAutomaton, word: &[Letter]) -> bool {
    let mut set = aut.initial.clone();
    for &l in word {
        set = step(aut, &set, l);
    }
    any_accepting(aut, &set)
}

/// Whether some finite prefix of the lasso word is accepted. For a good-prefix
/// automaton this decides the co-safe formula on the infinite word.
///
/// Searches the product of the automaton with the word's positions for a
/// reachable accepting state.
pub fn nfa_accepts_some_prefix(aut: &FiniteAutomaton, word: &LassoWord) -> bool {
    let len = word.len();
    let mut seen = vec![false; aut.len() * len];
    let mut work = Vec::with_capacity(seen.len());
    for &q in &aut.initial {
        if !seen[q * len] {
            seen[q * len] = true;
            work.push(q * len);
        }
    }
    while let Some(v) = work.pop() {
        let (q, pos) = (v / len, v % len);
        if aut.accepting[q] {
            return true;
        }
        let next = word.succ(pos);
        for t in aut.successors(q, word.at(pos)) {
            let w = t * len + next;
            if !seen[w] {
                seen[w] = true;
                work.push(w);
            }
        }
    }
    false
}

/// Shortest accepted word using letters from `letters`, preferring earlier
/// letters on ties.
pub fn shortest_accepted(aut: &FiniteAutomaton, letters: &[Letter]) -> Option<FiniteWord> {
    let start = aut.initial.clone();
    let mut parent: BTreeMap<Vec<usize>, Option<(Vec<usize>, Letter)>> = BTreeMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(set) = queue.pop_front() {
        if any_accepting(aut, &set) {
            let mut word = Vec::new();
            let mut cur = set;
            while let Some(Some((prev, l))) = parent.get(&cur) {
                word.push(*l);
                cur = prev.clone();
            }
            word.reverse();
            return Some(word);
        }
        for &l in letters {
            let next = step(aut, &set, l);
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((set.clone(), l)));
                queue.push_back(next);
            }
        }
    }
    None
}
