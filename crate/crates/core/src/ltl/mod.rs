//! Linear temporal logic: syntax, direct semantics on lasso words, and
//! translation to Büchi and good-prefix automata.

mod alphabet;
mod automaton;
mod buchi;
mod formula;
mod nfa;
mod parser;
mod scc;
mod semantics;

pub use alphabet::{
    enumerate_lassos, enumerate_words, Alphabet, AtomId, FiniteWord, LassoWord, Letter, MAX_ATOMS,
};
pub use automaton::{Automaton, Guard, Transition};
pub use buchi::{buchi_accepts, live_states, translate_to_buchi, BuchiAutomaton, DEFAULT_STATE_CAP};
pub use formula::Formula;
pub use nfa::{
    nfa_accepts, nfa_accepts_some_prefix, shortest_accepted, translate_cosafe_to_nfa,
    FiniteAutomaton,
};
pub use parser::{parse_formula, parse_formula_extending};
pub use semantics::{eval_lasso, eval_padded};

/// Negation normal form of `f`; see [`Formula::to_nnf`].
pub fn to_nnf(f: &Formula) -> Formula {
    f.to_nnf()
}
