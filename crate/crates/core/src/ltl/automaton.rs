use super::alphabet::Letter;

/// Transition predicate: a conjunction of required and forbidden atoms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Guard {
    pub required: Letter,
    pub forbidden: Letter,
}

impl Guard {
    pub const TRUE: Guard = Guard {
        required: Letter::EMPTY,
        forbidden: Letter::EMPTY,
    };

    pub fn matches(&self, letter: Letter) -> bool {
        self.required.is_subset(letter) && (self.forbidden.mask() & letter.mask()) == 0
    }

    pub fn is_satisfiable(&self) -> bool {
        self.required.mask() & self.forbidden.mask() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub guard: Guard,
    pub target: usize,
}

/// Explicit automaton over letters. States are `0..len()`.
///
/// Shared representation for both acceptance conditions; the wrappers
/// [`super::BuchiAutomaton`] and [`super::FiniteAutomaton`] give it meaning.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Automaton {
    pub initial: Vec<usize>,
    pub transitions: Vec<Vec<Transition>>,
    pub accepting: Vec<bool>,
}

impl Automaton {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.transitions.push(Vec::new());
        self.accepting.push(accepting);
        self.transitions.len() - 1
    }

    pub fn add_transition(&mut self, from: usize, guard: Guard, target: usize) {
        self.transitions[from].push(Transition { guard, target });
    }

    pub fn successors(&self, state: usize, letter: Letter) -> impl Iterator<Item = usize> + '_ {
        self.transitions[state]
            .iter()
            .filter(move |t| t.guard.matches(letter))
            .map(|t| t.target)
    }

    /// Structural invariants: targets in range, at least one initial state.
    pub fn is_well_formed(&self) -> bool {
        let n = self.len();
        !self.initial.is_empty()
            && self.initial.iter().all(|&s| s < n)
            && self.accepting.len() == n
            && self
                .transitions
                .iter()
                .all(|ts| ts.iter().all(|t| t.target < n))
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }
}
