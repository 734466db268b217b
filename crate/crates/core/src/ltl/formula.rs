use std::fmt;

use super::alphabet::{Alphabet, AtomId};

/// LTL abstract syntax tree.
///
/// `Release` is the dual of `Until`; it is what negation normal form needs
/// and is rarely written by hand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(AtomId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
}

impl Formula {
    pub fn atom(id: AtomId) -> Self {
        Formula::Atom(id)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    /// Immediate sub-formulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(a) | Formula::Next(a) | Formula::Eventually(a) | Formula::Always(a) => {
                vec![a]
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => vec![a, b],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Every atom mentioned anywhere in the formula, as a bitmask.
    pub fn atoms(&self) -> u64 {
        match self {
            Formula::Atom(a) => a.mask(),
            _ => self.children().iter().fold(0, |acc, c| acc | c.atoms()),
        }
    }

    /// Negation normal form: `Not` only directly above atoms, `Eventually` and
    /// `Always` kept as they are (they have NNF duals of their own).
    pub fn to_nnf(&self) -> Formula {
        nnf(self, false)
    }

    /// True iff the formula is already in negation normal form.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Not(inner) => matches!(**inner, Formula::Atom(_)),
            _ => self.children().iter().all(|c| c.is_nnf()),
        }
    }

    /// Syntactically co-safe: no `Always`/`Release`, and negation only in
    /// front of atoms.
    pub fn is_syntactically_cosafe(&self) -> bool {
        match self {
            Formula::Always(_) | Formula::Release(..) => false,
            Formula::Not(inner) => matches!(**inner, Formula::Atom(_)),
            _ => self.children().iter().all(|c| c.is_syntactically_cosafe()),
        }
    }

    /// Render with atom names from `alphabet`.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        DisplayWith {
            formula: self,
            alphabet,
        }
    }
}

fn nnf(f: &Formula, negated: bool) -> Formula {
    use Formula::*;
    match (f, negated) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Atom(a), false) => Atom(*a),
        (Atom(a), true) => Formula::not(Atom(*a)),
        (Not(a), neg) => nnf(a, !neg),
        (And(a, b), false) => Formula::and(nnf(a, false), nnf(b, false)),
        (And(a, b), true) => Formula::or(nnf(a, true), nnf(b, true)),
        (Or(a, b), false) => Formula::or(nnf(a, false), nnf(b, false)),
        (Or(a, b), true) => Formula::and(nnf(a, true), nnf(b, true)),
        (Next(a), neg) => Formula::next(nnf(a, neg)),
        (Until(a, b), false) => Formula::until(nnf(a, false), nnf(b, false)),
        (Until(a, b), true) => Formula::release(nnf(a, true), nnf(b, true)),
        (Release(a, b), false) => Formula::release(nnf(a, false), nnf(b, false)),
        (Release(a, b), true) => Formula::until(nnf(a, true), nnf(b, true)),
        (Eventually(a), false) => Formula::eventually(nnf(a, false)),
        (Eventually(a), true) => Formula::always(nnf(a, true)),
        (Always(a), false) => Formula::always(nnf(a, false)),
        (Always(a), true) => Formula::eventually(nnf(a, true)),
    }
}

struct DisplayWith<'a> {
    formula: &'a Formula,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayWith<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.formula, &|f, a| {
            f.write_str(self.alphabet.name(a).unwrap_or("?"))
        })
    }
}

impl fmt::Display for Formula {
    /// Atoms print as `p<index>`; use [`Formula::display`] for real names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, &|f, a| write!(f, "p{}", a.index()))
    }
}

type AtomWriter<'w> = dyn Fn(&mut fmt::Formatter<'_>, AtomId) -> fmt::Result + 'w;

// Binary operators are always parenthesised so the output re-parses to the
// same tree regardless of precedence and associativity.
fn write_formula(f: &mut fmt::Formatter<'_>, node: &Formula, atom: &AtomWriter<'_>) -> fmt::Result {
    let unary = |f: &mut fmt::Formatter<'_>, op: &str, a: &Formula| {
        f.write_str(op)?;
        write_formula(f, a, atom)
    };
    let binary = |f: &mut fmt::Formatter<'_>, op: &str, a: &Formula, b: &Formula| {
        f.write_str("(")?;
        write_formula(f, a, atom)?;
        write!(f, " {op} ")?;
        write_formula(f, b, atom)?;
        f.write_str(")")
    };
    match node {
        Formula::True => f.write_str("1"),
        Formula::False => f.write_str("0"),
        Formula::Atom(a) => atom(f, *a),
        Formula::Not(a) => unary(f, "!", a),
        Formula::Next(a) => unary(f, "X ", a),
        Formula::Eventually(a) => unary(f, "F ", a),
        Formula::Always(a) => unary(f, "G ", a),
        Formula::And(a, b) => binary(f, "&", a, b),
        Formula::Or(a, b) => binary(f, "|", a, b),
        Formula::Until(a, b) => binary(f, "U", a, b),
        Formula::Release(a, b) => binary(f, "R", a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom(AtomId::new(0))
    }
    fn b() -> Formula {
        Formula::atom(AtomId::new(1))
    }

    #[test]
    fn nnf_of_negated_eventually_is_always_not() {
        let f = Formula::not(Formula::eventually(a()));
        assert_eq!(f.to_nnf(), Formula::always(Formula::not(a())));
    }

    #[test]
    fn nnf_of_negated_until_is_release() {
        let f = Formula::not(Formula::until(a(), b()));
        assert_eq!(
            f.to_nnf(),
            Formula::release(Formula::not(a()), Formula::not(b()))
        );
    }

    #[test]
    fn nnf_is_identity_on_nnf_input() {
        let f = Formula::and(
            Formula::eventually(Formula::not(a())),
            Formula::until(a(), Formula::next(b())),
        );
        assert!(f.is_nnf());
        assert_eq!(f.to_nnf(), f);
    }

    #[test]
    fn nnf_pushes_through_next_and_constants() {
        let f = Formula::not(Formula::next(Formula::or(Formula::True, a())));
        assert_eq!(
            f.to_nnf(),
            Formula::next(Formula::and(Formula::False, Formula::not(a())))
        );
    }

    #[test]
    fn cosafety_classification() {
        assert!(Formula::eventually(Formula::and(a(), Formula::eventually(b())))
            .is_syntactically_cosafe());
        assert!(!Formula::always(Formula::eventually(a())).is_syntactically_cosafe());
        let neg_until = Formula::not(Formula::until(a(), b()));
        assert!(!neg_until.is_syntactically_cosafe());
        assert!(!neg_until.to_nnf().is_syntactically_cosafe());
        assert!(Formula::until(Formula::not(a()), b()).is_syntactically_cosafe());
    }

    #[test]
    fn atoms_mask_collects_all() {
        let f = Formula::until(a(), Formula::next(Formula::not(b())));
        assert_eq!(f.atoms(), 0b11);
        assert_eq!(f.size(), 5);
    }
}
