//! Direct evaluation of LTL over ultimately periodic words.
//!
//! This is the reference the automata constructions are checked against, so
//! it stays deliberately naive: one truth table per sub-formula occurrence,
//! indexed by lasso position, with temporal operators computed as least
//! (`U`, `F`) or greatest (`R`, `G`) fixpoints over the successor function.

use super::alphabet::{LassoWord, Letter};
use super::formula::Formula;

/// Truth of `f` at position 0 of `word`.
pub fn eval_lasso(f: &Formula, word: &LassoWord) -> bool {
    table(f, word)[0]
}

/// Truth of `f` on the finite word followed by `pad` forever.
pub fn eval_padded(f: &Formula, word: &[Letter], pad: Letter) -> bool {
    eval_lasso(f, &LassoWord::padded(word, pad))
}

fn table(f: &Formula, w: &LassoWord) -> Vec<bool> {
    let n = w.len();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => (0..n).map(|i| w.at(i).contains(*a)).collect(),
        Formula::Not(a) => table(a, w).into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => {
            let (ta, tb) = (table(a, w), table(b, w));
            ta.iter().zip(&tb).map(|(x, y)| *x && *y).collect()
        }
        Formula::Or(a, b) => {
            let (ta, tb) = (table(a, w), table(b, w));
            ta.iter().zip(&tb).map(|(x, y)| *x || *y).collect()
        }
        Formula::Next(a) => {
            let ta = table(a, w);
            (0..n).map(|i| ta[w.succ(i)]).collect()
        }
        Formula::Until(a, b) => {
            let (ta, tb) = (table(a, w), table(b, w));
            fixpoint(w, false, |i, next| tb[i] || (ta[i] && next))
        }
        Formula::Release(a, b) => {
            let (ta, tb) = (table(a, w), table(b, w));
            fixpoint(w, true, |i, next| tb[i] && (ta[i] || next))
        }
        Formula::Eventually(a) => {
            let ta = table(a, w);
            fixpoint(w, false, |i, next| ta[i] || next)
        }
        Formula::Always(a) => {
            let ta = table(a, w);
            fixpoint(w, true, |i, next| ta[i] && next)
        }
    }
}

// Iterates `v[i] = step(i, v[succ(i)])` from the constant `init` until
// stable; `len` rounds always suffice since every chain of successors
// enters the cycle within `len` steps.
fn fixpoint(w: &LassoWord, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = w.len();
    let mut v = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let nv = step(i, v[w.succ(i)]);
            if nv != v[i] {
                v[i] = nv;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}
