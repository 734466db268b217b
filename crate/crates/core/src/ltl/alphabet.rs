use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::LtlError;

/// Largest alphabet a [`Letter`] bitmask can hold.
pub const MAX_ATOMS: usize = 64;

/// Index of an atomic proposition within one agent's alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomId(u8);

impl AtomId {
    pub fn new(index: usize) -> Self {
        assert!(index < MAX_ATOMS, "atom index {index} out of range");
        AtomId(index as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn mask(self) -> u64 {
        1u64 << self.0
    }
}

/// Ordered set of atom names. Position in the list is the [`AtomId`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, LtlError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for name in names {
            alphabet.insert(name.into())?;
        }
        Ok(alphabet)
    }

    /// Adds `name` if absent and returns its id.
    pub fn insert(&mut self, name: String) -> Result<AtomId, LtlError> {
        if let Some(id) = self.id(&name) {
            return Ok(id);
        }
        if self.names.len() == MAX_ATOMS {
            return Err(LtlError::AlphabetTooLarge(MAX_ATOMS));
        }
        self.names.push(name);
        Ok(AtomId::new(self.names.len() - 1))
    }

    pub fn id(&self, name: &str) -> Option<AtomId> {
        self.names.iter().position(|n| n == name).map(AtomId::new)
    }

    pub fn name(&self, id: AtomId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// The letter containing every atom.
    pub fn full(&self) -> Letter {
        Letter::from_mask(if self.names.len() == MAX_ATOMS {
            u64::MAX
        } else {
            (1u64 << self.names.len()) - 1
        })
    }

    pub fn ids(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.names.len()).map(AtomId::new)
    }

    /// Parses a list of names into a letter.
    pub fn letter<S: AsRef<str>>(&self, names: &[S]) -> Result<Letter, LtlError> {
        let mut letter = Letter::EMPTY;
        for n in names {
            let id = self
                .id(n.as_ref())
                .ok_or_else(|| LtlError::UnknownAtom(n.as_ref().to_string()))?;
            letter.insert(id);
        }
        Ok(letter)
    }

    pub fn letter_names(&self, letter: Letter) -> Vec<&str> {
        letter.iter().filter_map(|a| self.name(a)).collect()
    }
}

/// One position of a word over 2^Σ: the set of atoms that hold there.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter(u64);

impl Letter {
    pub const EMPTY: Letter = Letter(0);

    pub const fn from_mask(mask: u64) -> Self {
        Letter(mask)
    }

    pub fn from_atoms<I: IntoIterator<Item = AtomId>>(atoms: I) -> Self {
        Letter(atoms.into_iter().fold(0, |m, a| m | a.mask()))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, atom: AtomId) -> bool {
        self.0 & atom.mask() != 0
    }

    pub fn insert(&mut self, atom: AtomId) {
        self.0 |= atom.mask();
    }

    pub fn is_subset(self, other: Letter) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = AtomId> {
        (0..MAX_ATOMS)
            .filter(move |i| self.0 & (1u64 << i) != 0)
            .map(AtomId::new)
    }

    /// All subsets of `self`, ordered lexicographically by their sorted atom
    /// lists (the empty set first).
    pub fn subsets(self) -> Vec<Letter> {
        let atoms: Vec<AtomId> = self.iter().collect();
        let mut out = Vec::with_capacity(1 << atoms.len());
        out.push(Letter::EMPTY);
        fn extend(atoms: &[AtomId], base: Letter, out: &mut Vec<Letter>) {
            for (k, a) in atoms.iter().enumerate() {
                let mut next = base;
                next.insert(*a);
                out.push(next);
                extend(&atoms[k + 1..], next, out);
            }
        }
        extend(&atoms, Letter::EMPTY, &mut out);
        out
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, a) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "p{}", a.index())?;
        }
        f.write_str("}")
    }
}

/// A finite sequence of letters.
pub type FiniteWord = Vec<Letter>;

/// The ultimately periodic word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, LtlError> {
        if cycle.is_empty() {
            return Err(LtlError::EmptyCycle);
        }
        Ok(LassoWord { prefix, cycle })
    }

    /// Finite word followed by the empty letter forever.
    pub fn padded(word: &[Letter], pad: Letter) -> Self {
        LassoWord {
            prefix: word.to_vec(),
            cycle: vec![pad],
        }
    }

    /// Number of distinct positions: `|prefix| + |cycle|`.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter at distinct position `pos < len()`.
    pub fn at(&self, pos: usize) -> Letter {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.cycle[pos - self.prefix.len()]
        }
    }

    /// Successor of a distinct position; the last one wraps to the cycle start.
    pub fn succ(&self, pos: usize) -> usize {
        if pos + 1 == self.len() {
            self.prefix.len()
        } else {
            pos + 1
        }
    }

    /// Letter at an arbitrary (unbounded) index of the infinite word.
    pub fn letter(&self, index: usize) -> Letter {
        if index < self.prefix.len() {
            self.prefix[index]
        } else {
            self.cycle[(index - self.prefix.len()) % self.cycle.len()]
        }
    }
}

/// Every lasso word over `letters` with `|prefix| + |cycle| <= max_len`.
pub fn enumerate_lassos(letters: &[Letter], max_len: usize) -> Vec<LassoWord> {
    let mut out = Vec::new();
    for total in 1..=max_len {
        for cycle_len in 1..=total {
            let prefix_len = total - cycle_len;
            for word in enumerate_words(letters, total) {
                out.push(LassoWord {
                    prefix: word[..prefix_len].to_vec(),
                    cycle: word[prefix_len..].to_vec(),
                });
            }
        }
    }
    out
}

/// Every word of exactly `len` letters drawn from `letters`.
pub fn enumerate_words(letters: &[Letter], len: usize) -> Vec<FiniteWord> {
    let mut out: Vec<FiniteWord> = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |l| {
                    let mut next = w.clone();
                    next.push(*l);
                    next
                })
            })
            .collect();
    }
    out
}
