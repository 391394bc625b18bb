//! Distributed alphabets.
//!
//! A distributed alphabet assigns every letter the non-empty set of processes
//! taking part in it. Two letters are independent when their process sets are
//! disjoint. Letters and processes are strings; internally they are indexed in
//! lexicographic order so every downstream tie-break is reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum number of letters supported by the bitset representation.
pub const MAX_LETTERS: usize = 128;
/// Maximum number of processes supported by the bitset representation.
pub const MAX_PROCESSES: usize = 64;

/// Index of a letter in the lexicographic letter order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LetterId(pub u8);

impl LetterId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a process in the lexicographic process order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProcId(pub u8);

impl ProcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of letters as a bitset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LetterSet(pub u128);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet(0);

    pub fn singleton(a: LetterId) -> Self {
        LetterSet(1u128 << a.0)
    }

    pub fn contains(self, a: LetterId) -> bool {
        self.0 >> a.0 & 1 == 1
    }

    pub fn insert(&mut self, a: LetterId) {
        self.0 |= 1u128 << a.0;
    }

    pub fn remove(&mut self, a: LetterId) {
        self.0 &= !(1u128 << a.0);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        LetterSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        LetterSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        LetterSet(self.0 & !other.0)
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Letters in increasing index order.
    pub fn iter(self) -> impl Iterator<Item = LetterId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Some(LetterId(i as u8))
        })
    }
}

impl FromIterator<LetterId> for LetterSet {
    fn from_iter<I: IntoIterator<Item = LetterId>>(iter: I) -> Self {
        let mut s = LetterSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

/// A set of processes as a bitset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcSet(pub u64);

impl ProcSet {
    pub const EMPTY: ProcSet = ProcSet(0);

    pub fn singleton(p: ProcId) -> Self {
        ProcSet(1u64 << p.0)
    }

    pub fn contains(self, p: ProcId) -> bool {
        self.0 >> p.0 & 1 == 1
    }

    pub fn insert(&mut self, p: ProcId) {
        self.0 |= 1u64 << p.0;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        ProcSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ProcSet(self.0 & other.0)
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ProcId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Some(ProcId(i as u8))
        })
    }
}

impl FromIterator<ProcId> for ProcSet {
    fn from_iter<I: IntoIterator<Item = ProcId>>(iter: I) -> Self {
        let mut s = ProcSet::EMPTY;
        for p in iter {
            s.insert(p);
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("letter `{0}` has an empty location")]
    EmptyLoc(String),
    #[error("letter `{letter}` mentions unknown process `{process}`")]
    UnknownProcess { letter: String, process: String },
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("duplicate process `{0}`")]
    DuplicateProcess(String),
    #[error("letter `{0}` has no location")]
    MissingLoc(String),
    #[error("location given for undeclared letter `{0}`")]
    UndeclaredLetter(String),
    #[error("process `{0}` takes part in no letter")]
    DeadProcess(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("too many letters ({0}, at most {MAX_LETTERS})")]
    TooManyLetters(usize),
    #[error("too many processes ({0}, at most {MAX_PROCESSES})")]
    TooManyProcesses(usize),
    #[error("empty identifier")]
    EmptyName,
}

/// A distributed alphabet `(Σ, loc)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributedAlphabet {
    letters: Vec<String>,
    processes: Vec<String>,
    loc: Vec<ProcSet>,
    /// Letters dependent on each letter (including itself).
    dep: Vec<LetterSet>,
    /// `Σ_p` for each process.
    sigma: Vec<LetterSet>,
    letter_index: BTreeMap<String, LetterId>,
    process_index: BTreeMap<String, ProcId>,
}

impl DistributedAlphabet {
    /// Builds and validates an alphabet. Input order is irrelevant; indices
    /// follow lexicographic order of the identifiers.
    pub fn new<L, P>(letters: L, processes: P, loc: &BTreeMap<String, Vec<String>>) -> Result<Self, AlphabetError>
    where
        L: IntoIterator,
        L::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let mut letter_set = BTreeSet::new();
        for l in letters {
            let l = l.into();
            if l.is_empty() {
                return Err(AlphabetError::EmptyName);
            }
            if !letter_set.insert(l.clone()) {
                return Err(AlphabetError::DuplicateLetter(l));
            }
        }
        let mut proc_set = BTreeSet::new();
        for p in processes {
            let p = p.into();
            if p.is_empty() {
                return Err(AlphabetError::EmptyName);
            }
            if !proc_set.insert(p.clone()) {
                return Err(AlphabetError::DuplicateProcess(p));
            }
        }
        if letter_set.len() > MAX_LETTERS {
            return Err(AlphabetError::TooManyLetters(letter_set.len()));
        }
        if proc_set.len() > MAX_PROCESSES {
            return Err(AlphabetError::TooManyProcesses(proc_set.len()));
        }
        let letters: Vec<String> = letter_set.into_iter().collect();
        let processes: Vec<String> = proc_set.into_iter().collect();
        let process_index: BTreeMap<String, ProcId> = processes
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), ProcId(i as u8)))
            .collect();
        let letter_index: BTreeMap<String, LetterId> = letters
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), LetterId(i as u8)))
            .collect();
        for key in loc.keys() {
            if !letter_index.contains_key(key) {
                return Err(AlphabetError::UndeclaredLetter(key.clone()));
            }
        }
        let mut locs = Vec::with_capacity(letters.len());
        for a in &letters {
            let ps = loc.get(a).ok_or_else(|| AlphabetError::MissingLoc(a.clone()))?;
            if ps.is_empty() {
                return Err(AlphabetError::EmptyLoc(a.clone()));
            }
            let mut set = ProcSet::EMPTY;
            for p in ps {
                let id = process_index.get(p).ok_or_else(|| AlphabetError::UnknownProcess {
                    letter: a.clone(),
                    process: p.clone(),
                })?;
                set.insert(*id);
            }
            locs.push(set);
        }
        let mut sigma = vec![LetterSet::EMPTY; processes.len()];
        for (i, l) in locs.iter().enumerate() {
            for p in l.iter() {
                sigma[p.index()].insert(LetterId(i as u8));
            }
        }
        if let Some(i) = sigma.iter().position(|s| s.is_empty()) {
            return Err(AlphabetError::DeadProcess(processes[i].clone()));
        }
        let dep = locs
            .iter()
            .map(|la| {
                locs.iter()
                    .enumerate()
                    .filter(|(_, lb)| la.intersects(**lb))
                    .map(|(j, _)| LetterId(j as u8))
                    .collect()
            })
            .collect();
        Ok(DistributedAlphabet {
            letters,
            processes,
            loc: locs,
            dep,
            sigma,
            letter_index,
            process_index,
        })
    }

    /// Convenience constructor from `(letter, [process, ...])` pairs; the
    /// process set is the union of all locations.
    pub fn from_locs(pairs: &[(&str, &[&str])]) -> Result<Self, AlphabetError> {
        let loc: BTreeMap<String, Vec<String>> = pairs
            .iter()
            .map(|(a, ps)| (a.to_string(), ps.iter().map(|p| p.to_string()).collect()))
            .collect();
        let procs: BTreeSet<String> = loc.values().flatten().cloned().collect();
        Self::new(loc.keys().cloned(), procs, &loc)
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn num_processes(&self) -> usize {
        self.processes.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = LetterId> {
        (0..self.letters.len()).map(|i| LetterId(i as u8))
    }

    pub fn processes(&self) -> impl Iterator<Item = ProcId> {
        (0..self.processes.len()).map(|i| ProcId(i as u8))
    }

    pub fn all_letters(&self) -> LetterSet {
        self.letters().collect()
    }

    pub fn all_processes(&self) -> ProcSet {
        self.processes().collect()
    }

    pub fn letter_name(&self, a: LetterId) -> &str {
        &self.letters[a.index()]
    }

    pub fn process_name(&self, p: ProcId) -> &str {
        &self.processes[p.index()]
    }

    pub fn letter(&self, name: &str) -> Result<LetterId, AlphabetError> {
        self.letter_index
            .get(name)
            .copied()
            .ok_or_else(|| AlphabetError::UnknownLetter(name.to_string()))
    }

    pub fn process(&self, name: &str) -> Option<ProcId> {
        self.process_index.get(name).copied()
    }

    pub fn loc(&self, a: LetterId) -> ProcSet {
        self.loc[a.index()]
    }

    /// Letters dependent on `a`, including `a`.
    pub fn dependent_on(&self, a: LetterId) -> LetterSet {
        self.dep[a.index()]
    }

    /// Union of the dependency sets of all letters in `s`.
    pub fn dependent_on_any(&self, s: LetterSet) -> LetterSet {
        s.iter().fold(LetterSet::EMPTY, |acc, a| acc.union(self.dep[a.index()]))
    }

    /// `Σ_p`.
    pub fn sigma(&self, p: ProcId) -> LetterSet {
        self.sigma[p.index()]
    }

    /// Letters in which at least one process of `x` takes part.
    pub fn sigma_of(&self, x: ProcSet) -> LetterSet {
        x.iter()
            .fold(LetterSet::EMPTY, |acc, p| acc.union(self.sigma[p.index()]))
    }

    /// Letters whose location is contained in `x` (written `Σ|X`).
    pub fn letters_within(&self, x: ProcSet) -> LetterSet {
        self.letters().filter(|a| self.loc(*a).is_subset(x)).collect()
    }

    pub fn independent(&self, a: LetterId, b: LetterId) -> bool {
        !self.loc(a).intersects(self.loc(b))
    }

    /// Name-based independence query.
    pub fn independent_by_name(&self, a: &str, b: &str) -> Result<bool, AlphabetError> {
        Ok(self.independent(self.letter(a)?, self.letter(b)?))
    }

    pub fn loc_of_word(&self, w: &[LetterId]) -> ProcSet {
        w.iter().fold(ProcSet::EMPTY, |acc, a| acc.union(self.loc(*a)))
    }

    pub fn loc_of_set(&self, s: LetterSet) -> ProcSet {
        s.iter().fold(ProcSet::EMPTY, |acc, a| acc.union(self.loc(a)))
    }

    /// Edges `{p, q}` with `p < q` and `Σ_p ∩ Σ_q ≠ ∅`.
    pub fn communication_graph(&self) -> BTreeSet<(ProcId, ProcId)> {
        let mut edges = BTreeSet::new();
        for p in self.processes() {
            for q in self.processes().filter(|q| *q > p) {
                if self.sigma(p).intersects(self.sigma(q)) {
                    edges.insert((p, q));
                }
            }
        }
        edges
    }

    /// Parses a word. Tokens may be separated by whitespace or commas; a
    /// token that is not a letter is split into single characters when every
    /// letter name is one character long.
    pub fn parse_word(&self, text: &str) -> Result<Vec<LetterId>, AlphabetError> {
        let single = self.letters.iter().all(|l| l.chars().count() == 1);
        let mut out = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            if let Ok(a) = self.letter(tok) {
                out.push(a);
            } else if single {
                for ch in tok.chars() {
                    out.push(self.letter(&ch.to_string())?);
                }
            } else {
                return Err(AlphabetError::UnknownLetter(tok.to_string()));
            }
        }
        Ok(out)
    }

    /// Renders a word, concatenating single-character letters and
    /// space-separating otherwise.
    pub fn render_word(&self, w: &[LetterId]) -> String {
        let single = self.letters.iter().all(|l| l.chars().count() == 1);
        let names: Vec<&str> = w.iter().map(|a| self.letter_name(*a)).collect();
        if single {
            names.concat()
        } else {
            names.join(" ")
        }
    }

    pub fn render_procs(&self, x: ProcSet) -> String {
        let names: Vec<&str> = x.iter().map(|p| self.process_name(p)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn to_json(&self) -> AlphabetJson {
        AlphabetJson {
            letters: self.letters.clone(),
            processes: self.processes.clone(),
            loc: self
                .letters()
                .map(|a| {
                    (
                        self.letter_name(a).to_string(),
                        self.loc(a).iter().map(|p| self.process_name(p).to_string()).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn from_json(j: &AlphabetJson) -> Result<Self, AlphabetError> {
        Self::new(j.letters.iter().cloned(), j.processes.iter().cloned(), &j.loc)
    }
}

impl fmt::Display for DistributedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.letters() {
            writeln!(f, "{}: {}", self.letter_name(a), self.render_procs(self.loc(a)))?;
        }
        Ok(())
    }
}

/// Serialized form `{"letters": [...], "processes": [...], "loc": {...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetJson {
    pub letters: Vec<String>,
    pub processes: Vec<String>,
    pub loc: BTreeMap<String, Vec<String>>,
}
