//! Specification DFAs over a distributed alphabet.
//!
//! Transition functions are partial; a missing transition rejects. The
//! module checks the diamond property, trims, completes, decides language
//! equivalence with a shortest separating word, and computes the fairness
//! parameter by boolean matrix powers of the relations `G_p` (transitions on
//! letters in which `p` does not take part).

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{AlphabetError, AlphabetJson, DistributedAlphabet, LetterId, LetterSet, ProcId};
use crate::traces::Fnf;

/// Index of a DFA state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfaError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("two transitions from `{state}` on `{letter}`")]
    Nondeterministic { state: String, letter: String },
    #[error("a DFA needs at least one state")]
    NoStates,
    #[error("the DFA is not trim: state `{0}` is unreachable or cannot reach acceptance")]
    NotTrim(String),
    #[error("fairness parameter must be at least 1")]
    ZeroK,
    #[error("the two automata use different alphabets")]
    AlphabetMismatch,
    #[error("{0} diamond violation(s), first at state `{1}`")]
    NotDiamond(usize, String),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

/// What went wrong at a diamond `q →a q′ →b q″` with `a I b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiamondKind {
    /// `q →b` is undefined.
    MissingFirst,
    /// `q →b q‴` exists but `q‴ →a` is undefined.
    MissingSecond,
    /// `q →b q‴ →a` leads somewhere other than `q″`.
    Mismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiamondViolation {
    pub state: StateId,
    pub a: LetterId,
    pub b: LetterId,
    pub kind: DiamondKind,
}

/// A path of length `k` avoiding `process`, extended into an accepted word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessWitness {
    pub process: ProcId,
    pub start: StateId,
    /// The starving factor.
    pub word: Vec<LetterId>,
    /// A word from the initial state to `start`.
    pub prefix: Vec<LetterId>,
    /// A word from the end of `word` to an accepting state.
    pub suffix: Vec<LetterId>,
}

impl FairnessWitness {
    /// `prefix · word · suffix`, an accepted word whose trace is not k-fair.
    pub fn accepted_word(&self) -> Vec<LetterId> {
        let mut w = self.prefix.clone();
        w.extend(&self.word);
        w.extend(&self.suffix);
        w
    }
}

/// A deterministic automaton with a partial transition function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Arc<DistributedAlphabet>,
    names: Vec<String>,
    initial: StateId,
    accepting: Vec<bool>,
    delta: Vec<Option<StateId>>,
}

impl Dfa {
    /// Builds a DFA from indexed parts.
    pub fn new(
        alphabet: Arc<DistributedAlphabet>,
        names: Vec<String>,
        initial: StateId,
        accepting: Vec<bool>,
        transitions: &[(StateId, LetterId, StateId)],
    ) -> Result<Self, DfaError> {
        if names.is_empty() {
            return Err(DfaError::NoStates);
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(DfaError::DuplicateState(n.clone()));
            }
        }
        let n = names.len();
        let nl = alphabet.num_letters();
        assert_eq!(accepting.len(), n, "one acceptance flag per state");
        if initial.index() >= n {
            return Err(DfaError::UnknownState(format!("#{}", initial.0)));
        }
        let mut delta = vec![None; n * nl];
        for &(q, a, r) in transitions {
            if q.index() >= n || r.index() >= n {
                return Err(DfaError::UnknownState(format!("#{}", q.0.max(r.0))));
            }
            let slot = &mut delta[q.index() * nl + a.index()];
            match slot {
                Some(old) if *old != r => {
                    return Err(DfaError::Nondeterministic {
                        state: names[q.index()].clone(),
                        letter: alphabet.letter_name(a).to_string(),
                    })
                }
                _ => *slot = Some(r),
            }
        }
        Ok(Dfa {
            alphabet,
            names,
            initial,
            accepting,
            delta,
        })
    }

    /// Builds a DFA from state and letter names.
    pub fn from_named(
        alphabet: Arc<DistributedAlphabet>,
        states: &[&str],
        initial: &str,
        accepting: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self, DfaError> {
        let index: BTreeMap<&str, StateId> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, StateId(i as u32)))
            .collect();
        let find = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| DfaError::UnknownState(s.to_string()))
        };
        let mut acc = vec![false; states.len()];
        for s in accepting {
            acc[find(s)?.index()] = true;
        }
        let mut ts = Vec::with_capacity(transitions.len());
        for (q, a, r) in transitions {
            ts.push((find(q)?, alphabet.letter(a)?, find(r)?));
        }
        Dfa::new(
            alphabet,
            states.iter().map(|s| s.to_string()).collect(),
            find(initial)?,
            acc,
            &ts,
        )
    }

    pub fn alphabet(&self) -> &DistributedAlphabet {
        &self.alphabet
    }

    pub fn alphabet_arc(&self) -> &Arc<DistributedAlphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.names.len() as u32).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q.index()]
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name).map(|i| StateId(i as u32))
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q.index()]
    }

    pub fn next(&self, q: StateId, a: LetterId) -> Option<StateId> {
        self.delta[q.index() * self.alphabet.num_letters() + a.index()]
    }

    /// All transitions `(q, a, q′)`, ordered by state then letter.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, LetterId, StateId)> + '_ {
        self.states().flat_map(move |q| {
            self.alphabet
                .letters()
                .filter_map(move |a| self.next(q, a).map(|r| (q, a, r)))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().filter(|d| d.is_some()).count()
    }

    pub fn run_word(&self, q: StateId, w: &[LetterId]) -> Option<StateId> {
        w.iter().try_fold(q, |q, a| self.next(q, *a))
    }

    /// Runs over a trace, steps in order and letters ascending within a
    /// step. For diamond DFAs the result does not depend on the order.
    pub fn run_trace(&self, q: StateId, t: &Fnf) -> Option<StateId> {
        self.run_word(q, &t.canonical_word())
    }

    pub fn accepts(&self, w: &[LetterId]) -> bool {
        self.run_word(self.initial, w).is_some_and(|q| self.is_accepting(q))
    }

    /// All violations of the diamond property, including definedness gaps.
    pub fn check_diamond(&self) -> Vec<DiamondViolation> {
        let mut out = Vec::new();
        for q in self.states() {
            for a in self.alphabet.letters() {
                let Some(q1) = self.next(q, a) else { continue };
                for b in self.alphabet.letters() {
                    if a == b || !self.alphabet.independent(a, b) {
                        continue;
                    }
                    let Some(q2) = self.next(q1, b) else { continue };
                    let kind = match self.next(q, b) {
                        None => Some(DiamondKind::MissingFirst),
                        Some(q3) => match self.next(q3, a) {
                            None => Some(DiamondKind::MissingSecond),
                            Some(q4) if q4 != q2 => Some(DiamondKind::Mismatch),
                            Some(_) => None,
                        },
                    };
                    if let Some(kind) = kind {
                        out.push(DiamondViolation { state: q, a, b, kind });
                    }
                }
            }
        }
        out
    }

    /// Errors unless the diamond property holds.
    pub fn ensure_diamond(&self) -> Result<(), DfaError> {
        let v = self.check_diamond();
        match v.first() {
            None => Ok(()),
            Some(first) => Err(DfaError::NotDiamond(v.len(), self.state_name(first.state).to_string())),
        }
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        seen[self.initial.index()] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            for a in self.alphabet.letters() {
                if let Some(r) = self.next(q, a) {
                    if !seen[r.index()] {
                        seen[r.index()] = true;
                        queue.push_back(r);
                    }
                }
            }
        }
        seen
    }

    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (q, _, r) in self.transitions() {
            rev[r.index()].push(q);
        }
        let mut seen = self.accepting.clone();
        let mut queue: VecDeque<StateId> = self.states().filter(|q| seen[q.index()]).collect();
        while let Some(r) = queue.pop_front() {
            for &q in &rev[r.index()] {
                if !seen[q.index()] {
                    seen[q.index()] = true;
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    /// The first state that is unreachable or not co-reachable.
    pub fn first_untrim_state(&self) -> Option<StateId> {
        let r = self.reachable();
        let c = self.coreachable();
        self.states().find(|q| !r[q.index()] || !c[q.index()])
    }

    pub fn is_trim(&self) -> bool {
        self.first_untrim_state().is_none()
    }

    pub fn ensure_trim(&self) -> Result<(), DfaError> {
        match self.first_untrim_state() {
            None => Ok(()),
            Some(q) => Err(DfaError::NotTrim(self.state_name(q).to_string())),
        }
    }

    /// Restricts to states both reachable and co-reachable, keeping names
    /// and relative order. An empty language yields one rejecting state.
    pub fn trim(&self) -> Dfa {
        let r = self.reachable();
        let c = self.coreachable();
        let keep: Vec<bool> = (0..self.num_states()).map(|i| r[i] && c[i]).collect();
        if !keep[self.initial.index()] {
            return Dfa {
                alphabet: self.alphabet.clone(),
                names: vec![self.state_name(self.initial).to_string()],
                initial: StateId(0),
                accepting: vec![false],
                delta: vec![None; self.alphabet.num_letters()],
            };
        }
        let mut map = vec![None; self.num_states()];
        let mut names = Vec::new();
        let mut accepting = Vec::new();
        for q in self.states().filter(|q| keep[q.index()]) {
            map[q.index()] = Some(StateId(names.len() as u32));
            names.push(self.state_name(q).to_string());
            accepting.push(self.is_accepting(q));
        }
        let ts: Vec<_> = self
            .transitions()
            .filter_map(|(q, a, r)| Some((map[q.index()]?, a, map[r.index()]?)))
            .collect();
        Dfa::new(
            self.alphabet.clone(),
            names,
            map[self.initial.index()].expect("initial kept"),
            accepting,
            &ts,
        )
        .expect("restriction of a valid DFA")
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|d| d.is_some())
    }

    /// Adds one rejecting sink absorbing every missing transition. A
    /// complete DFA is returned unchanged.
    pub fn complete_with_sink(&self) -> Dfa {
        if self.is_complete() {
            return self.clone();
        }
        let mut sink_name = "sink".to_string();
        while self.names.contains(&sink_name) {
            sink_name.push('\'');
        }
        let sink = StateId(self.num_states() as u32);
        let mut names = self.names.clone();
        names.push(sink_name);
        let mut accepting = self.accepting.clone();
        accepting.push(false);
        let mut delta: Vec<Option<StateId>> = self.delta.iter().map(|d| Some(d.unwrap_or(sink))).collect();
        delta.extend(std::iter::repeat(Some(sink)).take(self.alphabet.num_letters()));
        Dfa {
            alphabet: self.alphabet.clone(),
            names,
            initial: self.initial,
            accepting,
            delta,
        }
    }

    /// `G_p`: pairs `(q, δ(q,a))` with `a ∉ Σ_p`.
    fn starving_relation(&self, p: ProcId) -> BitMatrix {
        self.relation_on(self.alphabet.all_letters().difference(self.alphabet.sigma(p)))
    }

    /// The relation `{(q, δ(q,a)) | a ∈ letters}`.
    pub(crate) fn relation_on(&self, letters: LetterSet) -> BitMatrix {
        let mut m = BitMatrix::new(self.num_states());
        for (q, a, r) in self.transitions() {
            if letters.contains(a) {
                m.set(q.index(), r.index());
            }
        }
        m
    }

    /// True iff every path of length `k` involves every process. Requires a
    /// trim DFA.
    pub fn is_k_fair(&self, k: usize) -> Result<bool, DfaError> {
        Ok(self.unfair_witness(k)?.is_none())
    }

    /// The least `k ≤ |Q|` for which the DFA is k-fair, or `None` when the
    /// DFA is not fair at all.
    pub fn fairness_parameter(&self) -> Result<Option<usize>, DfaError> {
        self.ensure_trim()?;
        let n = self.num_states();
        let gs: Vec<BitMatrix> = self.alphabet.processes().map(|p| self.starving_relation(p)).collect();
        let mut powers = gs.clone();
        for k in 1..=n {
            if powers.iter().all(|m| m.is_empty()) {
                return Ok(Some(k));
            }
            for (pw, g) in powers.iter_mut().zip(&gs) {
                if !pw.is_empty() {
                    *pw = pw.compose(g);
                }
            }
        }
        Ok(None)
    }

    /// A path of `k` letters avoiding some process, if one exists. Processes
    /// are tried in order and letters ascending, so the witness is canonical.
    pub fn unfair_witness(&self, k: usize) -> Result<Option<FairnessWitness>, DfaError> {
        if k == 0 {
            return Err(DfaError::ZeroK);
        }
        self.ensure_trim()?;
        let n = self.num_states();
        for p in self.alphabet.processes() {
            let avoid = self.alphabet.all_letters().difference(self.alphabet.sigma(p));
            // can[i][q]: a path of i avoiding letters starts at q
            let mut can = vec![vec![true; n]];
            for i in 1..=k {
                let row: Vec<bool> = self
                    .states()
                    .map(|q| {
                        avoid
                            .iter()
                            .any(|a| self.next(q, a).is_some_and(|r| can[i - 1][r.index()]))
                    })
                    .collect();
                can.push(row);
            }
            let Some(start) = self.states().find(|q| can[k][q.index()]) else {
                continue;
            };
            let mut word = Vec::with_capacity(k);
            let mut q = start;
            for i in (0..k).rev() {
                let a = avoid
                    .iter()
                    .find(|a| self.next(q, *a).is_some_and(|r| can[i][r.index()]))
                    .expect("path exists by construction");
                word.push(a);
                q = self.next(q, a).expect("defined");
            }
            let prefix = self
                .shortest_path(self.initial, |s| s == start)
                .expect("trim: reachable");
            let suffix = self
                .shortest_path(q, |s| self.is_accepting(s))
                .expect("trim: co-reachable");
            return Ok(Some(FairnessWitness {
                process: p,
                start,
                word,
                prefix,
                suffix,
            }));
        }
        Ok(None)
    }

    /// A shortest word from `from` to a state satisfying `target`.
    pub fn shortest_path(&self, from: StateId, target: impl Fn(StateId) -> bool) -> Option<Vec<LetterId>> {
        let mut parent: Vec<Option<(StateId, LetterId)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        seen[from.index()] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            if target(q) {
                let mut w = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur.index()] {
                    w.push(a);
                    cur = p;
                }
                w.reverse();
                return Some(w);
            }
            for a in self.alphabet.letters() {
                if let Some(r) = self.next(q, a) {
                    if !seen[r.index()] {
                        seen[r.index()] = true;
                        parent[r.index()] = Some((q, a));
                        queue.push_back(r);
                    }
                }
            }
        }
        None
    }

    /// `None` when the languages coincide, otherwise a shortest word
    /// accepted by exactly one of the two automata.
    pub fn equivalent(&self, other: &Dfa) -> Result<Option<Vec<LetterId>>, DfaError> {
        if *self.alphabet != *other.alphabet {
            return Err(DfaError::AlphabetMismatch);
        }
        type Pair = (Option<StateId>, Option<StateId>);
        let acc = |d: &Dfa, q: Option<StateId>| q.is_some_and(|q| d.is_accepting(q));
        let start: Pair = (Some(self.initial), Some(other.initial));
        let mut parent: std::collections::HashMap<Pair, Option<(Pair, LetterId)>> = std::collections::HashMap::new();
        parent.insert(start, None);
        let mut queue = VecDeque::from([start]);
        while let Some(pair) = queue.pop_front() {
            if acc(self, pair.0) != acc(other, pair.1) {
                let mut w = Vec::new();
                let mut cur = pair;
                while let Some(Some((p, a))) = parent.get(&cur) {
                    w.push(*a);
                    cur = *p;
                }
                w.reverse();
                return Ok(Some(w));
            }
            if pair == (None, None) {
                continue;
            }
            for a in self.alphabet.letters() {
                let next = (
                    pair.0.and_then(|q| self.next(q, a)),
                    pair.1.and_then(|q| other.next(q, a)),
                );
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((pair, a)));
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    /// Deterministic DOT rendering. `labels` overrides state names.
    pub fn to_dot(&self, labels: Option<&[String]>) -> String {
        let label = |q: StateId| match labels {
            Some(l) => l[q.index()].clone(),
            None => self.state_name(q).to_string(),
        };
        let esc = |s: String| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut out = String::new();
        out.push_str("digraph automaton {\n  rankdir=LR;\n  init [shape=point];\n");
        for q in self.states() {
            let shape = if self.is_accepting(q) { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{} [label=\"{}\", shape={}];", q.0, esc(label(q)), shape);
        }
        let _ = writeln!(out, "  init -> s{};", self.initial.0);
        for (q, a, r) in self.transitions() {
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"];",
                q.0,
                r.0,
                esc(self.alphabet.letter_name(a).to_string())
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> DfaJson {
        DfaJson {
            states: self.names.clone(),
            initial: self.state_name(self.initial).to_string(),
            accepting: self
                .states()
                .filter(|q| self.is_accepting(*q))
                .map(|q| self.state_name(q).to_string())
                .collect(),
            transitions: self
                .transitions()
                .map(|(q, a, r)| TransitionJson {
                    from: self.state_name(q).to_string(),
                    letter: self.alphabet.letter_name(a).to_string(),
                    to: self.state_name(r).to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(alphabet: Arc<DistributedAlphabet>, j: &DfaJson) -> Result<Self, DfaError> {
        let states: Vec<&str> = j.states.iter().map(|s| s.as_str()).collect();
        let acc: Vec<&str> = j.accepting.iter().map(|s| s.as_str()).collect();
        let ts: Vec<(&str, &str, &str)> = j
            .transitions
            .iter()
            .map(|t| (t.from.as_str(), t.letter.as_str(), t.to.as_str()))
            .collect();
        Dfa::from_named(alphabet, &states, &j.initial, &acc, &ts)
    }

    pub fn to_spec_json(&self) -> SpecJson {
        SpecJson {
            alphabet: self.alphabet.to_json(),
            dfa: self.to_json(),
        }
    }
}

/// Serialized DFA.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: String,
    pub letter: String,
    pub to: String,
}

/// An alphabet and a DFA in one document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecJson {
    pub alphabet: AlphabetJson,
    pub dfa: DfaJson,
}

impl SpecJson {
    pub fn load(&self) -> Result<Dfa, DfaError> {
        let alpha = Arc::new(DistributedAlphabet::from_json(&self.alphabet)?);
        Dfa::from_json(alpha, &self.dfa)
    }
}

/// Square boolean matrix with bit-packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub(crate) fn new(n: usize) -> Self {
        BitMatrix {
            n,
            rows: vec![vec![0; n.div_ceil(64)]; n],
        }
    }

    pub(crate) fn identity(n: usize) -> Self {
        let mut m = Self::new(n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub(crate) fn set(&mut self, i: usize, j: usize) {
        self.rows[i][j / 64] |= 1 << (j % 64);
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|w| *w == 0))
    }

    /// Relational composition: `(i, k)` iff `(i, j) ∈ self` and `(j, k) ∈ other`.
    pub(crate) fn compose(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::new(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    for (w, o) in out.rows[i].iter_mut().zip(&other.rows[j]) {
                        *w |= o;
                    }
                }
            }
        }
        out
    }

    pub(crate) fn union(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = self.clone();
        for (r, o) in out.rows.iter_mut().zip(&other.rows) {
            for (w, x) in r.iter_mut().zip(o) {
                *w |= x;
            }
        }
        out
    }

    /// Reflexive-transitive closure.
    pub(crate) fn star(&self) -> BitMatrix {
        let mut acc = BitMatrix::identity(self.n);
        loop {
            let next = acc.union(&acc.compose(self));
            if next == acc {
                return acc;
            }
            acc = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(d: &Dfa, s: &str) -> Vec<LetterId> {
        d.alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn fig3_runs() {
        let d = fixtures::fig3();
        let q0 = d.initial();
        assert_eq!(d.run_word(q0, &w(&d, "abcdbdcb")), Some(q0));
        assert_eq!(d.run_word(q0, &[]), Some(q0));
        let t = Fnf::parse(d.alphabet(), "{a}{b}{c,d}{b}{c,d}{b}").unwrap();
        assert_eq!(d.run_trace(q0, &t), Some(q0));
        assert!(d.run_word(q0, &w(&d, "bb")).is_none());
    }

    #[test]
    fn run_trace_is_order_independent() {
        let d = fixtures::fig3();
        let t = Fnf::from_word(d.alphabet(), &w(&d, "abcdbdcb"));
        for lin in t.linearisations(d.alphabet(), 1000).unwrap() {
            assert_eq!(d.run_word(d.initial(), &lin), d.run_trace(d.initial(), &t));
        }
    }

    #[test]
    fn diamond_checks() {
        assert!(fixtures::fig1().check_diamond().is_empty());
        assert!(fixtures::fig3().check_diamond().is_empty());
        let al = Arc::new(fixtures::example1_alphabet());
        let loops: Vec<(&str, &str, &str)> = vec![("q", "a", "q"), ("q", "b", "q"), ("q", "c", "q"), ("q", "d", "q")];
        let one = Dfa::from_named(al.clone(), &["q"], "q", &["q"], &loops).unwrap();
        assert!(one.check_diamond().is_empty());
        let broken = Dfa::from_named(
            al,
            &["q0", "q1", "q2"],
            "q0",
            &["q2"],
            &[("q0", "a", "q1"), ("q1", "d", "q2")],
        )
        .unwrap();
        let v = broken.check_diamond();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, DiamondKind::MissingFirst);
        assert!(broken.ensure_diamond().is_err());
    }

    #[test]
    fn trim_examples() {
        let d = fixtures::fig3();
        assert_eq!(d.trim(), d);
        let al = d.alphabet_arc().clone();
        let extra = Dfa::from_named(
            al.clone(),
            &["q0", "q1", "u", "dead"],
            "q0",
            &["q1", "u"],
            &[("q0", "a", "q1"), ("q0", "b", "dead")],
        )
        .unwrap();
        let t = extra.trim();
        assert_eq!(t.num_states(), 2);
        assert!(t.state("u").is_none());
        assert!(t.state("dead").is_none());
        assert!(t.equivalent(&extra).unwrap().is_none());
        let empty = Dfa::from_named(al, &["q0", "q1"], "q0", &[], &[("q0", "a", "q1")]).unwrap();
        let t = empty.trim();
        assert_eq!(t.num_states(), 1);
        assert!(!t.is_accepting(t.initial()));
        assert_eq!(t.num_transitions(), 0);
    }

    #[test]
    fn completion() {
        let d = fixtures::fig3();
        let c = d.complete_with_sink();
        assert_eq!(c.num_states(), 5);
        assert!(c.is_complete());
        assert_eq!(c.complete_with_sink(), c);
        assert!(c.equivalent(&d).unwrap().is_none());
        let al = d.alphabet_arc().clone();
        let empty = Dfa::from_named(al, &["q"], "q", &[], &[]).unwrap().complete_with_sink();
        assert_eq!(empty.num_states(), 2);
    }

    #[test]
    fn fairness_parameters() {
        assert_eq!(fixtures::fig3().fairness_parameter().unwrap(), Some(4));
        assert_eq!(fixtures::fig1().fairness_parameter().unwrap(), Some(3));
        assert_eq!(fixtures::appendix_g().fairness_parameter().unwrap(), None);
        let d = fixtures::fig3();
        assert!(d.is_k_fair(4).unwrap());
        assert!(!d.is_k_fair(3).unwrap());
        assert!(fixtures::example8(4).unwrap().is_k_fair(3).unwrap());
        assert_eq!(d.is_k_fair(0), Err(DfaError::ZeroK));
    }

    #[test]
    fn fig3_witness_is_dbd() {
        let d = fixtures::fig3();
        let wit = d.unfair_witness(3).unwrap().unwrap();
        assert_eq!(d.alphabet().render_word(&wit.word), "dbd");
        assert_eq!(d.state_name(wit.start), "q1");
        assert_eq!(d.alphabet().process_name(wit.process), "p2");
        let accepted = wit.accepted_word();
        assert!(d.accepts(&accepted));
        let t = Fnf::from_word(d.alphabet(), &accepted);
        assert!(!t.is_k_fair_trace(d.alphabet(), 3).unwrap());
    }

    #[test]
    fn global_single_state_is_one_fair() {
        let al = Arc::new(DistributedAlphabet::from_locs(&[("g", &["p", "q"])]).unwrap());
        let d = Dfa::from_named(al, &["s"], "s", &["s"], &[("s", "g", "s")]).unwrap();
        assert_eq!(d.fairness_parameter().unwrap(), Some(1));
        assert!(d.is_k_fair(1).unwrap());
    }

    #[test]
    fn untrimmed_input_rejected() {
        let d = fixtures::fig3();
        let c = d.complete_with_sink();
        assert!(matches!(c.fairness_parameter(), Err(DfaError::NotTrim(_))));
    }

    #[test]
    fn equivalence_with_counterexample() {
        let d = fixtures::fig3();
        assert!(d.equivalent(&d).unwrap().is_none());
        assert!(d.equivalent(&d.trim()).unwrap().is_none());
        let al = d.alphabet_arc().clone();
        let only_a = Dfa::from_named(al, &["s", "t"], "s", &["t"], &[("s", "a", "t")]).unwrap();
        let cex = d.equivalent(&only_a).unwrap().unwrap();
        assert_eq!(cex.len(), 2);
        assert_ne!(d.accepts(&cex), only_a.accepts(&cex));
        assert_eq!(fixtures::fig1().equivalent(&d), Err(DfaError::AlphabetMismatch));
    }

    #[test]
    fn json_round_trip() {
        let d = fixtures::fig3();
        let text = serde_json::to_string(&d.to_spec_json()).unwrap();
        let spec: SpecJson = serde_json::from_str(&text).unwrap();
        assert_eq!(spec.load().unwrap(), d);
    }

    #[test]
    fn nondeterminism_rejected() {
        let al = Arc::new(fixtures::example1_alphabet());
        let r = Dfa::from_named(al, &["s", "t"], "s", &[], &[("s", "a", "s"), ("s", "a", "t")]);
        assert!(matches!(r, Err(DfaError::Nondeterministic { .. })));
    }

    #[test]
    fn dot_is_deterministic() {
        let d = fixtures::fig1();
        let a = d.to_dot(None);
        assert_eq!(a, d.to_dot(None));
        assert_eq!(a.matches("label=").count() - d.num_states(), d.num_transitions());
    }

    #[test]
    fn matrix_star() {
        let mut m = BitMatrix::new(3);
        m.set(0, 1);
        m.set(1, 2);
        let s = m.star();
        assert!(s.get(0, 2) && s.get(0, 0) && !s.get(2, 0));
    }
}
