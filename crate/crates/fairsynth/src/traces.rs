//! Mazurkiewicz traces in Foata normal form.
//!
//! A trace is stored as its sequence of maximal steps. Each step is a set of
//! pairwise independent letters, kept as a bitset so equal traces compare and
//! hash structurally. Events are addressed as `(step index, letter)`, which is
//! unambiguous because a letter occurs at most once per step.
//!
//! Besides the normal form itself this module provides views (downward
//! closures of the last events of a set of processes), the measure `f`, and
//! two independent ways of deciding k-fairness: a brute-force oracle that
//! enumerates linearisations, and an ideal-based check used by synthesis.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::alphabet::{DistributedAlphabet, LetterId, LetterSet, ProcSet};

/// Default bound on the number of linearisations enumerated by the oracle.
pub const DEFAULT_LINEARISATION_CAP: usize = 1_000_000;

/// Largest trace handled by the ideal-based fairness check.
pub const MAX_FAST_EVENTS: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("step {step} of the union contains dependent letters")]
    DependentUnion { step: usize },
    #[error("step {step} is empty or contains dependent letters")]
    InvalidStep { step: usize },
    #[error("step {step} is not maximal: a letter could move to an earlier step")]
    NotMaximal { step: usize },
    #[error("more than {cap} linearisations")]
    CapExceeded { cap: usize },
    #[error("trace has {len} letters, fewer than {ell}")]
    TooShort { len: usize, ell: usize },
    #[error("fairness parameter must be at least 1")]
    ZeroK,
    #[error("trace has more than {MAX_FAST_EVENTS} events")]
    TooManyEvents,
    #[error("invalid partial order: {0}")]
    InvalidOrder(String),
    #[error("cannot parse normal form `{0}`")]
    Parse(String),
    #[error(transparent)]
    Alphabet(#[from] crate::alphabet::AlphabetError),
}

/// A trace in Foata normal form. Steps are non-empty; the empty sequence is
/// the empty trace.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fnf {
    steps: Vec<LetterSet>,
}

impl Fnf {
    pub fn new() -> Self {
        Fnf { steps: Vec::new() }
    }

    /// Builds the normal form of `[w]` by left-to-right insertion.
    pub fn from_word(alpha: &DistributedAlphabet, w: &[LetterId]) -> Self {
        let mut t = Fnf::new();
        for &a in w {
            t.push(alpha, a);
        }
        t
    }

    /// Parses and normalises a word given as text.
    pub fn from_text_word(alpha: &DistributedAlphabet, w: &str) -> Result<Self, TraceError> {
        Ok(Self::from_word(alpha, &alpha.parse_word(w)?))
    }

    /// Checks that `steps` is already a Foata normal form.
    pub fn from_steps(alpha: &DistributedAlphabet, steps: Vec<LetterSet>) -> Result<Self, TraceError> {
        for (i, s) in steps.iter().enumerate() {
            if s.is_empty() || !is_step(alpha, *s) {
                return Err(TraceError::InvalidStep { step: i + 1 });
            }
            if i > 0 {
                let prev_dep = alpha.dependent_on_any(steps[i - 1]);
                if !s.is_subset(prev_dep) {
                    return Err(TraceError::NotMaximal { step: i + 1 });
                }
            }
        }
        Ok(Fnf { steps })
    }

    /// Parses the textual rendering `{a}{b,c}`; `{}` and the empty string
    /// denote the empty trace.
    pub fn parse(alpha: &DistributedAlphabet, text: &str) -> Result<Self, TraceError> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() || text == "{}" {
            return Ok(Fnf::new());
        }
        let err = || TraceError::Parse(text.clone());
        let mut steps = Vec::new();
        let mut rest = text.as_str();
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(err)?;
            let end = body.find('}').ok_or_else(err)?;
            let mut s = LetterSet::EMPTY;
            for name in body[..end].split(',') {
                s.insert(alpha.letter(name)?);
            }
            steps.push(s);
            rest = &body[end + 1..];
        }
        Self::from_steps(alpha, steps)
    }

    /// Appends one letter: it joins the step right after the last step that
    /// holds a letter dependent on it.
    pub fn push(&mut self, alpha: &DistributedAlphabet, a: LetterId) {
        let dep = alpha.dependent_on(a);
        let j = self.steps.iter().rposition(|s| s.intersects(dep)).map_or(0, |i| i + 1);
        if j == self.steps.len() {
            self.steps.push(LetterSet::singleton(a));
        } else {
            self.steps[j].insert(a);
        }
    }

    /// Appends `{a}` as a new last step. The caller guarantees that `a`
    /// depends on some letter of the current last step.
    pub fn push_step(&mut self, a: LetterId) {
        self.steps.push(LetterSet::singleton(a));
    }

    pub fn steps(&self) -> &[LetterSet] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of letters `|t|`.
    pub fn len(&self) -> usize {
        self.steps.iter().map(|s| s.len()).sum()
    }

    /// Number of steps `‖t‖`.
    pub fn foata_len(&self) -> usize {
        self.steps.len()
    }

    /// Events as `(step index, letter)`, steps in order, letters ascending.
    pub fn events(&self) -> impl Iterator<Item = (usize, LetterId)> + '_ {
        self.steps
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |a| (i, a)))
    }

    /// The canonical linearisation: steps in order, letters ascending.
    pub fn canonical_word(&self) -> Vec<LetterId> {
        self.events().map(|(_, a)| a).collect()
    }

    pub fn display<'a>(&'a self, alpha: &'a DistributedAlphabet) -> FnfDisplay<'a> {
        FnfDisplay { fnf: self, alpha }
    }

    pub fn render(&self, alpha: &DistributedAlphabet) -> String {
        self.display(alpha).to_string()
    }

    /// Stepwise union of two normal forms of views of one trace.
    pub fn union(&self, alpha: &DistributedAlphabet, other: &Fnf) -> Result<Fnf, TraceError> {
        let n = self.steps.len().max(other.steps.len());
        let mut steps = Vec::with_capacity(n);
        for i in 0..n {
            let x = self.steps.get(i).copied().unwrap_or_default();
            let y = other.steps.get(i).copied().unwrap_or_default();
            let s = x.union(y);
            if !is_step(alpha, s) {
                return Err(TraceError::DependentUnion { step: i + 1 });
            }
            steps.push(s);
        }
        while steps.last().is_some_and(|s| s.is_empty()) {
            steps.pop();
        }
        Ok(Fnf { steps })
    }

    /// The trace `self · other`.
    pub fn concat(&self, alpha: &DistributedAlphabet, other: &Fnf) -> Fnf {
        let mut t = self.clone();
        for a in other.canonical_word() {
            t.push(alpha, a);
        }
        t
    }

    /// Deletes every event whose letter is outside `sub` and renormalises.
    pub fn restrict(&self, alpha: &DistributedAlphabet, sub: LetterSet) -> Fnf {
        let w: Vec<LetterId> = self.canonical_word().into_iter().filter(|a| sub.contains(*a)).collect();
        Fnf::from_word(alpha, &w)
    }

    /// The sub-trace formed by the events selected per step. Exact (the
    /// induced order) whenever the selection is an ideal or an upward-closed
    /// set.
    pub fn select(&self, alpha: &DistributedAlphabet, masks: &[LetterSet]) -> Fnf {
        let mut t = Fnf::new();
        for (i, s) in self.steps.iter().enumerate() {
            let m = masks.get(i).copied().unwrap_or_default();
            for a in s.intersection(m).iter() {
                t.push(alpha, a);
            }
        }
        t
    }

    /// The events not in `masks`, as a trace. Exact when `masks` is an ideal.
    pub fn remove(&self, alpha: &DistributedAlphabet, masks: &[LetterSet]) -> Fnf {
        let comp: Vec<LetterSet> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| s.difference(masks.get(i).copied().unwrap_or_default()))
            .collect();
        self.select(alpha, &comp)
    }

    /// Splits after the first `j` steps.
    pub fn split_at_step(&self, j: usize) -> (Fnf, Fnf) {
        let (a, b) = self.steps.split_at(j.min(self.steps.len()));
        (Fnf { steps: a.to_vec() }, Fnf { steps: b.to_vec() })
    }

    /// Drops whole leading steps totalling exactly `n` letters; `None` when
    /// `n` does not fall on a step boundary.
    pub fn drop_prefix_letters(&self, n: usize) -> Option<Fnf> {
        let mut acc = 0;
        let mut j = 0;
        while acc < n {
            acc += self.steps.get(j)?.len();
            j += 1;
        }
        (acc == n).then(|| Fnf {
            steps: self.steps[j..].to_vec(),
        })
    }

    /// `f(t, ℓ)`: the largest 1-based index `i` such that steps `i..m` hold
    /// at least `ℓ` letters.
    pub fn f_measure(&self, ell: usize) -> Result<usize, TraceError> {
        let len = self.len();
        if ell == 0 || len < ell {
            return Err(TraceError::TooShort { len, ell });
        }
        let mut acc = 0;
        for i in (0..self.steps.len()).rev() {
            acc += self.steps[i].len();
            if acc >= ell {
                return Ok(i + 1);
            }
        }
        unreachable!("total length checked above")
    }

    /// `max_p(t)` for every `p ∈ x`, as per-step seed masks.
    fn last_event_seeds(&self, alpha: &DistributedAlphabet, x: ProcSet) -> Vec<LetterSet> {
        let mut seeds = vec![LetterSet::EMPTY; self.steps.len()];
        for p in x.iter() {
            if let Some((i, a)) = self.max_event(alpha.sigma(p)) {
                seeds[i].insert(a);
            }
        }
        seeds
    }

    /// The last event labelled in `sigma`, as `(step index, letter)`. With
    /// `sigma = Σ_p` this is `max_p(t)`; the letters of `Σ_p` are pairwise
    /// dependent, so the last step meeting `sigma` holds exactly one of them.
    pub fn max_event(&self, sigma: LetterSet) -> Option<(usize, LetterId)> {
        let i = self.steps.iter().rposition(|s| s.intersects(sigma))?;
        let a = self.steps[i].intersection(sigma).iter().next()?;
        Some((i, a))
    }

    /// The downward closure of the seeded events, as per-step masks.
    pub fn downward_closure(&self, alpha: &DistributedAlphabet, seeds: &[LetterSet]) -> Vec<LetterSet> {
        let mut out = vec![LetterSet::EMPTY; self.steps.len()];
        let mut need = LetterSet::EMPTY;
        for i in (0..self.steps.len()).rev() {
            let here = self.steps[i].intersection(seeds.get(i).copied().unwrap_or_default().union(need));
            out[i] = here;
            need = need.union(alpha.dependent_on_any(here));
        }
        out
    }

    /// `view_X(t)`: the ideal generated by the last events of the processes
    /// in `x`.
    pub fn view(&self, alpha: &DistributedAlphabet, x: ProcSet) -> Fnf {
        let seeds = self.last_event_seeds(alpha, x);
        let ideal = self.downward_closure(alpha, &seeds);
        Fnf::from_ideal_masks(&ideal)
    }

    /// An ideal keeps the step indices of its events, so its normal form is
    /// the per-step restriction.
    fn from_ideal_masks(masks: &[LetterSet]) -> Fnf {
        let mut steps: Vec<LetterSet> = masks.to_vec();
        while steps.last().is_some_and(|s| s.is_empty()) {
            steps.pop();
        }
        debug_assert!(steps.iter().all(|s| !s.is_empty()), "ideal with a gap");
        Fnf { steps }
    }

    /// The ideal generated by explicit events.
    pub fn ideal_of(&self, alpha: &DistributedAlphabet, events: &[(usize, LetterId)]) -> Fnf {
        let mut seeds = vec![LetterSet::EMPTY; self.steps.len()];
        for &(i, a) in events {
            seeds[i].insert(a);
        }
        Fnf::from_ideal_masks(&self.downward_closure(alpha, &seeds))
    }

    /// All linearisations, failing beyond `cap`.
    pub fn linearisations(&self, alpha: &DistributedAlphabet, cap: usize) -> Result<Vec<Vec<LetterId>>, TraceError> {
        let events: Vec<(usize, LetterId)> = self.events().collect();
        let n = events.len();
        let preds: Vec<Vec<usize>> = (0..n)
            .map(|e| {
                (0..n)
                    .filter(|&f| events[f].0 < events[e].0 && !alpha.independent(events[f].1, events[e].1))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut placed = vec![false; n];
        let mut word = Vec::with_capacity(n);
        fn go(
            events: &[(usize, LetterId)],
            preds: &[Vec<usize>],
            placed: &mut [bool],
            word: &mut Vec<LetterId>,
            out: &mut Vec<Vec<LetterId>>,
            cap: usize,
        ) -> Result<(), TraceError> {
            if word.len() == events.len() {
                if out.len() == cap {
                    return Err(TraceError::CapExceeded { cap });
                }
                out.push(word.clone());
                return Ok(());
            }
            for e in 0..events.len() {
                if !placed[e] && preds[e].iter().all(|&f| placed[f]) {
                    placed[e] = true;
                    word.push(events[e].1);
                    go(events, preds, placed, word, out, cap)?;
                    word.pop();
                    placed[e] = false;
                }
            }
            Ok(())
        }
        go(&events, &preds, &mut placed, &mut word, &mut out, cap)?;
        Ok(out)
    }

    /// Oracle: every length-`k` window of every linearisation involves all
    /// processes.
    pub fn is_k_fair_trace(&self, alpha: &DistributedAlphabet, k: usize) -> Result<bool, TraceError> {
        self.is_k_fair_trace_wrt(alpha, k, alpha.all_processes())
    }

    /// Oracle variant where windows must involve every process of `procs`.
    pub fn is_k_fair_trace_wrt(
        &self,
        alpha: &DistributedAlphabet,
        k: usize,
        procs: ProcSet,
    ) -> Result<bool, TraceError> {
        if k == 0 {
            return Err(TraceError::ZeroK);
        }
        if self.len() < k {
            return Ok(true);
        }
        for w in self.linearisations(alpha, DEFAULT_LINEARISATION_CAP)? {
            for win in w.windows(k) {
                if !procs.is_subset(alpha.loc_of_word(win)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The size of the largest convex set of events that avoids some process
    /// of `procs`. A trace is k-fair with respect to `procs` iff this is
    /// below `k`: convex sets are exactly the factors of linearisations.
    pub fn longest_starving_factor(&self, alpha: &DistributedAlphabet, procs: ProcSet) -> Result<usize, TraceError> {
        let events: Vec<(usize, LetterId)> = self.events().collect();
        let n = events.len();
        if n > MAX_FAST_EVENTS {
            return Err(TraceError::TooManyEvents);
        }
        if n == 0 {
            return Ok(0);
        }
        let bit = |e: usize| 1u128 << e;
        let mut below = vec![0u128; n];
        for e in 0..n {
            for f in 0..e {
                if events[f].0 < events[e].0 && !alpha.independent(events[f].1, events[e].1) {
                    below[e] |= bit(f) | below[f];
                }
            }
        }
        let avoiders: Vec<u128> = procs
            .iter()
            .map(|r| {
                let mut m = 0u128;
                for (e, (_, a)) in events.iter().enumerate() {
                    if alpha.loc(*a).contains(r) {
                        m |= bit(e);
                    }
                }
                m
            })
            .collect();
        let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
        let mut best = 0usize;
        let mut seen = HashSet::new();
        let mut stack = vec![0u128];
        seen.insert(0u128);
        while let Some(ideal) = stack.pop() {
            for &r_events in &avoiders {
                let mut ext = 0u128;
                for e in 0..n {
                    if ideal & bit(e) == 0 && r_events & bit(e) == 0 && below[e] & !ideal & r_events == 0 {
                        ext |= bit(e);
                    }
                }
                best = best.max(ext.count_ones() as usize);
            }
            if best == n {
                return Ok(n);
            }
            for e in 0..n {
                if ideal & bit(e) == 0 && below[e] & !ideal == 0 {
                    let next = ideal | bit(e);
                    if next != full && seen.insert(next) {
                        stack.push(next);
                    }
                }
            }
        }
        Ok(best)
    }

    /// Fast k-fairness with respect to `procs`.
    pub fn is_k_fair_wrt(&self, alpha: &DistributedAlphabet, k: usize, procs: ProcSet) -> Result<bool, TraceError> {
        if k == 0 {
            return Err(TraceError::ZeroK);
        }
        if self.len() < k {
            return Ok(true);
        }
        Ok(self.longest_starving_factor(alpha, procs)? < k)
    }

    /// Fast k-fairness with respect to all processes.
    pub fn is_k_fair(&self, alpha: &DistributedAlphabet, k: usize) -> Result<bool, TraceError> {
        self.is_k_fair_wrt(alpha, k, alpha.all_processes())
    }

    /// The least `k` for which the trace is k-fair; `None` when some process
    /// never appears (no window length works) or the trace is too large.
    pub fn fairness_of(&self, alpha: &DistributedAlphabet) -> Option<usize> {
        if self.is_empty() {
            return Some(1);
        }
        let starving = self.longest_starving_factor(alpha, alpha.all_processes()).ok()?;
        (starving < self.len()).then_some(starving + 1)
    }

    pub fn to_partial_order(&self, alpha: &DistributedAlphabet) -> PartialOrderTrace {
        PartialOrderTrace::from_fnf(alpha, self)
    }
}

fn is_step(alpha: &DistributedAlphabet, s: LetterSet) -> bool {
    let mut seen = crate::alphabet::ProcSet::EMPTY;
    for a in s.iter() {
        if seen.intersects(alpha.loc(a)) {
            return false;
        }
        seen = seen.union(alpha.loc(a));
    }
    true
}

pub struct FnfDisplay<'a> {
    fnf: &'a Fnf,
    alpha: &'a DistributedAlphabet,
}

impl fmt::Display for FnfDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fnf.steps.is_empty() {
            return f.write_str("{}");
        }
        for s in &self.fnf.steps {
            f.write_str("{")?;
            for (i, a) in s.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                f.write_str(self.alpha.letter_name(a))?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// A trace as a labelled partial order. `less[e][f]` holds iff `e < f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrderTrace {
    pub labels: Vec<LetterId>,
    pub less: Vec<Vec<bool>>,
}

impl PartialOrderTrace {
    /// The covering pairs `e ⋖ f`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.labels.len();
        let mut out = Vec::new();
        for e in 0..n {
            for f in 0..n {
                if self.less[e][f] && !(0..n).any(|g| self.less[e][g] && self.less[g][f]) {
                    out.push((e, f));
                }
            }
        }
        out
    }

    /// Builds the order of a normal form: events ordered by step, and `e < f`
    /// iff a chain of dependent events leads from `e` to `f`.
    pub fn from_fnf(alpha: &DistributedAlphabet, t: &Fnf) -> Self {
        let events: Vec<(usize, LetterId)> = t.events().collect();
        let n = events.len();
        let mut less = vec![vec![false; n]; n];
        for f in 0..n {
            for e in 0..f {
                if events[e].0 < events[f].0 && !alpha.independent(events[e].1, events[f].1) {
                    less[e][f] = true;
                    for g in 0..e {
                        if less[g][e] {
                            less[g][f] = true;
                        }
                    }
                }
            }
        }
        PartialOrderTrace {
            labels: events.iter().map(|e| e.1).collect(),
            less,
        }
    }

    /// Validates the order and the two trace axioms, then recovers the
    /// normal form by levels.
    pub fn to_fnf(&self, alpha: &DistributedAlphabet) -> Result<Fnf, TraceError> {
        let n = self.labels.len();
        if self.less.len() != n || self.less.iter().any(|r| r.len() != n) {
            return Err(TraceError::InvalidOrder("matrix size mismatch".into()));
        }
        for e in 0..n {
            if self.less[e][e] {
                return Err(TraceError::InvalidOrder(format!("event {e} below itself")));
            }
            for f in 0..n {
                for g in 0..n {
                    if self.less[e][f] && self.less[f][g] && !self.less[e][g] {
                        return Err(TraceError::InvalidOrder("not transitive".into()));
                    }
                }
                if e != f && !alpha.independent(self.labels[e], self.labels[f]) && !self.less[e][f] && !self.less[f][e]
                {
                    return Err(TraceError::InvalidOrder(format!(
                        "dependent events {e} and {f} are incomparable"
                    )));
                }
            }
        }
        for (e, f) in self.covers() {
            if alpha.independent(self.labels[e], self.labels[f]) {
                return Err(TraceError::InvalidOrder(format!(
                    "covering pair {e} < {f} has independent labels"
                )));
            }
        }
        let mut level = vec![0usize; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&e| (0..n).filter(|&f| self.less[f][e]).count());
        for &e in &order {
            level[e] = (0..n)
                .filter(|&f| self.less[f][e])
                .map(|f| level[f] + 1)
                .max()
                .unwrap_or(0);
        }
        let depth = level.iter().map(|l| l + 1).max().unwrap_or(0);
        let mut steps = vec![LetterSet::EMPTY; depth];
        for e in 0..n {
            if steps[level[e]].contains(self.labels[e]) {
                return Err(TraceError::InvalidOrder("repeated letter in one level".into()));
            }
            steps[level[e]].insert(self.labels[e]);
        }
        Fnf::from_steps(alpha, steps)
    }
}
