//! The fairness-based synthesis: processes keep a DFA state, a counter
//! modulo `2k` and a bounded suffix of their view in Foata normal form.
//! Each letter runs synchronise, expand and cut on its participants.
//!
//! Two unbounded reference automata are exposed for testing: one whose
//! local states are the full views, and one with unbounded counters.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::aa::{AsyncAutomaton, LocalTransitions};
use crate::alphabet::{DistributedAlphabet, LetterId, LetterSet, ProcId};
use crate::dfa::{Dfa, DfaError, StateId};
use crate::traces::Fnf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// The input must be `k`-fair.
    #[default]
    Fair,
    /// Any input; only `k`-fair traces are kept.
    Unfair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CutStrategy {
    /// Keep the shortest suffix holding at least `2k−2` letters.
    #[default]
    Standard,
    /// Additionally drop the leading steps known to every process.
    Optimised,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthesisConfig {
    pub k: usize,
    pub mode: Mode,
    pub cut: CutStrategy,
}

impl SynthesisConfig {
    pub fn new(k: usize) -> Self {
        SynthesisConfig {
            k,
            mode: Mode::Fair,
            cut: CutStrategy::Standard,
        }
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        SynthesisConfig { mode, ..self }
    }

    pub fn with_cut(self, cut: CutStrategy) -> Self {
        SynthesisConfig { cut, ..self }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("fairness parameter must be at least 1")]
    ZeroK,
    #[error("the specification is not {k}-fair (fairness parameter: {parameter}); violating word: {witness}")]
    NotFair {
        k: usize,
        parameter: String,
        witness: String,
    },
    #[error(transparent)]
    Dfa(#[from] DfaError),
}

/// Why a set of local states cannot be synchronised.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyncError {
    #[error("view lengths do not fit in a window of {k} residues")]
    NoValidWindow { k: usize },
    #[error("dropping {alpha} letters does not end on a step boundary")]
    MisalignedCut { alpha: usize },
    #[error("aligned suffixes disagree")]
    DependentUnion,
}

/// A local state `(q, c, φ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalState {
    pub q: StateId,
    pub c: usize,
    pub phi: Fnf,
}

impl LocalState {
    pub fn initial(dfa: &Dfa) -> Self {
        LocalState {
            q: dfa.initial(),
            c: 0,
            phi: Fnf::new(),
        }
    }

    pub fn display<'a>(&'a self, dfa: &'a Dfa) -> LocalStateDisplay<'a> {
        LocalStateDisplay { s: self, dfa }
    }

    pub fn render(&self, dfa: &Dfa) -> String {
        self.display(dfa).to_string()
    }

    /// Parses `(q3, 1, {b}{c,d})`.
    pub fn parse(dfa: &Dfa, text: &str) -> Option<Self> {
        let body = text.trim().strip_prefix('(')?.strip_suffix(')')?;
        let mut parts = body.splitn(3, ',');
        let q = dfa.state(parts.next()?.trim())?;
        let c = parts.next()?.trim().parse().ok()?;
        let phi = Fnf::parse(dfa.alphabet(), parts.next()?.trim()).ok()?;
        Some(LocalState { q, c, phi })
    }
}

pub struct LocalStateDisplay<'a> {
    s: &'a LocalState,
    dfa: &'a Dfa,
}

impl fmt::Display for LocalStateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.dfa.state_name(self.s.q),
            self.s.c,
            self.s.phi.display(self.dfa.alphabet())
        )
    }
}

/// `n · 2k · |Σ|^{3k−3}`, saturating.
pub fn theorem_bound(num_states: usize, k: usize, num_letters: usize) -> u128 {
    let pow = (num_letters as u128).checked_pow(3 * k as u32 - 3).unwrap_or(u128::MAX);
    (num_states as u128).saturating_mul(2 * k as u128).saturating_mul(pow)
}

/// Picks the participant with the most recent counter, modulo `2k`, from
/// `(c_p, |φ_p|)` pairs. Returns its position and, per participant, the
/// number of letters to drop from the front of its suffix.
pub fn elect_counters(k: usize, parts: &[(usize, usize)]) -> Result<(usize, Vec<usize>), SyncError> {
    let m = 2 * k;
    let d: Vec<usize> = parts.iter().map(|(c, len)| (c + len) % m).collect();
    let r = (0..m)
        .find(|r| d.iter().all(|x| (x + m - r) % m < k))
        .ok_or(SyncError::NoValidWindow { k })?;
    // view length and counter relative to the window origin
    let rel_d: Vec<i64> = d.iter().map(|x| ((x + m - r) % m) as i64).collect();
    let rel_c: Vec<i64> = rel_d.iter().zip(parts).map(|(x, (_, len))| x - *len as i64).collect();
    let best = (0..parts.len())
        .max_by(|&i, &j| rel_c[i].cmp(&rel_c[j]).then(rel_d[i].cmp(&rel_d[j])).then(j.cmp(&i)))
        .expect("at least one participant");
    let drops = rel_c.iter().map(|c| (rel_c[best] - c) as usize).collect();
    Ok((best, drops))
}

/// [`elect_counters`] on local states.
pub fn elect(k: usize, states: &[&LocalState]) -> Result<(usize, Vec<usize>), SyncError> {
    let parts: Vec<(usize, usize)> = states.iter().map(|s| (s.c, s.phi.len())).collect();
    elect_counters(k, &parts)
}

/// Participant suffixes aligned on a common counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alignment {
    /// Position of the elected participant.
    pub best: usize,
    /// Each participant's suffix after dropping the old steps.
    pub suffixes: Vec<Fnf>,
    /// Stepwise union of the suffixes.
    pub union: Fnf,
}

/// Aligns `(c_p, φ_p)` pairs on the elected counter.
pub fn align(alpha: &DistributedAlphabet, k: usize, parts: &[(usize, &Fnf)]) -> Result<Alignment, SyncError> {
    let lens: Vec<(usize, usize)> = parts.iter().map(|(c, phi)| (*c, phi.len())).collect();
    let (best, drops) = elect_counters(k, &lens)?;
    let mut union = Fnf::new();
    let mut suffixes = Vec::with_capacity(parts.len());
    for ((_, phi), alpha_p) in parts.iter().zip(drops) {
        let psi = phi
            .drop_prefix_letters(alpha_p)
            .ok_or(SyncError::MisalignedCut { alpha: alpha_p })?;
        union = union.union(alpha, &psi).map_err(|_| SyncError::DependentUnion)?;
        suffixes.push(psi);
    }
    Ok(Alignment { best, suffixes, union })
}

/// Aligns the participants on the elected counter and takes the stepwise
/// union of the aligned suffixes.
pub fn synchronise(alpha: &DistributedAlphabet, k: usize, states: &[&LocalState]) -> Result<LocalState, SyncError> {
    let parts: Vec<(usize, &Fnf)> = states.iter().map(|s| (s.c, &s.phi)).collect();
    let al = align(alpha, k, &parts)?;
    Ok(LocalState {
        q: states[al.best].q,
        c: states[al.best].c,
        phi: al.union,
    })
}

/// Appends `a` to the synchronised suffix.
pub fn expand(alpha: &DistributedAlphabet, s: &LocalState, a: LetterId) -> LocalState {
    let mut phi = s.phi.clone();
    phi.push(alpha, a);
    LocalState { q: s.q, c: s.c, phi }
}

/// Number of leading steps the standard cut removes: all steps before the
/// last one from which at least `2k−2` letters remain, and none when the
/// whole suffix is shorter than that.
pub fn standard_cut_steps(phi: &Fnf, k: usize) -> usize {
    let keep = 2 * k - 2;
    if phi.len() < keep || phi.is_empty() {
        return 0;
    }
    let mut acc = 0;
    for i in (0..phi.foata_len()).rev() {
        acc += phi.steps()[i].len();
        if acc >= keep {
            return i;
        }
    }
    0
}

/// Number of leading steps whose events lie below the last event of every
/// process, or `None` when some process has no event in `phi`. The last
/// step is always kept.
pub fn known_prefix_steps(alpha: &DistributedAlphabet, phi: &Fnf) -> Option<usize> {
    let mut known: Option<Vec<LetterSet>> = None;
    for p in alpha.processes() {
        let (i, a) = phi.max_event(alpha.sigma(p))?;
        let mut seeds = vec![Default::default(); phi.foata_len()];
        seeds[i] = LetterSet::singleton(a);
        let down = phi.downward_closure(alpha, &seeds);
        known = Some(match known {
            None => down,
            Some(k) => k.iter().zip(&down).map(|(x, y)| x.intersection(*y)).collect(),
        });
    }
    let known = known?;
    let full = phi
        .steps()
        .iter()
        .zip(&known)
        .take_while(|(s, k)| s.is_subset(**k))
        .count();
    Some(full.min(phi.foata_len().saturating_sub(1)))
}

/// Drops the first `j` steps, advancing `q` over them; `None` when the DFA
/// run is undefined.
pub fn cut_steps(dfa: &Dfa, k: usize, s: &LocalState, j: usize) -> Option<LocalState> {
    if j == 0 {
        return Some(s.clone());
    }
    let (prefix, rest) = s.phi.split_at_step(j);
    let q = dfa.run_trace(s.q, &prefix)?;
    Some(LocalState {
        q,
        c: (s.c + prefix.len()) % (2 * k),
        phi: rest,
    })
}

/// The standard cut.
pub fn cut(dfa: &Dfa, k: usize, s: &LocalState) -> Option<LocalState> {
    cut_steps(dfa, k, s, standard_cut_steps(&s.phi, k))
}

/// The optimised cut: the standard cut or the known prefix, whichever
/// removes more.
pub fn cut_optimised(dfa: &Dfa, k: usize, s: &LocalState) -> Option<LocalState> {
    let std = standard_cut_steps(&s.phi, k);
    let j = known_prefix_steps(dfa.alphabet(), &s.phi).map_or(std, |o| o.max(std));
    cut_steps(dfa, k, s, j)
}

/// The bounded synthesis as local transitions over `(q, c, φ)`.
#[derive(Clone, Debug)]
pub struct ModSynthesis {
    dfa: Arc<Dfa>,
    config: SynthesisConfig,
}

impl ModSynthesis {
    /// Checks the preconditions: `k ≥ 1`, a trim diamond DFA, and in fair
    /// mode a fairness parameter of at most `k`.
    pub fn new(dfa: Arc<Dfa>, config: SynthesisConfig) -> Result<Self, SynthesisError> {
        if config.k == 0 {
            return Err(SynthesisError::ZeroK);
        }
        dfa.ensure_diamond()?;
        dfa.ensure_trim()?;
        if config.mode == Mode::Fair && !dfa.is_k_fair(config.k)? {
            let parameter = dfa.fairness_parameter()?.map_or("none".to_string(), |p| p.to_string());
            let witness = dfa
                .unfair_witness(config.k)?
                .map(|w| dfa.alphabet().render_word(&w.accepted_word()))
                .unwrap_or_default();
            return Err(SynthesisError::NotFair {
                k: config.k,
                parameter,
                witness,
            });
        }
        Ok(ModSynthesis { dfa, config })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn config(&self) -> SynthesisConfig {
        self.config
    }

    fn cut(&self, s: &LocalState) -> Option<LocalState> {
        match self.config.cut {
            CutStrategy::Standard => cut(&self.dfa, self.config.k, s),
            CutStrategy::Optimised => cut_optimised(&self.dfa, self.config.k, s),
        }
    }

    fn fair_fragment(&self, phi: &Fnf) -> bool {
        let al = self.dfa.alphabet();
        phi.is_k_fair(al, self.config.k).unwrap_or(false)
    }

    /// One joint transition; `None` refuses the letter.
    pub fn transition_state(&self, a: LetterId, states: &[&LocalState]) -> Option<LocalState> {
        let al = self.dfa.alphabet();
        let k = self.config.k;
        let synced = synchronise(al, k, states).ok()?;
        let expanded = expand(al, &synced, a);
        if self.config.mode == Mode::Unfair && !self.fair_fragment(&expanded.phi) {
            return None;
        }
        self.dfa.run_trace(expanded.q, &expanded.phi)?;
        let next = self.cut(&expanded)?;
        debug_assert!(next.phi.len() <= (3 * k).saturating_sub(3).max(k));
        Some(next)
    }

    /// Acceptance of a global state.
    pub fn accepts_state(&self, states: &[&LocalState]) -> bool {
        let al = self.dfa.alphabet();
        let Ok(s) = synchronise(al, self.config.k, states) else {
            return false;
        };
        if self.config.mode == Mode::Unfair && !self.fair_fragment(&s.phi) {
            return false;
        }
        self.dfa
            .run_trace(s.q, &s.phi)
            .is_some_and(|q| self.dfa.is_accepting(q))
    }

    /// Wraps into a lazily explored asynchronous automaton.
    pub fn into_automaton(self) -> AsyncAutomaton<ModSynthesis> {
        AsyncAutomaton::new(self)
    }
}

impl LocalTransitions for ModSynthesis {
    type Local = LocalState;

    fn alphabet(&self) -> &Arc<DistributedAlphabet> {
        self.dfa.alphabet_arc()
    }

    fn initial_local(&self, _p: ProcId) -> LocalState {
        LocalState::initial(&self.dfa)
    }

    fn transition(&mut self, a: LetterId, locals: &[LocalState]) -> Option<Vec<LocalState>> {
        let refs: Vec<&LocalState> = locals.iter().collect();
        let next = self.transition_state(a, &refs)?;
        Some(vec![next; locals.len()])
    }

    fn is_accepting(&mut self, globals: &[LocalState]) -> bool {
        let refs: Vec<&LocalState> = globals.iter().collect();
        self.accepts_state(&refs)
    }

    fn render_local(&self, _p: ProcId, l: &LocalState) -> String {
        l.render(&self.dfa)
    }
}

/// Synthesises the bounded automaton.
pub fn synthesize(dfa: Arc<Dfa>, config: SynthesisConfig) -> Result<AsyncAutomaton<ModSynthesis>, SynthesisError> {
    Ok(ModSynthesis::new(dfa, config)?.into_automaton())
}

/// Reference automaton whose local state is the full view `Φ(view_p(t))`.
#[derive(Clone, Debug)]
pub struct InfiniteReference {
    dfa: Arc<Dfa>,
}

impl InfiniteReference {
    pub fn new(dfa: Arc<Dfa>) -> Self {
        InfiniteReference { dfa }
    }

    pub fn into_automaton(self) -> AsyncAutomaton<InfiniteReference> {
        AsyncAutomaton::new(self)
    }
}

impl LocalTransitions for InfiniteReference {
    type Local = Fnf;

    fn alphabet(&self) -> &Arc<DistributedAlphabet> {
        self.dfa.alphabet_arc()
    }

    fn initial_local(&self, _p: ProcId) -> Fnf {
        Fnf::new()
    }

    fn transition(&mut self, a: LetterId, locals: &[Fnf]) -> Option<Vec<Fnf>> {
        let al = self.dfa.alphabet();
        let mut t = Fnf::new();
        for v in locals {
            t = t.union(al, v).ok()?;
        }
        t.push(al, a);
        Some(vec![t; locals.len()])
    }

    fn is_accepting(&mut self, globals: &[Fnf]) -> bool {
        let al = self.dfa.alphabet();
        let mut t = Fnf::new();
        for v in globals {
            match t.union(al, v) {
                Ok(u) => t = u,
                Err(_) => return false,
            }
        }
        self.dfa
            .run_trace(self.dfa.initial(), &t)
            .is_some_and(|q| self.dfa.is_accepting(q))
    }

    fn render_local(&self, _p: ProcId, l: &Fnf) -> String {
        l.render(self.dfa.alphabet())
    }
}

/// Reference automaton with unbounded counters: the election takes the
/// largest counter and nothing is reduced modulo `2k`.
#[derive(Clone, Debug)]
pub struct CounterReference {
    dfa: Arc<Dfa>,
    k: usize,
}

impl CounterReference {
    pub fn new(dfa: Arc<Dfa>, k: usize) -> Self {
        CounterReference { dfa, k }
    }

    pub fn into_automaton(self) -> AsyncAutomaton<CounterReference> {
        AsyncAutomaton::new(self)
    }

    /// Synchronisation without the modulo: the largest counter wins, ties
    /// going to the longer suffix and then to the first participant.
    pub fn synchronise(&self, states: &[&LocalState]) -> Result<LocalState, SyncError> {
        let al = self.dfa.alphabet();
        let best = (0..states.len())
            .max_by(|&i, &j| {
                states[i]
                    .c
                    .cmp(&states[j].c)
                    .then(states[i].phi.len().cmp(&states[j].phi.len()))
                    .then(j.cmp(&i))
            })
            .expect("at least one participant");
        let top = states[best].c;
        let mut phi = Fnf::new();
        for s in states {
            let drop = top - s.c;
            let psi = s
                .phi
                .drop_prefix_letters(drop)
                .ok_or(SyncError::MisalignedCut { alpha: drop })?;
            phi = phi.union(al, &psi).map_err(|_| SyncError::DependentUnion)?;
        }
        Ok(LocalState {
            q: states[best].q,
            c: top,
            phi,
        })
    }

    /// The standard cut without the modulo.
    pub fn cut(&self, s: &LocalState) -> Option<LocalState> {
        let j = standard_cut_steps(&s.phi, self.k);
        let (prefix, rest) = s.phi.split_at_step(j);
        Some(LocalState {
            q: self.dfa.run_trace(s.q, &prefix)?,
            c: s.c + prefix.len(),
            phi: rest,
        })
    }
}

impl LocalTransitions for CounterReference {
    type Local = LocalState;

    fn alphabet(&self) -> &Arc<DistributedAlphabet> {
        self.dfa.alphabet_arc()
    }

    fn initial_local(&self, _p: ProcId) -> LocalState {
        LocalState::initial(&self.dfa)
    }

    fn transition(&mut self, a: LetterId, locals: &[LocalState]) -> Option<Vec<LocalState>> {
        let refs: Vec<&LocalState> = locals.iter().collect();
        let synced = self.synchronise(&refs).ok()?;
        let expanded = expand(self.dfa.alphabet(), &synced, a);
        self.dfa.run_trace(expanded.q, &expanded.phi)?;
        let next = self.cut(&expanded)?;
        Some(vec![next; locals.len()])
    }

    fn is_accepting(&mut self, globals: &[LocalState]) -> bool {
        let refs: Vec<&LocalState> = globals.iter().collect();
        let Ok(s) = self.synchronise(&refs) else {
            return false;
        };
        self.dfa
            .run_trace(s.q, &s.phi)
            .is_some_and(|q| self.dfa.is_accepting(q))
    }

    fn render_local(&self, _p: ProcId, l: &LocalState) -> String {
        l.render(&self.dfa)
    }
}

/// Whether `{(c_p + |φ_p|) mod 2k}` fits in `k` consecutive residues.
pub fn window_holds(k: usize, states: &[&LocalState]) -> bool {
    elect(k, states).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn fig3() -> Arc<Dfa> {
        Arc::new(fixtures::fig3())
    }

    fn st(d: &Dfa, text: &str) -> LocalState {
        LocalState::parse(d, text).unwrap()
    }

    #[test]
    fn rendering_round_trips() {
        let d = fig3();
        for text in ["(q3, 1, {b}{c,d}{b}{a}{b})", "(q0, 0, {})"] {
            assert_eq!(st(&d, text).render(&d), text);
        }
    }

    #[test]
    fn modulo_synchronise_elects_the_process_ahead() {
        let d = fig3();
        let p1 = st(&d, "(q0, 0, {a}{b}{c,d}{b}{a})");
        let p3 = st(&d, "(q3, 7, {b}{a}{b}{c,d}{b})");
        let s = synchronise(d.alphabet(), 4, &[&p1, &p3]).unwrap();
        assert_eq!(s.render(&d), "(q0, 0, {a}{b}{c,d}{b}{a})");
        let (best, drops) = elect(4, &[&p1, &p3]).unwrap();
        assert_eq!((best, drops), (0, vec![0, 1]));
    }

    #[test]
    fn counter_synchronise_drops_old_steps() {
        let d = fig3();
        let r = CounterReference::new(d.clone(), 4);
        let p1 = st(&d, "(q0, 2, {c,d}{b}{c,d}{b})");
        let p2 = st(&d, "(q0, 0, {a}{b}{c,d}{b}{c})");
        let s = r.synchronise(&[&p1, &p2]).unwrap();
        assert_eq!(s.render(&d), "(q0, 2, {c,d}{b}{c,d}{b})");
    }

    #[test]
    fn single_participant_is_unchanged() {
        let d = fig3();
        let p = st(&d, "(q3, 5, {b}{c,d})");
        assert_eq!(synchronise(d.alphabet(), 4, &[&p]).unwrap(), p);
    }

    #[test]
    fn expand_appends_a_step() {
        let d = fig3();
        let al = d.alphabet();
        let s = st(&d, "(q0, 2, {c,d}{b}{c,d}{b})");
        let e = expand(al, &s, al.letter("a").unwrap());
        assert_eq!(e.render(&d), "(q0, 2, {c,d}{b}{c,d}{b}{a})");
        let e = expand(al, &LocalState::initial(&d), al.letter("a").unwrap());
        assert_eq!(e.render(&d), "(q0, 0, {a})");
    }

    #[test]
    fn cut_examples() {
        let d = fig3();
        let s = st(&d, "(q0, 0, {a}{b}{c,d}{b}{a}{b})");
        assert_eq!(cut(&d, 4, &s).unwrap().render(&d), "(q3, 1, {b}{c,d}{b}{a}{b})");
        let short = st(&d, "(q0, 3, {a}{b})");
        assert_eq!(cut(&d, 4, &short).unwrap(), short);
        let wrap = st(&d, "(q3, 7, {b}{a}{b}{c,d}{b}{a})");
        assert_eq!(cut(&d, 4, &wrap).unwrap().render(&d), "(q0, 0, {a}{b}{c,d}{b}{a})");
    }

    #[test]
    fn optimised_cut_never_keeps_more() {
        let d = fig3();
        for text in [
            "(q0, 0, {a}{b}{c,d}{b}{a}{b})",
            "(q0, 0, {a}{b}{c,d})",
            "(q3, 7, {b}{a}{b}{c,d}{b}{a})",
        ] {
            let s = st(&d, text);
            let o = cut_optimised(&d, 4, &s).unwrap();
            assert!(o.phi.len() <= cut(&d, 4, &s).unwrap().phi.len());
            assert!(!o.phi.is_empty());
        }
    }

    #[test]
    fn known_prefix_needs_every_process() {
        let al = fixtures::fig3_alphabet();
        let t = Fnf::parse(&al, "{a}{b}{c,d}").unwrap();
        assert_eq!(known_prefix_steps(&al, &t), Some(2));
        let t = Fnf::parse(&al, "{d}").unwrap();
        assert_eq!(known_prefix_steps(&al, &t), None);
    }

    #[test]
    fn fair_mode_rejects_small_k() {
        let e = ModSynthesis::new(fig3(), SynthesisConfig::new(3)).unwrap_err();
        assert!(matches!(e, SynthesisError::NotFair { k: 3, .. }));
        let e = ModSynthesis::new(Arc::new(fixtures::appendix_g()), SynthesisConfig::new(5)).unwrap_err();
        assert!(matches!(e, SynthesisError::NotFair { .. }));
        assert_eq!(
            ModSynthesis::new(fig3(), SynthesisConfig::new(0)).unwrap_err(),
            SynthesisError::ZeroK
        );
    }

    #[test]
    fn bound_formula() {
        assert_eq!(theorem_bound(4, 4, 4), 4 * 8 * 4u128.pow(9));
        assert_eq!(theorem_bound(2, 1, 3), 4);
    }

    #[test]
    fn fig3_semantics_is_equivalent() {
        let mut aa = synthesize(fig3(), SynthesisConfig::new(4)).unwrap();
        let sem = aa.global_semantics(crate::aa::DEFAULT_STATE_CAP).unwrap();
        assert_eq!(sem.equivalent(&fig3()).unwrap(), None);
        assert!(sem.check_diamond().is_empty());
        let mut opt = synthesize(fig3(), SynthesisConfig::new(4).with_cut(CutStrategy::Optimised)).unwrap();
        let sem2 = opt.global_semantics(crate::aa::DEFAULT_STATE_CAP).unwrap();
        assert_eq!(sem2.equivalent(&sem).unwrap(), None);
    }
}
