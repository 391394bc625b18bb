//! Asynchronous automata: per-process local states, joint transitions per
//! letter, lazily explored global semantics, and exports.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::hash::Hash;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{AlphabetError, AlphabetJson, DistributedAlphabet, LetterId, ProcId};
use crate::dfa::{Dfa, DfaError, StateId};

/// Default bound on materialised global states.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AaError {
    #[error("letter `{letter}` is refused in this global state")]
    Refused { letter: String },
    #[error("more than {cap} reachable global states")]
    CapExceeded { cap: usize },
    #[error("unknown local state `{state}` of process `{process}`")]
    UnknownLocal { process: String, state: String },
    #[error("duplicate local state `{state}` of process `{process}`")]
    DuplicateLocal { process: String, state: String },
    #[error("transition on `{letter}` lists {got} local states, expected {expected}")]
    Arity {
        letter: String,
        got: usize,
        expected: usize,
    },
    #[error("two transitions on `{letter}` from the same local states")]
    Nondeterministic { letter: String },
    #[error("tuple has {got} local states, expected {expected}")]
    GlobalArity { got: usize, expected: usize },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
}

/// The local behaviour of an asynchronous automaton. Tuples of local
/// states are always given in process order: for `transition` over
/// `loc(a)`, for `is_accepting` over all processes.
pub trait LocalTransitions {
    type Local: Clone + Eq + Hash;

    fn alphabet(&self) -> &Arc<DistributedAlphabet>;
    fn initial_local(&self, p: ProcId) -> Self::Local;
    /// The joint move of the processes in `loc(a)`; `None` refuses `a`.
    fn transition(&mut self, a: LetterId, locals: &[Self::Local]) -> Option<Vec<Self::Local>>;
    fn is_accepting(&mut self, globals: &[Self::Local]) -> bool;
    fn render_local(&self, p: ProcId, l: &Self::Local) -> String;
}

/// A global state: one local-state index per process.
pub type GlobalState = Vec<u32>;

#[derive(Clone, Debug)]
struct LocalTable<L> {
    values: Vec<L>,
    index: HashMap<L, u32>,
}

impl<L: Clone + Eq + Hash> LocalTable<L> {
    fn intern(&mut self, l: L) -> u32 {
        if let Some(i) = self.index.get(&l) {
            return *i;
        }
        let i = self.values.len() as u32;
        self.values.push(l.clone());
        self.index.insert(l, i);
        i
    }
}

/// Outcome of running a word from the initial global state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    /// The last global state reached.
    pub last: GlobalState,
    pub accepted: bool,
    /// Position of the first refused letter, if any.
    pub refused_at: Option<usize>,
}

/// A seeded random walk through the global semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exploration {
    pub word: Vec<LetterId>,
    /// Acceptance after each prefix, starting with the empty one.
    pub accepted: Vec<bool>,
    /// The walk stopped early because every letter was refused.
    pub deadlock: bool,
}

/// An asynchronous automaton with memoised local transitions and
/// acceptance, materialised on the fly.
pub struct AsyncAutomaton<T: LocalTransitions> {
    inner: T,
    alphabet: Arc<DistributedAlphabet>,
    tables: Vec<LocalTable<T::Local>>,
    delta: HashMap<(LetterId, Vec<u32>), Option<Vec<u32>>>,
    accept: HashMap<GlobalState, bool>,
    initial: GlobalState,
}

impl<T: LocalTransitions> AsyncAutomaton<T> {
    pub fn new(inner: T) -> Self {
        let alphabet = inner.alphabet().clone();
        let mut tables: Vec<LocalTable<T::Local>> = (0..alphabet.num_processes())
            .map(|_| LocalTable {
                values: Vec::new(),
                index: HashMap::new(),
            })
            .collect();
        let initial = alphabet
            .processes()
            .map(|p| tables[p.index()].intern(inner.initial_local(p)))
            .collect();
        AsyncAutomaton {
            inner,
            alphabet,
            tables,
            delta: HashMap::new(),
            accept: HashMap::new(),
            initial,
        }
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut T {
        &mut self.inner
    }

    pub fn alphabet(&self) -> &Arc<DistributedAlphabet> {
        &self.alphabet
    }

    pub fn initial(&self) -> GlobalState {
        self.initial.clone()
    }

    pub fn local(&self, p: ProcId, i: u32) -> &T::Local {
        &self.tables[p.index()].values[i as usize]
    }

    /// Local states of `p` discovered so far, in discovery order.
    pub fn locals(&self, p: ProcId) -> &[T::Local] {
        &self.tables[p.index()].values
    }

    /// Number of local states discovered so far, per process.
    pub fn local_counts(&self) -> Vec<usize> {
        self.tables.iter().map(|t| t.values.len()).collect()
    }

    fn apply(&mut self, a: LetterId, key: Vec<u32>) -> Option<Vec<u32>> {
        if let Some(r) = self.delta.get(&(a, key.clone())) {
            return r.clone();
        }
        let procs: Vec<ProcId> = self.alphabet.loc(a).iter().collect();
        let locals: Vec<T::Local> = procs
            .iter()
            .zip(&key)
            .map(|(p, i)| self.tables[p.index()].values[*i as usize].clone())
            .collect();
        let out = self.inner.transition(a, &locals).map(|next| {
            debug_assert_eq!(next.len(), procs.len());
            procs
                .iter()
                .zip(next)
                .map(|(p, l)| self.tables[p.index()].intern(l))
                .collect::<Vec<u32>>()
        });
        self.delta.insert((a, key), out.clone());
        out
    }

    /// The successor of `g` on `a`, or `None` when `a` is refused.
    pub fn try_step(&mut self, g: &[u32], a: LetterId) -> Option<GlobalState> {
        let procs: Vec<ProcId> = self.alphabet.loc(a).iter().collect();
        let key: Vec<u32> = procs.iter().map(|p| g[p.index()]).collect();
        let next = self.apply(a, key)?;
        let mut h = g.to_vec();
        for (p, i) in procs.iter().zip(next) {
            h[p.index()] = i;
        }
        Some(h)
    }

    pub fn step(&mut self, g: &[u32], a: LetterId) -> Result<GlobalState, AaError> {
        self.try_step(g, a).ok_or_else(|| AaError::Refused {
            letter: self.alphabet.letter_name(a).to_string(),
        })
    }

    pub fn is_accepting(&mut self, g: &[u32]) -> bool {
        if let Some(b) = self.accept.get(g) {
            return *b;
        }
        let locals: Vec<T::Local> = g
            .iter()
            .enumerate()
            .map(|(p, i)| self.tables[p].values[*i as usize].clone())
            .collect();
        let b = self.inner.is_accepting(&locals);
        self.accept.insert(g.to_vec(), b);
        b
    }

    /// Runs `w` from the initial state, stopping at the first refusal.
    pub fn run(&mut self, w: &[LetterId]) -> RunResult {
        let mut g = self.initial();
        for (i, a) in w.iter().enumerate() {
            match self.try_step(&g, *a) {
                Some(h) => g = h,
                None => {
                    return RunResult {
                        last: g,
                        accepted: false,
                        refused_at: Some(i),
                    }
                }
            }
        }
        let accepted = self.is_accepting(&g);
        RunResult {
            last: g,
            accepted,
            refused_at: None,
        }
    }

    pub fn render_global(&self, g: &[u32]) -> String {
        let parts: Vec<String> = self
            .alphabet
            .processes()
            .map(|p| self.inner.render_local(p, self.local(p, g[p.index()])))
            .collect();
        format!("[{}]", parts.join(" | "))
    }

    /// Breadth-first exploration of the reachable global states, letters in
    /// order. Returns the states in discovery order and the edges.
    pub fn explore_reachable(
        &mut self,
        cap: usize,
    ) -> Result<(Vec<GlobalState>, Vec<(usize, LetterId, usize)>), AaError> {
        let mut index: HashMap<GlobalState, usize> = HashMap::new();
        let mut states = vec![self.initial()];
        index.insert(self.initial(), 0);
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        let letters: Vec<LetterId> = self.alphabet.letters().collect();
        while let Some(i) = queue.pop_front() {
            let g = states[i].clone();
            self.is_accepting(&g);
            for &a in &letters {
                if let Some(h) = self.try_step(&g, a) {
                    let j = match index.get(&h) {
                        Some(j) => *j,
                        None => {
                            if states.len() >= cap {
                                return Err(AaError::CapExceeded { cap });
                            }
                            states.push(h.clone());
                            index.insert(h, states.len() - 1);
                            queue.push_back(states.len() - 1);
                            states.len() - 1
                        }
                    };
                    edges.push((i, a, j));
                }
            }
        }
        Ok((states, edges))
    }

    /// The reachable part of the global semantics as a DFA whose states are
    /// named by their rendered tuples.
    pub fn global_semantics(&mut self, cap: usize) -> Result<Dfa, AaError> {
        let (states, edges) = self.explore_reachable(cap)?;
        let names = states.iter().map(|g| self.render_global(g)).collect();
        let acc = states.iter().map(|g| self.is_accepting(g)).collect();
        let ts: Vec<(StateId, LetterId, StateId)> = edges
            .into_iter()
            .map(|(i, a, j)| (StateId(i as u32), a, StateId(j as u32)))
            .collect();
        Ok(Dfa::new(self.alphabet.clone(), names, StateId(0), acc, &ts)?)
    }

    /// Reachable local states per process: explores the global semantics
    /// and counts the local states that occur in it.
    pub fn reachable_local_counts(&mut self, cap: usize) -> Result<Vec<usize>, AaError> {
        let (states, _) = self.explore_reachable(cap)?;
        let mut seen: Vec<std::collections::HashSet<u32>> = vec![Default::default(); self.alphabet.num_processes()];
        for g in &states {
            for (p, i) in g.iter().enumerate() {
                seen[p].insert(*i);
            }
        }
        Ok(seen.iter().map(|s| s.len()).collect())
    }

    /// Reachable local states of `p`, rendered and sorted.
    pub fn reachable_locals(&mut self, p: ProcId, cap: usize) -> Result<Vec<String>, AaError> {
        let (states, _) = self.explore_reachable(cap)?;
        let mut idx: Vec<u32> = states.iter().map(|g| g[p.index()]).collect();
        idx.sort_unstable();
        idx.dedup();
        let mut out: Vec<String> = idx
            .iter()
            .map(|i| self.inner.render_local(p, self.local(p, *i)))
            .collect();
        out.sort();
        Ok(out)
    }

    /// A uniform random walk over non-refused letters.
    pub fn random_explore(&mut self, steps: usize, seed: u64) -> Exploration {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let letters: Vec<LetterId> = self.alphabet.letters().collect();
        let mut g = self.initial();
        let mut word = Vec::new();
        let mut accepted = vec![self.is_accepting(&g)];
        for _ in 0..steps {
            let options: Vec<(LetterId, GlobalState)> = letters
                .iter()
                .filter_map(|a| self.try_step(&g, *a).map(|h| (*a, h)))
                .collect();
            let Some((a, h)) = options.choose(&mut rng).cloned() else {
                return Exploration {
                    word,
                    accepted,
                    deadlock: true,
                };
            };
            word.push(a);
            g = h;
            accepted.push(self.is_accepting(&g));
        }
        Exploration {
            word,
            accepted,
            deadlock: false,
        }
    }

    /// Materialises the reachable part and dumps local tables, transitions
    /// and accepting global states.
    pub fn to_json(&mut self, cap: usize) -> Result<AaJson, AaError> {
        let (states, edges) = self.explore_reachable(cap)?;
        let procs: Vec<ProcId> = self.alphabet.processes().collect();
        let mut used: Vec<Vec<u32>> = vec![Vec::new(); procs.len()];
        for g in &states {
            for (p, i) in g.iter().enumerate() {
                used[p].push(*i);
            }
        }
        for u in used.iter_mut() {
            u.sort_unstable();
            u.dedup();
        }
        let acc_flags: Vec<bool> = states.iter().map(|g| self.is_accepting(g)).collect();
        let name = |p: ProcId, i: u32| self.inner.render_local(p, self.local(p, i));
        let mut processes = BTreeMap::new();
        for p in &procs {
            let names = used[p.index()].iter().map(|i| name(*p, *i)).collect();
            processes.insert(self.alphabet.process_name(*p).to_string(), names);
        }
        let render = |g: &[u32], ps: &[ProcId]| -> Vec<String> { ps.iter().map(|p| name(*p, g[p.index()])).collect() };
        let mut transitions = std::collections::BTreeSet::new();
        for (i, a, j) in &edges {
            let loc: Vec<ProcId> = self.alphabet.loc(*a).iter().collect();
            transitions.insert((
                self.alphabet.letter_name(*a).to_string(),
                render(&states[*i], &loc),
                render(&states[*j], &loc),
            ));
        }
        let mut accepting: Vec<Vec<String>> = Vec::new();
        for (g, acc) in states.iter().zip(acc_flags) {
            if acc {
                accepting.push(render(g, &procs));
            }
        }
        accepting.sort();
        Ok(AaJson {
            alphabet: self.alphabet.to_json(),
            processes,
            initial: render(&self.initial, &procs),
            transitions: transitions
                .into_iter()
                .map(|(letter, from, to)| AaTransitionJson { letter, from, to })
                .collect(),
            accepting,
        })
    }

    /// DOT rendering of the reachable global semantics.
    pub fn to_dot(&mut self, cap: usize) -> Result<String, AaError> {
        Ok(self.global_semantics(cap)?.to_dot(None))
    }
}

/// Serialized asynchronous automaton. Local-state tuples list processes in
/// order; a transition lists the processes of `loc(letter)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AaJson {
    pub alphabet: AlphabetJson,
    pub processes: BTreeMap<String, Vec<String>>,
    pub initial: Vec<String>,
    pub transitions: Vec<AaTransitionJson>,
    pub accepting: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AaTransitionJson {
    pub letter: String,
    pub from: Vec<String>,
    pub to: Vec<String>,
}

/// An asynchronous automaton given by explicit tables.
#[derive(Clone, Debug)]
pub struct ExplicitAa {
    alphabet: Arc<DistributedAlphabet>,
    names: Vec<Vec<String>>,
    initial: Vec<u32>,
    delta: HashMap<(LetterId, Vec<u32>), Vec<u32>>,
    accepting: std::collections::HashSet<Vec<u32>>,
}

impl ExplicitAa {
    pub fn from_json(j: &AaJson) -> Result<Self, AaError> {
        let alphabet = Arc::new(DistributedAlphabet::from_json(&j.alphabet)?);
        let names: Vec<Vec<String>> = alphabet
            .processes()
            .map(|p| j.processes.get(alphabet.process_name(p)).cloned().unwrap_or_default())
            .collect();
        let mut index: Vec<HashMap<&str, u32>> = Vec::new();
        for (p, list) in alphabet.processes().zip(&names) {
            let mut map = HashMap::new();
            for (i, s) in list.iter().enumerate() {
                if map.insert(s.as_str(), i as u32).is_some() {
                    return Err(AaError::DuplicateLocal {
                        process: alphabet.process_name(p).to_string(),
                        state: s.clone(),
                    });
                }
            }
            index.push(map);
        }
        let lookup = |p: ProcId, s: &str| -> Result<u32, AaError> {
            index[p.index()].get(s).copied().ok_or_else(|| AaError::UnknownLocal {
                process: alphabet.process_name(p).to_string(),
                state: s.to_string(),
            })
        };
        let tuple = |ps: &[ProcId], ss: &[String]| -> Result<Vec<u32>, AaError> {
            if ps.len() != ss.len() {
                return Err(AaError::GlobalArity {
                    got: ss.len(),
                    expected: ps.len(),
                });
            }
            ps.iter().zip(ss).map(|(p, s)| lookup(*p, s)).collect()
        };
        let all: Vec<ProcId> = alphabet.processes().collect();
        let initial = tuple(&all, &j.initial)?;
        let mut delta = HashMap::new();
        for t in &j.transitions {
            let a = alphabet.letter(&t.letter)?;
            let loc: Vec<ProcId> = alphabet.loc(a).iter().collect();
            for side in [&t.from, &t.to] {
                if side.len() != loc.len() {
                    return Err(AaError::Arity {
                        letter: t.letter.clone(),
                        got: side.len(),
                        expected: loc.len(),
                    });
                }
            }
            let from = tuple(&loc, &t.from)?;
            let to = tuple(&loc, &t.to)?;
            if let Some(old) = delta.insert((a, from), to.clone()) {
                if old != to {
                    return Err(AaError::Nondeterministic {
                        letter: t.letter.clone(),
                    });
                }
            }
        }
        let accepting = j.accepting.iter().map(|g| tuple(&all, g)).collect::<Result<_, _>>()?;
        Ok(ExplicitAa {
            alphabet,
            names,
            initial,
            delta,
            accepting,
        })
    }

    /// Builds from named tables; `transitions` are `(letter, from, to)` over
    /// `loc(letter)` in process order.
    pub fn from_tables(
        alphabet: Arc<DistributedAlphabet>,
        processes: &[(&str, &[&str])],
        initial: &[&str],
        transitions: &[(&str, &[&str], &[&str])],
        accepting: &[&[&str]],
    ) -> Result<Self, AaError> {
        let strs = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let j = AaJson {
            alphabet: alphabet.to_json(),
            processes: processes.iter().map(|(p, ss)| (p.to_string(), strs(ss))).collect(),
            initial: strs(initial),
            transitions: transitions
                .iter()
                .map(|(a, f, t)| AaTransitionJson {
                    letter: a.to_string(),
                    from: strs(f),
                    to: strs(t),
                })
                .collect(),
            accepting: accepting.iter().map(|g| strs(g)).collect(),
        };
        Self::from_json(&j)
    }
}

impl LocalTransitions for ExplicitAa {
    type Local = u32;

    fn alphabet(&self) -> &Arc<DistributedAlphabet> {
        &self.alphabet
    }

    fn initial_local(&self, p: ProcId) -> u32 {
        self.initial[p.index()]
    }

    fn transition(&mut self, a: LetterId, locals: &[u32]) -> Option<Vec<u32>> {
        self.delta.get(&(a, locals.to_vec())).cloned()
    }

    fn is_accepting(&mut self, globals: &[u32]) -> bool {
        self.accepting.contains(globals)
    }

    fn render_local(&self, p: ProcId, l: &u32) -> String {
        self.names[p.index()][*l as usize].clone()
    }
}
