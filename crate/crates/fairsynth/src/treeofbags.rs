//! Tree-of-bags architectures: processes are partitioned into bags, each
//! bag has one outer process, outer processes communicate along a tree and
//! inner processes only within their bag.
//!
//! Inner processes run the bounded fairness construction on the letters of
//! their bag. Outer processes also keep the pair `(q̄, q)` of DFA states
//! reached on their joint view with the parent and on their own view.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aa::{AsyncAutomaton, LocalTransitions};
use crate::alphabet::{DistributedAlphabet, LetterId, LetterSet, ProcId, ProcSet};
use crate::dfa::{BitMatrix, Dfa, DfaError, StateId};
use crate::synthesis::{align, standard_cut_steps};
use crate::traces::Fnf;

/// Serialized architecture.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeOfBags {
    pub bags: BTreeMap<String, Vec<String>>,
    pub outer: BTreeMap<String, String>,
    #[serde(default)]
    pub parent: BTreeMap<String, String>,
}

impl TreeOfBags {
    /// Builds from `(bag, processes, outer)` triples and `(child, parent)`
    /// outer pairs.
    pub fn new(bags: &[(&str, &[&str], &str)], parent: &[(&str, &str)]) -> Self {
        TreeOfBags {
            bags: bags
                .iter()
                .map(|(b, ps, _)| (b.to_string(), ps.iter().map(|p| p.to_string()).collect()))
                .collect(),
            outer: bags.iter().map(|(b, _, o)| (b.to_string(), o.to_string())).collect(),
            parent: parent.iter().map(|(c, p)| (c.to_string(), p.to_string())).collect(),
        }
    }

    /// One bag holding every process.
    pub fn single_bag(alpha: &DistributedAlphabet, outer: &str) -> Self {
        let all: Vec<String> = alpha.processes().map(|p| alpha.process_name(p).to_string()).collect();
        TreeOfBags {
            bags: BTreeMap::from([("B".to_string(), all)]),
            outer: BTreeMap::from([("B".to_string(), outer.to_string())]),
            parent: BTreeMap::new(),
        }
    }
}

/// One reason an architecture is rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownProcess(String),
    /// A process lies in no bag or in several.
    NotPartition(String),
    EmptyBag(String),
    OuterMissing(String),
    OuterNotInBag {
        bag: String,
        outer: String,
    },
    /// A parent entry names a process that is not outer.
    ParentNotOuter(String),
    /// Zero or several outer processes without parent.
    RootCount(usize),
    /// The parent relation has a cycle through this process.
    ParentCycle(String),
    /// An edge between outer processes that is not a parent edge, or the
    /// reverse.
    OuterEdgeMismatch {
        p: String,
        q: String,
    },
    /// An inner process communicates outside its bag.
    InnerCrossEdge {
        inner: String,
        other: String,
    },
    /// A letter neither inside one bag nor between an outer process and its
    /// parent.
    UnsupportedLetter(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownProcess(p) => write!(f, "unknown process `{p}`"),
            Violation::NotPartition(p) => write!(f, "process `{p}` is not in exactly one bag"),
            Violation::EmptyBag(b) => write!(f, "bag `{b}` is empty"),
            Violation::OuterMissing(b) => write!(f, "bag `{b}` has no outer process"),
            Violation::OuterNotInBag { bag, outer } => write!(f, "outer process `{outer}` is not in bag `{bag}`"),
            Violation::ParentNotOuter(p) => write!(f, "parent entry `{p}` is not an outer process"),
            Violation::RootCount(n) => write!(f, "{n} outer processes have no parent, expected 1"),
            Violation::ParentCycle(p) => write!(f, "parent relation cycles through `{p}`"),
            Violation::OuterEdgeMismatch { p, q } => {
                write!(
                    f,
                    "communication between outer `{p}` and `{q}` does not match the parent tree"
                )
            }
            Violation::InnerCrossEdge { inner, other } => {
                write!(f, "inner process `{inner}` communicates with `{other}` outside its bag")
            }
            Violation::UnsupportedLetter(a) => {
                write!(
                    f,
                    "letter `{a}` is neither bag-internal nor between an outer process and its parent"
                )
            }
        }
    }
}

/// How a letter is handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LetterClass {
    /// `loc(a)` lies inside this bag.
    Internal(usize),
    /// `loc(a) = {o(child), parent(o(child))}`.
    OuterPair { child: usize },
}

/// A validated architecture with indices. Bags are numbered in name order.
#[derive(Clone, Debug)]
pub struct Architecture {
    pub names: Vec<String>,
    pub procs: Vec<ProcSet>,
    pub outer: Vec<ProcId>,
    pub bag_of: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Children in name order.
    pub children: Vec<Vec<usize>>,
    pub root: usize,
    /// Processes of the bag and of every bag below it.
    pub subtree: Vec<ProcSet>,
    /// `Σin(B)`.
    pub sigma_in: Vec<LetterSet>,
    pub class: Vec<LetterClass>,
}

impl Architecture {
    pub fn num_bags(&self) -> usize {
        self.names.len()
    }

    pub fn is_outer(&self, p: ProcId) -> bool {
        self.outer[self.bag_of[p.index()]] == p
    }

    pub fn bag(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Letters between the outer process of `bag` and its parent.
    pub fn parent_letters(&self, bag: usize) -> LetterSet {
        self.class
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == LetterClass::OuterPair { child: bag })
            .map(|(a, _)| LetterId(a as u8))
            .collect()
    }
}

/// Checks the architecture conditions and classifies the letters. The list
/// is empty iff the architecture is usable.
pub fn validate_architecture(alpha: &DistributedAlphabet, tob: &TreeOfBags) -> Vec<Violation> {
    match resolve(alpha, tob) {
        Ok(_) => Vec::new(),
        Err(v) => v,
    }
}

/// Validates and indexes an architecture.
pub fn resolve(alpha: &DistributedAlphabet, tob: &TreeOfBags) -> Result<Architecture, Vec<Violation>> {
    let mut out = Vec::new();
    let names: Vec<String> = tob.bags.keys().cloned().collect();
    let nb = names.len();
    let mut procs = vec![ProcSet::EMPTY; nb];
    let mut count = vec![0usize; alpha.num_processes()];
    let mut bag_of = vec![usize::MAX; alpha.num_processes()];
    for (b, members) in tob.bags.values().enumerate() {
        if members.is_empty() {
            out.push(Violation::EmptyBag(names[b].clone()));
        }
        for m in members {
            match alpha.process(m) {
                Some(p) => {
                    count[p.index()] += 1;
                    bag_of[p.index()] = b;
                    procs[b].insert(p);
                }
                None => out.push(Violation::UnknownProcess(m.clone())),
            }
        }
    }
    for p in alpha.processes() {
        if count[p.index()] != 1 {
            out.push(Violation::NotPartition(alpha.process_name(p).to_string()));
        }
    }
    let mut outer = vec![ProcId(0); nb];
    for (b, name) in names.iter().enumerate() {
        match tob.outer.get(name).map(|o| (o, alpha.process(o))) {
            None => out.push(Violation::OuterMissing(name.clone())),
            Some((o, None)) => out.push(Violation::UnknownProcess(o.clone())),
            Some((o, Some(p))) => {
                if !procs[b].contains(p) {
                    out.push(Violation::OuterNotInBag {
                        bag: name.clone(),
                        outer: o.clone(),
                    });
                }
                outer[b] = p;
            }
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let bag_of_outer = |name: &str| -> Option<usize> {
        let p = alpha.process(name)?;
        (0..nb).find(|b| outer[*b] == p)
    };
    let mut parent = vec![None; nb];
    for (child, par) in &tob.parent {
        match (bag_of_outer(child), bag_of_outer(par)) {
            (Some(c), Some(p)) => parent[c] = Some(p),
            (None, _) => out.push(Violation::ParentNotOuter(child.clone())),
            (_, None) => out.push(Violation::ParentNotOuter(par.clone())),
        }
    }
    let roots: Vec<usize> = (0..nb).filter(|b| parent[*b].is_none()).collect();
    if roots.len() != 1 {
        out.push(Violation::RootCount(roots.len()));
    }
    for b in 0..nb {
        let mut cur = b;
        for _ in 0..=nb {
            match parent[cur] {
                Some(p) => cur = p,
                None => break,
            }
        }
        if parent[cur].is_some() {
            out.push(Violation::ParentCycle(alpha.process_name(outer[b]).to_string()));
        }
    }
    let pname = |p: ProcId| alpha.process_name(p).to_string();
    for (p, q) in alpha.communication_graph() {
        let (bp, bq) = (bag_of[p.index()], bag_of[q.index()]);
        let p_outer = outer[bp] == p;
        let q_outer = outer[bq] == q;
        if !p_outer && bp != bq {
            out.push(Violation::InnerCrossEdge {
                inner: pname(p),
                other: pname(q),
            });
        }
        if !q_outer && bp != bq {
            out.push(Violation::InnerCrossEdge {
                inner: pname(q),
                other: pname(p),
            });
        }
        if p_outer && q_outer && parent[bp] != Some(bq) && parent[bq] != Some(bp) {
            out.push(Violation::OuterEdgeMismatch {
                p: pname(p),
                q: pname(q),
            });
        }
    }
    let graph = alpha.communication_graph();
    for (c, par) in parent.iter().enumerate() {
        if let Some(par) = par {
            let (x, y) = (outer[c].min(outer[*par]), outer[c].max(outer[*par]));
            if !graph.contains(&(x, y)) {
                out.push(Violation::OuterEdgeMismatch {
                    p: pname(outer[c]),
                    q: pname(outer[*par]),
                });
            }
        }
    }
    let mut class = Vec::with_capacity(alpha.num_letters());
    for a in alpha.letters() {
        let loc = alpha.loc(a);
        if let Some(b) = (0..nb).find(|b| loc.is_subset(procs[*b])) {
            class.push(LetterClass::Internal(b));
            continue;
        }
        let pair = (0..nb).find(|c| {
            parent[*c].is_some_and(|p| {
                let mut x = ProcSet::singleton(outer[*c]);
                x.insert(outer[p]);
                loc == x
            })
        });
        match pair {
            Some(child) => class.push(LetterClass::OuterPair { child }),
            None => {
                out.push(Violation::UnsupportedLetter(alpha.letter_name(a).to_string()));
                class.push(LetterClass::Internal(usize::MAX));
            }
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let mut children = vec![Vec::new(); nb];
    for (c, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(c);
        }
    }
    let mut subtree = procs.clone();
    for b in 0..nb {
        let mut cur = parent[b];
        while let Some(p) = cur {
            subtree[p] = subtree[p].union(procs[b]);
            cur = parent[p];
        }
    }
    let sigma_in = procs.iter().map(|x| alpha.letters_within(*x)).collect();
    Ok(Architecture {
        names,
        procs,
        outer,
        bag_of,
        parent,
        children,
        root: roots[0],
        subtree,
        sigma_in,
        class,
    })
}

/// The least `k` such that the projection of every accepted trace onto the
/// letters inside `bag` is `k`-fair with respect to the processes of `bag`,
/// or `None`. Letters outside the bag become silent moves.
pub fn bag_fairness_parameter(dfa: &Dfa, bag: ProcSet) -> Result<Option<usize>, DfaError> {
    dfa.ensure_trim()?;
    let alpha = dfa.alphabet();
    let inside = alpha.letters_within(bag);
    let silent = dfa.relation_on(alpha.all_letters().difference(inside)).star();
    let hs: Vec<BitMatrix> = bag
        .iter()
        .map(|p| silent.compose(&dfa.relation_on(inside.difference(alpha.sigma(p)))))
        .collect();
    let mut powers = hs.clone();
    for k in 1..=dfa.num_states() + 1 {
        if powers.iter().all(|m| m.is_empty()) {
            return Ok(Some(k));
        }
        for (pw, h) in powers.iter_mut().zip(&hs) {
            if !pw.is_empty() {
                *pw = pw.compose(h);
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TobError {
    #[error("invalid architecture: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("the specification is not fair for bag `{0}`")]
    NotFairForBag(String),
    #[error("no word inside the process set leads between the two states")]
    NoWitness,
    #[error("bag `{0}` cannot reconstruct its view")]
    InvariantBreak(String),
    #[error(transparent)]
    Dfa(#[from] DfaError),
}

/// Memoised diamond completion: given `q1 = δ(q0, t1)`, `q2 = δ(q1, u)`
/// with `loc(u) ⊆ X` and `q3 = δ(q1, v)` with `loc(v)` disjoint from `X`,
/// returns `δ(q1, u v)` from a shortest witness `u`.
#[derive(Clone, Debug)]
pub struct Diam {
    dfa: Arc<Dfa>,
    memo: HashMap<(StateId, StateId, ProcSet), Option<Vec<LetterId>>>,
}

impl Diam {
    pub fn new(dfa: Arc<Dfa>) -> Self {
        Diam {
            dfa,
            memo: HashMap::new(),
        }
    }

    /// A shortest word over the letters within `x` from `q1` to `q2`.
    pub fn witness(&mut self, q1: StateId, q2: StateId, x: ProcSet) -> Option<Vec<LetterId>> {
        if let Some(w) = self.memo.get(&(q1, q2, x)) {
            return w.clone();
        }
        let letters: Vec<LetterId> = self.dfa.alphabet().letters_within(x).iter().collect();
        let n = self.dfa.num_states();
        let mut parent: Vec<Option<(StateId, LetterId)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[q1.index()] = true;
        let mut queue = VecDeque::from([q1]);
        let mut found = None;
        while let Some(q) = queue.pop_front() {
            if q == q2 {
                let mut w = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur.index()] {
                    w.push(a);
                    cur = p;
                }
                w.reverse();
                found = Some(w);
                break;
            }
            for &a in &letters {
                if let Some(r) = self.dfa.next(q, a) {
                    if !seen[r.index()] {
                        seen[r.index()] = true;
                        parent[r.index()] = Some((q, a));
                        queue.push_back(r);
                    }
                }
            }
        }
        self.memo.insert((q1, q2, x), found.clone());
        found
    }

    /// `Ok(None)` when the completed run is undefined.
    pub fn diam(&mut self, q1: StateId, q2: StateId, q3: StateId, x: ProcSet) -> Result<Option<StateId>, TobError> {
        let u = self.witness(q1, q2, x).ok_or(TobError::NoWitness)?;
        Ok(self.dfa.run_word(q3, &u))
    }
}

/// A local state of the tree-of-bags automaton.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BagLocal {
    Inner {
        c: usize,
        phi: Fnf,
    },
    Outer {
        back: StateId,
        q: StateId,
        c: usize,
        phi: Fnf,
    },
}

impl BagLocal {
    pub fn counter(&self) -> usize {
        match self {
            BagLocal::Inner { c, .. } | BagLocal::Outer { c, .. } => *c,
        }
    }

    pub fn phi(&self) -> &Fnf {
        match self {
            BagLocal::Inner { phi, .. } | BagLocal::Outer { phi, .. } => phi,
        }
    }

    /// `(q̄, q)` of an outer process.
    pub fn outer_pair(&self) -> Option<(StateId, StateId)> {
        match self {
            BagLocal::Outer { back, q, .. } => Some((*back, *q)),
            BagLocal::Inner { .. } => None,
        }
    }

    fn with_inner(&self, c: usize, phi: Fnf) -> BagLocal {
        match self {
            BagLocal::Inner { .. } => BagLocal::Inner { c, phi },
            BagLocal::Outer { back, q, .. } => BagLocal::Outer {
                back: *back,
                q: *q,
                c,
                phi,
            },
        }
    }

    pub fn render(&self, dfa: &Dfa) -> String {
        let al = dfa.alphabet();
        match self {
            BagLocal::Inner { c, phi } => format!("({}, {})", c, phi.display(al)),
            BagLocal::Outer { back, q, c, phi } => format!(
                "({}, {}, {}, {})",
                dfa.state_name(*back),
                dfa.state_name(*q),
                c,
                phi.display(al)
            ),
        }
    }
}

/// The tree-of-bags construction as local transitions.
#[derive(Clone, Debug)]
pub struct TreeOfBagsSynthesis {
    dfa: Arc<Dfa>,
    arch: Architecture,
    k: Vec<usize>,
    diam: Diam,
}

impl TreeOfBagsSynthesis {
    /// Validates the architecture and computes the minimal per-bag
    /// parameters; `overrides` replaces them by bag name.
    pub fn new(dfa: Arc<Dfa>, tob: &TreeOfBags, overrides: &BTreeMap<String, usize>) -> Result<Self, TobError> {
        dfa.ensure_diamond()?;
        dfa.ensure_trim()?;
        let arch = resolve(dfa.alphabet(), tob).map_err(TobError::Invalid)?;
        let mut k = Vec::with_capacity(arch.num_bags());
        for b in 0..arch.num_bags() {
            let kb = match overrides.get(&arch.names[b]) {
                Some(v) if *v >= 1 => *v,
                Some(_) => return Err(TobError::Dfa(DfaError::ZeroK)),
                None => bag_fairness_parameter(&dfa, arch.procs[b])?
                    .ok_or_else(|| TobError::NotFairForBag(arch.names[b].clone()))?,
            };
            k.push(kb);
        }
        Ok(TreeOfBagsSynthesis {
            diam: Diam::new(dfa.clone()),
            dfa,
            arch,
            k,
        })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    /// The parameter used for each bag, in bag order.
    pub fn bag_parameters(&self) -> &[usize] {
        &self.k
    }

    pub fn diam_mut(&mut self) -> &mut Diam {
        &mut self.diam
    }

    /// The events of `union` not below the last event of `o`, where `psi` is
    /// the aligned suffix of `o`. `None` when `o` has no event in `psi`.
    fn above_last(&self, o: ProcId, psi: &Fnf, union: &Fnf) -> Option<Fnf> {
        let al = self.dfa.alphabet();
        let (i, a) = psi.max_event(al.sigma(o))?;
        let mut seeds = vec![LetterSet::EMPTY; union.foata_len()];
        seeds[i] = LetterSet::singleton(a);
        let down = union.downward_closure(al, &seeds);
        Some(union.remove(al, &down))
    }

    fn internal(&mut self, bag: usize, a: LetterId, locals: &[BagLocal]) -> Option<Vec<BagLocal>> {
        let al = self.dfa.alphabet_arc().clone();
        let k = self.k[bag];
        let parts: Vec<(usize, &Fnf)> = locals.iter().map(|l| (l.counter(), l.phi())).collect();
        let aligned = align(&al, k, &parts).ok()?;
        let c = locals[aligned.best].counter();
        let mut phi = aligned.union.clone();
        phi.push(&al, a);
        if !phi.is_k_fair_wrt(&al, k, self.arch.procs[bag]).unwrap_or(false) {
            return None;
        }
        let o = self.arch.outer[bag];
        let procs: Vec<ProcId> = al.loc(a).iter().collect();
        let new_q = match procs.iter().position(|p| *p == o) {
            Some(i) => {
                let (_, q_o) = locals[i].outer_pair()?;
                let rest = self
                    .above_last(o, &aligned.suffixes[i], &aligned.union)
                    .unwrap_or_else(|| aligned.union.clone());
                let q1 = self.dfa.run_trace(q_o, &rest)?;
                Some(self.dfa.next(q1, a)?)
            }
            None => None,
        };
        let j = standard_cut_steps(&phi, k);
        let (prefix, kept) = phi.split_at_step(j);
        let c2 = (c + prefix.len()) % (2 * k);
        Some(
            locals
                .iter()
                .zip(&procs)
                .map(|(l, p)| {
                    let next = l.with_inner(c2, kept.clone());
                    match (next, new_q) {
                        (BagLocal::Outer { back, c, phi, .. }, Some(q)) if *p == o => {
                            BagLocal::Outer { back, q, c, phi }
                        }
                        (next, _) => next,
                    }
                })
                .collect(),
        )
    }

    fn outer_pair(&mut self, child: usize, a: LetterId, locals: &[BagLocal]) -> Option<Vec<BagLocal>> {
        let al = self.dfa.alphabet_arc().clone();
        let theta = self.arch.outer[child];
        let parent = self.arch.outer[self.arch.parent[child]?];
        let procs: Vec<ProcId> = al.loc(a).iter().collect();
        let ti = procs.iter().position(|p| *p == theta)?;
        let ri = procs.iter().position(|p| *p == parent)?;
        let (back_t, q_t) = locals[ti].outer_pair()?;
        let (back_r, q_r) = locals[ri].outer_pair()?;
        let q1 = self.diam.diam(back_t, q_t, q_r, self.arch.subtree[child]).ok()??;
        let q2 = self.dfa.next(q1, a)?;
        let mut out = locals.to_vec();
        let (c, phi) = (locals[ti].counter(), locals[ti].phi().clone());
        out[ti] = BagLocal::Outer {
            back: q2,
            q: q2,
            c,
            phi,
        };
        let (c, phi) = (locals[ri].counter(), locals[ri].phi().clone());
        out[ri] = BagLocal::Outer {
            back: back_r,
            q: q2,
            c,
            phi,
        };
        Some(out)
    }

    /// `δ(q0, view_B(t))` from the local states of all processes.
    pub fn bag_view_state(&mut self, bag: usize, globals: &[BagLocal]) -> Result<Option<StateId>, TobError> {
        let al = self.dfa.alphabet_arc().clone();
        let k = self.k[bag];
        let members: Vec<ProcId> = self.arch.procs[bag].iter().collect();
        let parts: Vec<(usize, &Fnf)> = members
            .iter()
            .map(|p| (globals[p.index()].counter(), globals[p.index()].phi()))
            .collect();
        let broken = || TobError::InvariantBreak(self.arch.names[bag].clone());
        let aligned = align(&al, k, &parts).map_err(|_| broken())?;
        let o = self.arch.outer[bag];
        let oi = members.iter().position(|p| *p == o).expect("outer is a member");
        let (_, q_o) = globals[o.index()].outer_pair().ok_or_else(broken)?;
        let rest = match self.above_last(o, &aligned.suffixes[oi], &aligned.union) {
            Some(t) => t,
            None if aligned.union.len() < k => aligned.union.clone(),
            None => return Err(broken()),
        };
        Ok(self.dfa.run_trace(q_o, &rest))
    }

    /// `δ(q0, view_{X_B}(t))`: the bag view completed with each child
    /// subtree through `diam`.
    pub fn cstate(&mut self, bag: usize, globals: &[BagLocal]) -> Result<Option<StateId>, TobError> {
        let Some(mut q) = self.bag_view_state(bag, globals)? else {
            return Ok(None);
        };
        for child in self.arch.children[bag].clone() {
            let Some(sub) = self.cstate(child, globals)? else {
                return Ok(None);
            };
            let (back, _) = globals[self.arch.outer[child].index()]
                .outer_pair()
                .ok_or_else(|| TobError::InvariantBreak(self.arch.names[child].clone()))?;
            match self.diam.diam(back, sub, q, self.arch.subtree[child])? {
                Some(r) => q = r,
                None => return Ok(None),
            }
        }
        Ok(Some(q))
    }

    /// The state function of the purely acyclic construction, which reads
    /// only the outer pairs. It agrees with [`Self::cstate`] when every bag
    /// is a singleton.
    pub fn acyclic_state(&mut self, bag: usize, globals: &[BagLocal]) -> Result<Option<StateId>, TobError> {
        let (_, mut q) = globals[self.arch.outer[bag].index()]
            .outer_pair()
            .ok_or_else(|| TobError::InvariantBreak(self.arch.names[bag].clone()))?;
        for child in self.arch.children[bag].clone() {
            let Some(sub) = self.acyclic_state(child, globals)? else {
                return Ok(None);
            };
            let (back, _) = globals[self.arch.outer[child].index()]
                .outer_pair()
                .ok_or_else(|| TobError::InvariantBreak(self.arch.names[child].clone()))?;
            match self.diam.diam(back, sub, q, self.arch.subtree[child])? {
                Some(r) => q = r,
                None => return Ok(None),
            }
        }
        Ok(Some(q))
    }

    /// The DFA state reached on the whole trace, when defined.
    pub fn global_state(&mut self, globals: &[BagLocal]) -> Result<Option<StateId>, TobError> {
        self.cstate(self.arch.root, globals)
    }

    pub fn into_automaton(self) -> AsyncAutomaton<TreeOfBagsSynthesis> {
        AsyncAutomaton::new(self)
    }
}

impl LocalTransitions for TreeOfBagsSynthesis {
    type Local = BagLocal;

    fn alphabet(&self) -> &Arc<DistributedAlphabet> {
        self.dfa.alphabet_arc()
    }

    fn initial_local(&self, p: ProcId) -> BagLocal {
        let q0 = self.dfa.initial();
        if self.arch.is_outer(p) {
            BagLocal::Outer {
                back: q0,
                q: q0,
                c: 0,
                phi: Fnf::new(),
            }
        } else {
            BagLocal::Inner { c: 0, phi: Fnf::new() }
        }
    }

    fn transition(&mut self, a: LetterId, locals: &[BagLocal]) -> Option<Vec<BagLocal>> {
        match self.arch.class[a.index()] {
            LetterClass::Internal(bag) => self.internal(bag, a, locals),
            LetterClass::OuterPair { child } => self.outer_pair(child, a, locals),
        }
    }

    fn is_accepting(&mut self, globals: &[BagLocal]) -> bool {
        matches!(self.global_state(globals), Ok(Some(q)) if self.dfa.is_accepting(q))
    }

    fn render_local(&self, _p: ProcId, l: &BagLocal) -> String {
        l.render(&self.dfa)
    }
}

/// Local-state bound for a process of a bag with parameter `k`:
/// `n³ · 2k · |Σ|^{3k−3}` for an outer process and `2k · |Σ|^{3k−3}` for an
/// inner one, saturating.
pub fn tree_of_bags_bound(num_states: usize, k: usize, num_letters: usize, outer: bool) -> u128 {
    let inner =
        (2 * k as u128).saturating_mul((num_letters as u128).checked_pow(3 * k as u32 - 3).unwrap_or(u128::MAX));
    if outer {
        (num_states as u128).saturating_pow(3).saturating_mul(inner)
    } else {
        inner
    }
}

/// Synthesises the tree-of-bags automaton with minimal bag parameters.
pub fn synthesize_tree_of_bags(
    dfa: Arc<Dfa>,
    tob: &TreeOfBags,
) -> Result<AsyncAutomaton<TreeOfBagsSynthesis>, TobError> {
    Ok(TreeOfBagsSynthesis::new(dfa, tob, &BTreeMap::new())?.into_automaton())
}

/// The smallest ideal holding every event shared by the outer process of
/// `bag` and its parent.
pub fn joint_view(alpha: &DistributedAlphabet, arch: &Architecture, bag: usize, t: &Fnf) -> Fnf {
    match t.max_event(arch.parent_letters(bag)) {
        Some(e) => t.ideal_of(alpha, &[e]),
        None => Fnf::new(),
    }
}
