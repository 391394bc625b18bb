//! Independent oracles shared by the integration tests and the acceptance
//! harness. Every check returns `Err` with a readable counterexample.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fairsynth::aa::{AsyncAutomaton, GlobalState, LocalTransitions, DEFAULT_STATE_CAP};
use fairsynth::alphabet::{DistributedAlphabet, LetterId, ProcId, ProcSet};
use fairsynth::dfa::{Dfa, StateId};
use fairsynth::fixtures;
use fairsynth::synthesis::{
    elect_counters, synthesize, window_holds, CounterReference, InfiniteReference, LocalState, Mode, SynthesisConfig,
};
use fairsynth::traces::{Fnf, DEFAULT_LINEARISATION_CAP};
use fairsynth::treeofbags::{joint_view, BagLocal, Diam, TreeOfBags, TreeOfBagsSynthesis};

pub type Word = Vec<LetterId>;

/// Distinct traces with at most `max_len` letters whose words satisfy the
/// prefix-closed predicate `keep`, each with one word.
pub fn traces_where(
    alpha: &DistributedAlphabet,
    max_len: usize,
    mut keep: impl FnMut(&[LetterId]) -> bool,
) -> Vec<(Fnf, Word)> {
    let mut seen = HashSet::from([Fnf::new()]);
    let mut out = vec![(Fnf::new(), Vec::new())];
    let mut frontier = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (t, w) in &frontier {
            for a in alpha.letters() {
                let mut w2 = w.clone();
                w2.push(a);
                if !keep(&w2) {
                    continue;
                }
                let mut t2 = t.clone();
                t2.push(alpha, a);
                if seen.insert(t2.clone()) {
                    next.push((t2, w2));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn all_traces(alpha: &DistributedAlphabet, max_len: usize) -> Vec<(Fnf, Word)> {
    traces_where(alpha, max_len, |_| true)
}

/// Traces of `Pref(L)` for a trim DFA.
pub fn prefix_traces(d: &Dfa, max_len: usize) -> Vec<(Fnf, Word)> {
    traces_where(d.alphabet(), max_len, |w| d.run_word(d.initial(), w).is_some())
}

/// `view_X` computed on word positions: the events below the last event of
/// some process of `x`, in the causal order of the word.
pub fn view_oracle(alpha: &DistributedAlphabet, w: &[LetterId], x: ProcSet) -> Fnf {
    let n = w.len();
    let mut below = vec![vec![false; n]; n];
    for j in 0..n {
        below[j][j] = true;
        for i in 0..j {
            if !alpha.independent(w[i], w[j]) {
                for h in 0..=i {
                    if below[i][h] {
                        below[j][h] = true;
                    }
                }
            }
        }
    }
    let mut keep = vec![false; n];
    for p in x.iter() {
        if let Some(top) = (0..n).rev().find(|i| alpha.loc(w[*i]).contains(p)) {
            for h in 0..n {
                keep[h] |= below[top][h];
            }
        }
    }
    let sub: Word = (0..n).filter(|i| keep[*i]).map(|i| w[i]).collect();
    Fnf::from_word(alpha, &sub)
}

/// Distinct traces reachable in an automaton within `max_len` letters, with
/// one word and the global state.
pub fn aa_traces<T: LocalTransitions>(aa: &mut AsyncAutomaton<T>, max_len: usize) -> Vec<(Fnf, Word, GlobalState)> {
    let alpha = aa.alphabet().clone();
    let mut seen = HashSet::from([Fnf::new()]);
    let mut out = vec![(Fnf::new(), Vec::new(), aa.initial())];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if out[i].1.len() == max_len {
            continue;
        }
        for a in alpha.letters() {
            let Some(g) = aa.try_step(&out[i].2, a) else { continue };
            let mut t = out[i].0.clone();
            t.push(&alpha, a);
            if seen.insert(t.clone()) {
                let mut w = out[i].1.clone();
                w.push(a);
                out.push((t, w, g));
                queue.push_back(out.len() - 1);
            }
        }
    }
    out
}

/// Trace property suite on every trace up to `max_len` letters over `alpha`:
/// ideals keep step positions, stepwise unions give joint views, views of a
/// `k`-fair trace differ in length by less than `k`, and FNF prefixes below
/// `f(view_p, k-1)` and `f(view_p, 2k-2)` are complete.
pub fn trace_property_suite(alpha: &DistributedAlphabet, max_len: usize) -> Result<usize, String> {
    let procs: Vec<ProcId> = alpha.processes().collect();
    let subsets: Vec<ProcSet> = (1u64..1 << procs.len()).map(ProcSet).collect();
    let mut checks = 0usize;
    let step = |t: &Fnf, i: usize| t.steps().get(i).copied().unwrap_or_default();
    for (t, w) in all_traces(alpha, max_len) {
        let show = || alpha.render_word(&w);
        for i in 0..=w.len() {
            let s = Fnf::from_word(alpha, &w[..i]);
            for (j, st) in s.steps().iter().enumerate() {
                if !st.is_subset(step(&t, j)) {
                    return Err(format!("prefix {i} of {} leaves step {j}", show()));
                }
            }
            checks += 1;
        }
        let views: Vec<Fnf> = procs
            .iter()
            .map(|p| view_oracle(alpha, &w, ProcSet::singleton(*p)))
            .collect();
        for &x in &subsets {
            let v = view_oracle(alpha, &w, x);
            if t.view(alpha, x) != v {
                return Err(format!("view of {} disagrees on {}", alpha.render_procs(x), show()));
            }
            for (j, st) in v.steps().iter().enumerate() {
                if !st.is_subset(step(&t, j)) {
                    return Err(format!(
                        "view of {} leaves step {j} on {}",
                        alpha.render_procs(x),
                        show()
                    ));
                }
            }
            let mut u = Fnf::new();
            for p in x.iter() {
                u = u.union(alpha, &views[p.index()]).map_err(|e| e.to_string())?;
            }
            if u != v {
                return Err(format!(
                    "stepwise union differs for {} on {}",
                    alpha.render_procs(x),
                    show()
                ));
            }
            checks += 2;
        }
        let Some(kmin) = t.fairness_of(alpha) else { continue };
        if !t.is_k_fair_trace(alpha, kmin).unwrap() || (kmin > 1 && t.is_k_fair_trace(alpha, kmin - 1).unwrap()) {
            return Err(format!("fairness of {} is not {kmin}", show()));
        }
        for k in kmin..=kmin + 1 {
            for a in &views {
                for b in &views {
                    if a.len().abs_diff(b.len()) > k - 1 {
                        return Err(format!("views of {} differ by more than {}", show(), k - 1));
                    }
                }
            }
            for v in &views {
                for (ell, all) in [(k - 1, false), (2 * k - 2, true)] {
                    if v.len() < ell {
                        continue;
                    }
                    let f = if ell == 0 {
                        v.foata_len() + 1
                    } else {
                        v.f_measure(ell).unwrap()
                    };
                    let others: Vec<&Fnf> = if all { views.iter().collect() } else { vec![v] };
                    for i in 0..f.saturating_sub(1) {
                        for o in &others {
                            if step(&t, i) != step(o, i) {
                                return Err(format!("step {} of {} unknown at k={k}, ell={ell}", i + 1, show()));
                            }
                        }
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(checks)
}

fn fnf(alpha: &DistributedAlphabet, text: &str) -> Fnf {
    Fnf::parse(alpha, text).unwrap()
}

fn word(alpha: &DistributedAlphabet, text: &str) -> Word {
    alpha.parse_word(text).unwrap()
}

fn steps_text(parts: &[(&str, usize)]) -> String {
    parts.iter().map(|(s, n)| s.repeat(*n)).collect()
}

/// The claims of the two examples showing that the knowledge bounds are
/// tight, each with whether it holds.
pub fn optimality_claims(k: usize) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    let two = DistributedAlphabet::from_locs(&[("a", &["p1"]), ("b", &["p2"])]).unwrap();
    let p = |al: &DistributedAlphabet, n: &str| ProcSet::singleton(al.process(n).unwrap());
    let w = word(&two, &format!("b{}", "a".repeat(k - 1)));
    let t = Fnf::from_word(&two, &w);
    let v1 = view_oracle(&two, &w, p(&two, "p1"));
    let mut claim = |name: &str, holds: bool| out.push((format!("{name} (k={k})"), holds));
    claim("b a^(k-1) is k-fair", t.is_k_fair_trace(&two, k).unwrap());
    claim(
        "view of p1 is a^(k-1) in singleton steps",
        v1 == fnf(&two, &"{a}".repeat(k - 1)),
    );
    claim(
        "b a^(k-1) has normal form {a,b}{a}^(k-2)",
        t == fnf(&two, &steps_text(&[("{a,b}", 1), ("{a}", k - 2)])),
    );
    claim("f(view_p1, k-1) = 1", v1.f_measure(k - 1).unwrap() == 1);
    claim("p1 misses the first step", t.steps()[0] != v1.steps()[0]);

    let three = DistributedAlphabet::from_locs(&[
        ("a", &["p1"]),
        ("b", &["p2"]),
        ("c", &["p1", "p2"]),
        ("d", &["p1", "p3"]),
    ])
    .unwrap();
    let body = "a".repeat(k - 2);
    let w = word(&three, &format!("b{body}dc{body}"));
    let t = Fnf::from_word(&three, &w);
    let views: Vec<Fnf> = ["p1", "p2", "p3"]
        .iter()
        .map(|n| view_oracle(&three, &w, p(&three, n)))
        .collect();
    let expect_t = fnf(
        &three,
        &steps_text(&[("{a,b}", 1), ("{a}", k - 3), ("{d}{c}", 1), ("{a}", k - 2)]),
    );
    claim("b a^(k-2) d c a^(k-2) has the stated normal form", t == expect_t);
    claim("view of p1 is the whole trace", views[0] == t);
    claim(
        "view of p2 is b a^(k-2) d c",
        views[1] == Fnf::from_word(&three, &word(&three, &format!("b{body}dc"))),
    );
    claim(
        "view of p3 is a^(k-2) d",
        views[2] == Fnf::from_word(&three, &word(&three, &format!("{body}d"))),
    );
    claim("b a^(k-2) d c a^(k-2) is k-fair", t.is_k_fair_trace(&three, k).unwrap());
    claim(
        "b a^(k-2) d c a^(k-2) is not (k-1)-fair",
        !t.is_k_fair_trace(&three, k - 1).unwrap(),
    );
    claim("view of p1 has 2k-1 letters", views[0].len() == 2 * k - 1);
    claim("f(view_p1, 2k-2) = 1", views[0].f_measure(2 * k - 2).unwrap() == 1);
    claim("p3 misses the first step", t.steps()[0] != views[2].steps()[0]);
    out
}

/// A linearisation of `t` with a factor of `k` letters avoiding a process.
pub fn starving_factor(alpha: &DistributedAlphabet, t: &Fnf, k: usize) -> Option<String> {
    let all = alpha.all_processes();
    t.linearisations(alpha, DEFAULT_LINEARISATION_CAP)
        .ok()?
        .into_iter()
        .find_map(|w| {
            w.windows(k)
                .find(|f| alpha.loc_of_word(f) != all)
                .map(|f| format!("{} in {}", alpha.render_word(f), alpha.render_word(&w)))
        })
}

/// Walks every word up to `max_len` letters over the `fig3` alphabet through
/// the bounded, counter and view automata, comparing each process's state
/// with the reduction of the next stage. Returns the number of words.
pub fn stage_agreement(max_len: usize) -> Result<usize, String> {
    let k = 4;
    let d = Arc::new(fixtures::fig3());
    let al = d.alphabet_arc().clone();
    let mut bm = synthesize(d.clone(), SynthesisConfig::new(k)).map_err(|e| e.to_string())?;
    let nat_ref = CounterReference::new(d.clone(), k);
    let mut bn = nat_ref.clone().into_automaton();
    let mut binf = InfiniteReference::new(d.clone()).into_automaton();
    let mut stack = vec![(Vec::new(), bm.initial(), bn.initial(), binf.initial())];
    let mut words = 0;
    while let Some((w, gm, gn, gi)) = stack.pop() {
        words += 1;
        let show = || al.render_word(&w);
        let mut mod_locals = Vec::new();
        for p in al.processes() {
            let lm = bm.local(p, gm[p.index()]).clone();
            let ln = bn.local(p, gn[p.index()]).clone();
            let li = binf.local(p, gi[p.index()]).clone();
            if li != view_oracle(&al, &w, ProcSet::singleton(p)) {
                return Err(format!("view automaton is not the view at {}", show()));
            }
            let cut = nat_ref
                .cut(&LocalState {
                    q: d.initial(),
                    c: 0,
                    phi: li,
                })
                .ok_or_else(|| format!("cut of the view undefined at {}", show()))?;
            if ln != cut {
                return Err(format!("counter stage is not the cut view at {}", show()));
            }
            let reduced = LocalState {
                q: ln.q,
                c: ln.c % (2 * k),
                phi: ln.phi,
            };
            if lm != reduced {
                return Err(format!("bounded stage is not the reduced counter at {}", show()));
            }
            mod_locals.push(lm);
        }
        let refs: Vec<&LocalState> = mod_locals.iter().collect();
        if !window_holds(k, &refs) {
            return Err(format!("window broken at {}", show()));
        }
        let accepted = d.run_word(d.initial(), &w).is_some_and(|q| d.is_accepting(q));
        if bm.is_accepting(&gm) != accepted || bn.is_accepting(&gn) != accepted || binf.is_accepting(&gi) != accepted {
            return Err(format!("acceptance differs at {}", show()));
        }
        if w.len() == max_len {
            continue;
        }
        for a in al.letters() {
            let mut w2 = w.clone();
            w2.push(a);
            let defined = d.run_word(d.initial(), &w2).is_some();
            match (bm.try_step(&gm, a), bn.try_step(&gn, a)) {
                (Some(m), Some(n)) if defined => {
                    let i = binf.try_step(&gi, a).ok_or("view automaton refused")?;
                    stack.push((w2, m, n, i));
                }
                (None, None) if !defined => {}
                _ => {
                    return Err(format!(
                        "refusals differ from the specification at {}",
                        al.render_word(&w2)
                    ))
                }
            }
        }
    }
    let (states, _) = bm.explore_reachable(DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    for g in &states {
        let locals: Vec<&LocalState> = al.processes().map(|p| bm.local(p, g[p.index()])).collect();
        if !window_holds(k, &locals) {
            return Err(format!("window broken at {}", bm.render_global(g)));
        }
    }
    Ok(words)
}

/// Unfair mode: the accepted traces up to `max_len` letters are exactly the
/// `k`-fair traces of the language. Returns (reachable, accepted) counts.
pub fn unfair_oracle(d: Dfa, k: usize, max_len: usize) -> Result<(usize, usize), String> {
    let d = Arc::new(d);
    let al = d.alphabet_arc().clone();
    let mut aa = synthesize(d.clone(), SynthesisConfig::new(k).with_mode(Mode::Unfair)).map_err(|e| e.to_string())?;
    let in_lang = |t: &Fnf| d.run_trace(d.initial(), t).is_some_and(|q| d.is_accepting(q));
    let mut accepted = HashSet::new();
    let reachable = aa_traces(&mut aa, max_len);
    for (t, w, g) in &reachable {
        let expect = in_lang(t) && t.is_k_fair_trace(&al, k).unwrap();
        if aa.is_accepting(g) != expect {
            return Err(format!("verdict differs on {}", al.render_word(w)));
        }
        if expect {
            accepted.insert(t.clone());
        }
    }
    for (t, w) in prefix_traces(&d, max_len) {
        if in_lang(&t) && t.is_k_fair_trace(&al, k).unwrap() && !accepted.contains(&t) {
            return Err(format!("fair word {} is not accepted", al.render_word(&w)));
        }
    }
    Ok((reachable.len(), accepted.len()))
}

/// Local transitions given by a table over small local state sets.
#[derive(Clone, Debug)]
pub struct TableAa {
    alpha: Arc<DistributedAlphabet>,
    table: HashMap<(LetterId, Vec<u8>), Vec<u8>>,
    accepting: HashSet<Vec<u8>>,
}

impl LocalTransitions for TableAa {
    type Local = u8;

    fn alphabet(&self) -> &Arc<DistributedAlphabet> {
        &self.alpha
    }

    fn initial_local(&self, _p: ProcId) -> u8 {
        0
    }

    fn transition(&mut self, a: LetterId, locals: &[u8]) -> Option<Vec<u8>> {
        self.table.get(&(a, locals.to_vec())).cloned()
    }

    fn is_accepting(&mut self, globals: &[u8]) -> bool {
        self.accepting.contains(globals)
    }

    fn render_local(&self, _p: ProcId, l: &u8) -> String {
        l.to_string()
    }
}

/// A random asynchronous automaton over four processes; its semantics is a
/// diamond DFA.
pub fn random_diamond_dfa(seed: u64) -> Dfa {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let procs = ["p1", "p2", "p3", "p4"];
    let names = ["a", "b", "c", "d", "e", "f"];
    let locs: Vec<Vec<&str>> = names
        .iter()
        .map(|_| {
            let mut l: Vec<&str> = procs.iter().copied().filter(|_| rng.gen_bool(0.35)).collect();
            if l.is_empty() {
                l.push(procs[rng.gen_range(0..procs.len())]);
            }
            l
        })
        .collect();
    let pairs: Vec<(&str, &[&str])> = names.iter().zip(&locs).map(|(n, l)| (*n, l.as_slice())).collect();
    let alpha = Arc::new(DistributedAlphabet::from_locs(&pairs).unwrap());
    let mut table = HashMap::new();
    for a in alpha.letters() {
        let n = alpha.loc(a).len();
        for code in 0..3u32.pow(n as u32) {
            let from: Vec<u8> = (0..n).map(|i| ((code / 3u32.pow(i as u32)) % 3) as u8).collect();
            if rng.gen_bool(0.75) {
                let to: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                table.insert((a, from), to);
            }
        }
    }
    let accepting = HashSet::from([vec![0; procs.len()]]);
    let aa = TableAa {
        alpha,
        table,
        accepting,
    };
    AsyncAutomaton::new(aa).global_semantics(DEFAULT_STATE_CAP).unwrap()
}

fn random_walk(d: &Dfa, rng: &mut ChaCha8Rng, from: StateId, letters: &[LetterId], max: usize) -> Word {
    let len = rng.gen_range(0..=max);
    let mut w = Vec::new();
    let mut q = from;
    for _ in 0..len {
        let options: Vec<(LetterId, StateId)> = letters.iter().filter_map(|a| d.next(q, *a).map(|r| (*a, r))).collect();
        if options.is_empty() {
            break;
        }
        let (a, r) = options[rng.gen_range(0..options.len())];
        w.push(a);
        q = r;
    }
    w
}

/// Words of at most `max` letters over `letters` from `from` to `to`.
fn witnesses(d: &Dfa, from: StateId, to: StateId, letters: &[LetterId], max: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack = vec![(from, Vec::new())];
    while let Some((q, w)) = stack.pop() {
        if q == to {
            out.push(w.clone());
        }
        if w.len() == max {
            continue;
        }
        for &a in letters {
            if let Some(r) = d.next(q, a) {
                let mut w2 = w.clone();
                w2.push(a);
                stack.push((r, w2));
            }
        }
    }
    out
}

/// Random triples `(t1, t2, t3)` with `loc(t2) ⊆ X` and `loc(t3)` disjoint
/// from `X`: the completed corner must be `δ(q0, t1 t2 t3)`, for every
/// witness of up to four letters. Returns the number of triples and of
/// those with `t2` and `t3` both non-empty.
pub fn diam_oracle(seeds: std::ops::Range<u64>, per_seed: usize) -> Result<(usize, usize), String> {
    let mut count = 0;
    let mut proper = 0;
    for seed in seeds {
        let d = Arc::new(random_diamond_dfa(seed));
        let al = d.alphabet_arc().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut diam = Diam::new(d.clone());
        let all: Vec<LetterId> = al.letters().collect();
        let n = al.num_processes();
        for _ in 0..per_seed {
            let x = ProcSet(rng.gen_range(1..(1u64 << n) - 1));
            let inside: Vec<LetterId> = all.iter().copied().filter(|a| al.loc(*a).is_subset(x)).collect();
            let outside: Vec<LetterId> = all.iter().copied().filter(|a| !al.loc(*a).intersects(x)).collect();
            let t1 = random_walk(&d, &mut rng, d.initial(), &all, 4);
            let q1 = d.run_word(d.initial(), &t1).unwrap();
            let t2 = random_walk(&d, &mut rng, q1, &inside, 4);
            let t3 = random_walk(&d, &mut rng, q1, &outside, 4);
            let q2 = d.run_word(q1, &t2).unwrap();
            let q3 = d.run_word(q1, &t3).unwrap();
            let full: Word = t1.iter().chain(&t2).chain(&t3).copied().collect();
            let expect = d.run_word(d.initial(), &full);
            let got = diam.diam(q1, q2, q3, x).map_err(|e| e.to_string())?;
            let show = || {
                format!(
                    "seed {seed}: {} | {} | {}",
                    al.render_word(&t1),
                    al.render_word(&t2),
                    al.render_word(&t3)
                )
            };
            if expect.is_none() || got != expect {
                return Err(format!("diam mismatch at {}", show()));
            }
            for u in witnesses(&d, q1, q2, &inside, 4) {
                if d.run_word(q3, &u) != expect {
                    return Err(format!("witness {} disagrees at {}", al.render_word(&u), show()));
                }
            }
            count += 1;
            proper += usize::from(!t2.is_empty() && !t3.is_empty());
        }
    }
    Ok((count, proper))
}

fn bag_globals(aa: &AsyncAutomaton<TreeOfBagsSynthesis>, g: &[u32]) -> Vec<BagLocal> {
    g.iter()
        .enumerate()
        .map(|(p, i)| aa.local(ProcId(p as u8), *i).clone())
        .collect()
}

/// Tree-of-bags states against views of the full trace, on every trace of
/// `Pref(L)` up to `max_len` letters, then language equivalence. Returns
/// the number of traces.
pub fn tree_of_bags_oracle(d: Dfa, tob: &TreeOfBags, max_len: usize) -> Result<usize, String> {
    let d = Arc::new(d);
    let al = d.alphabet_arc().clone();
    let q0 = d.initial();
    let view_state = |t: &Fnf, x: ProcSet| d.run_trace(q0, &t.view(&al, x));
    let mut aa = TreeOfBagsSynthesis::new(d.clone(), tob, &BTreeMap::new())
        .map_err(|e| e.to_string())?
        .into_automaton();
    let arch = aa.inner().architecture().clone();
    let singleton = arch.procs.iter().all(|b| b.len() == 1);
    let traces = prefix_traces(&d, max_len);
    for (t, w) in &traces {
        let show = || al.render_word(w);
        let run = aa.run(w);
        if run.refused_at.is_some() {
            return Err(format!("refused {}", show()));
        }
        let g = bag_globals(&aa, &run.last);
        for b in 0..arch.num_bags() {
            let o = arch.outer[b];
            let (back, q) = g[o.index()].outer_pair().ok_or("outer without pair")?;
            if Some(q) != view_state(t, ProcSet::singleton(o)) {
                return Err(format!("outer state of {} at {}", arch.names[b], show()));
            }
            if Some(back) != d.run_trace(q0, &joint_view(&al, &arch, b, t)) {
                return Err(format!("joint-view state of {} at {}", arch.names[b], show()));
            }
            let syn = aa.inner_mut();
            let err = |e: fairsynth::treeofbags::TobError| e.to_string();
            if syn.bag_view_state(b, &g).map_err(err)? != view_state(t, arch.procs[b]) {
                return Err(format!("bag view of {} at {}", arch.names[b], show()));
            }
            let c = syn.cstate(b, &g).map_err(err)?;
            if c != view_state(t, arch.subtree[b]) {
                return Err(format!("subtree state of {} at {}", arch.names[b], show()));
            }
            if singleton && syn.acyclic_state(b, &g).map_err(err)? != c {
                return Err(format!("acyclic state differs at {}", show()));
            }
        }
        let q = d.run_trace(q0, t).ok_or("trace left the DFA")?;
        if aa.is_accepting(&run.last) != d.is_accepting(q) {
            return Err(format!("verdict differs at {}", show()));
        }
        for a in al.letters().filter(|a| d.next(q, *a).is_some()) {
            if aa.try_step(&run.last, a).is_none() {
                return Err(format!("{} refused after {}", al.letter_name(a), show()));
            }
        }
    }
    let ks = aa.inner().bag_parameters().to_vec();
    let (reachable, _) = aa.explore_reachable(DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    for g in &reachable {
        let locals = bag_globals(&aa, g);
        for b in 0..arch.num_bags() {
            let parts: Vec<(usize, usize)> = arch.procs[b]
                .iter()
                .map(|p| (locals[p.index()].counter(), locals[p.index()].phi().len()))
                .collect();
            if elect_counters(ks[b], &parts).is_err() {
                return Err(format!("window of {} broken at {}", arch.names[b], aa.render_global(g)));
            }
        }
    }
    let sem = aa.global_semantics(DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    if let Some(w) = sem.equivalent(&d).map_err(|e| e.to_string())? {
        return Err(format!("languages differ on {}", al.render_word(&w)));
    }
    Ok(traces.len())
}

/// The single-bag architecture over `fig3` with `p1` as outer process.
pub fn fig3_single_bag() -> (Dfa, TreeOfBags) {
    let d = fixtures::fig3();
    let tob = TreeOfBags::single_bag(d.alphabet(), "p1");
    (d, tob)
}
