//! Example specifications: the worked figures, the `L_n` families, and a
//! dining-philosophers generator, and small tree-of-bags architectures.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::aa::{AaError, AaJson, AaTransitionJson, AsyncAutomaton, ExplicitAa, DEFAULT_STATE_CAP};
use crate::alphabet::{AlphabetError, DistributedAlphabet, LetterId};
use crate::dfa::{Dfa, DfaError, StateId};
use crate::treeofbags::TreeOfBags;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Aa(#[from] AaError),
}

/// `loc(a)={p1,p2}`, `loc(b)={p1,p3}`, `loc(c)={p2}`, `loc(d)={p3}`.
pub fn example1_alphabet() -> DistributedAlphabet {
    DistributedAlphabet::from_locs(&[
        ("a", &["p1", "p2"]),
        ("b", &["p1", "p3"]),
        ("c", &["p2"]),
        ("d", &["p3"]),
    ])
    .expect("valid alphabet")
}

/// The alphabet of the worked run: only `c` and `d` are independent.
pub fn fig3_alphabet() -> DistributedAlphabet {
    DistributedAlphabet::from_locs(&[
        ("a", &["p1", "p2"]),
        ("b", &["p1", "p3"]),
        ("c", &["p2", "p3"]),
        ("d", &["p1"]),
    ])
    .expect("valid alphabet")
}

/// The 4-fair DFA `((a + cd + dc) b)* (a + cd + dc)`.
pub fn fig3() -> Dfa {
    Dfa::from_named(
        Arc::new(fig3_alphabet()),
        &["q0", "q1", "q2", "q3"],
        "q0",
        &["q3"],
        &[
            ("q0", "c", "q1"),
            ("q0", "d", "q2"),
            ("q0", "a", "q3"),
            ("q1", "d", "q3"),
            ("q2", "c", "q3"),
            ("q3", "b", "q0"),
        ],
    )
    .expect("valid DFA")
}

/// Two processes; `a` local to `p1`, `b` local to `p2`, `c` shared.
pub fn fig1_alphabet() -> DistributedAlphabet {
    DistributedAlphabet::from_locs(&[("a", &["p1"]), ("b", &["p2"]), ("c", &["p1", "p2"])]).expect("valid alphabet")
}

fn grid_name(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

/// The 9-state product DFA for `(([ab] + [aabb]) c)*`: state `i,j` counts
/// the `a`s and `b`s since the last `c`.
pub fn fig1() -> Dfa {
    let alpha = Arc::new(fig1_alphabet());
    let names: Vec<String> = (0..3).flat_map(|i| (0..3).map(move |j| grid_name(i, j))).collect();
    let id = |i: usize, j: usize| StateId((i * 3 + j) as u32);
    let (a, b, c) = (
        alpha.letter("a").unwrap(),
        alpha.letter("b").unwrap(),
        alpha.letter("c").unwrap(),
    );
    let mut ts = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i < 2 {
                ts.push((id(i, j), a, id(i + 1, j)));
            }
            if j < 2 {
                ts.push((id(i, j), b, id(i, j + 1)));
            }
        }
    }
    ts.push((id(1, 1), c, id(0, 0)));
    ts.push((id(2, 2), c, id(0, 0)));
    let mut acc = vec![false; 9];
    acc[0] = true;
    Dfa::new(alpha, names, id(0, 0), acc, &ts).expect("valid DFA")
}

/// The two-process AA for `(([ab] + [aabb]) c)*`: each process counts its
/// own letter and the `c` transitions reset matching counts.
pub fn fig1_aa() -> ExplicitAa {
    let alpha = Arc::new(fig1_alphabet());
    ExplicitAa::from_tables(
        alpha,
        &[("p1", &["0", "1", "2"]), ("p2", &["0", "1", "2"])],
        &["0", "0"],
        &[
            ("a", &["0"], &["1"]),
            ("a", &["1"], &["2"]),
            ("b", &["0"], &["1"]),
            ("b", &["1"], &["2"]),
            ("c", &["1", "1"], &["0", "0"]),
            ("c", &["2", "2"], &["0", "0"]),
        ],
        &[&["0", "0"]],
    )
    .expect("valid AA")
}

/// The unfair DFA: an even number of `a`/`b` letters between consecutive
/// `c`s and at both ends.
pub fn appendix_g() -> Dfa {
    let alpha = Arc::new(fig1_alphabet());
    Dfa::from_named(
        alpha,
        &["0", "1"],
        "0",
        &["0"],
        &[
            ("0", "c", "0"),
            ("0", "a", "1"),
            ("0", "b", "1"),
            ("1", "a", "0"),
            ("1", "b", "0"),
        ],
    )
    .expect("valid DFA")
}

/// `L_n = ((∪_{i<j} [a_i a_j]) c)*` over processes `p1..pn`, with `a_i`
/// local to `p_i` and `c` global.
pub fn example8(n: usize) -> Result<Dfa, FixtureError> {
    if n < 2 {
        return Err(FixtureError::InvalidParameter(format!(
            "example 8 needs n >= 2, got {n}"
        )));
    }
    let procs: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    let mut loc = BTreeMap::new();
    loc.insert("c".to_string(), procs.clone());
    for i in 1..=n {
        loc.insert(format!("a{i}"), vec![format!("p{i}")]);
    }
    let alpha = Arc::new(DistributedAlphabet::new(loc.keys().cloned(), procs, &loc)?);
    let mut names = vec!["s".to_string()];
    names.extend((1..=n).map(|i| format!("t{i}")));
    names.push("u".to_string());
    let s = StateId(0);
    let t = |i: usize| StateId(i as u32);
    let u = StateId(n as u32 + 1);
    let a = |i: usize| alpha.letter(&format!("a{i}")).unwrap();
    let mut ts = vec![(u, alpha.letter("c")?, s)];
    for i in 1..=n {
        ts.push((s, a(i), t(i)));
        for j in (1..=n).filter(|j| *j != i) {
            ts.push((t(i), a(j), u));
        }
    }
    let mut acc = vec![false; n + 2];
    acc[0] = true;
    Ok(Dfa::new(alpha, names, s, acc, &ts)?)
}

/// The lower-bound family: processes `0..=n`, one letter per pair of
/// processes, and the language `(a_0 + b_0)…(a_{k−1} + b_{k−1}) S_n` with
/// `n = 4k`.
pub fn lower_bound_ln(n: usize) -> Result<Dfa, FixtureError> {
    if n == 0 || n % 4 != 0 {
        return Err(FixtureError::InvalidParameter(format!(
            "L_n needs a positive n divisible by 4, got {n}"
        )));
    }
    let k = n / 4;
    let pname = |i: usize| format!("p{i}");
    let lname = |i: usize, j: usize| {
        let (i, j) = (i.min(j), i.max(j));
        format!("e{i}_{j}")
    };
    let procs: Vec<String> = (0..=n).map(pname).collect();
    let mut loc = BTreeMap::new();
    for i in 0..=n {
        for j in i + 1..=n {
            loc.insert(lname(i, j), vec![pname(i), pname(j)]);
        }
    }
    let alpha = Arc::new(DistributedAlphabet::new(loc.keys().cloned(), procs, &loc)?);
    let mut names = Vec::new();
    let mut add = |n: String| {
        names.push(n);
        StateId(names.len() as u32 - 1)
    };
    let starts: Vec<StateId> = (0..=k).map(|m| add(format!("s{m}"))).collect();
    let mut ts = Vec::new();
    let l = |i: usize, j: usize| alpha.letter(&lname(i, j)).unwrap();
    for m in 0..k {
        let b = 4 * m;
        let mid = add(format!("m{m}"));
        let via_a = add(format!("a{m}"));
        let via_b = add(format!("b{m}"));
        ts.push((starts[m], l(b, b + 1), mid));
        ts.push((mid, l(b + 1, b + 2), via_a));
        ts.push((via_a, l(b + 2, b + 4), starts[m + 1]));
        ts.push((mid, l(b, b + 3), via_b));
        ts.push((via_b, l(b + 3, b + 4), starts[m + 1]));
    }
    let fin = add("f".to_string());
    for m in 0..k {
        ts.push((starts[k], l(4 * m, n), fin));
    }
    let mut acc = vec![false; names.len()];
    acc[fin.index()] = true;
    Ok(Dfa::new(alpha, names, starts[0], acc, &ts)?)
}

/// Which processes take part in a philosopher's actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhilosopherLocality {
    /// Every action of philosopher `i` involves `i−1`, `i` and `i+1`.
    #[default]
    Neighbourhood,
    /// An action on a chopstick involves the two philosophers sharing it.
    Chopstick,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhilosopherConfig {
    pub n: usize,
    /// Forbid putting a chopstick back before eating.
    pub strict_eat: bool,
    pub locality: PhilosopherLocality,
}

impl PhilosopherConfig {
    pub fn new(n: usize) -> Self {
        PhilosopherConfig {
            n,
            strict_eat: false,
            locality: PhilosopherLocality::Neighbourhood,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Chopstick {
    Table,
    /// Held by the philosopher for whom it is the left chopstick.
    HeldLeft,
    /// Held by the philosopher for whom it is the right chopstick.
    HeldRight,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Table {
    sticks: Vec<Chopstick>,
    eaten: Vec<bool>,
}

impl Table {
    fn name(&self, strict: bool) -> String {
        let mut s: String = self
            .sticks
            .iter()
            .map(|c| match c {
                Chopstick::Table => 't',
                Chopstick::HeldLeft => 'l',
                Chopstick::HeldRight => 'r',
            })
            .collect();
        if strict {
            s.push('/');
            s.extend(self.eaten.iter().map(|e| if *e { '1' } else { '0' }));
        }
        s
    }
}

fn philosopher_alphabet(cfg: &PhilosopherConfig) -> Result<DistributedAlphabet, FixtureError> {
    let n = cfg.n;
    let p = |i: usize| format!("P{}", i % n);
    let mut loc = BTreeMap::new();
    for i in 0..n {
        let left = (i + n - 1) % n;
        let right = (i + 1) % n;
        for act in ["pickL", "pickR", "putL", "putR"] {
            let mut ps = match cfg.locality {
                PhilosopherLocality::Neighbourhood => vec![p(left), p(i), p(right)],
                PhilosopherLocality::Chopstick if act.ends_with('L') => vec![p(left), p(i)],
                PhilosopherLocality::Chopstick => vec![p(i), p(right)],
            };
            ps.sort();
            ps.dedup();
            loc.insert(format!("{act}_{i}"), ps);
        }
    }
    let procs: Vec<String> = (0..n).map(p).collect();
    Ok(DistributedAlphabet::new(loc.keys().cloned(), procs, &loc)?)
}

/// The philosophers' DFA before trimming. Philosopher `i` uses chopstick
/// `i` on the left and `i+1` on the right; accepting means every chopstick
/// is on the table.
pub fn philosophers_untrimmed(cfg: &PhilosopherConfig) -> Result<Dfa, FixtureError> {
    let n = cfg.n;
    if n < 2 {
        return Err(FixtureError::InvalidParameter(format!(
            "philosophers need n >= 2, got {n}"
        )));
    }
    let alpha = Arc::new(philosopher_alphabet(cfg)?);
    let letter = |act: &str, i: usize| -> LetterId { alpha.letter(&format!("{act}_{i}")).unwrap() };
    let start = Table {
        sticks: vec![Chopstick::Table; n],
        eaten: vec![false; n],
    };
    let holds_both =
        |t: &Table, i: usize| t.sticks[i] == Chopstick::HeldLeft && t.sticks[(i + 1) % n] == Chopstick::HeldRight;
    let step = |t: &Table, i: usize, act: &str| -> Option<Table> {
        let (stick, mine) = if act.ends_with('L') {
            (i, Chopstick::HeldLeft)
        } else {
            ((i + 1) % n, Chopstick::HeldRight)
        };
        let mut u = t.clone();
        if act.starts_with("pick") {
            if t.sticks[stick] != Chopstick::Table {
                return None;
            }
            u.sticks[stick] = mine;
            if cfg.strict_eat && holds_both(&u, i) {
                u.eaten[i] = true;
            }
        } else {
            if t.sticks[stick] != mine || (cfg.strict_eat && !t.eaten[i]) {
                return None;
            }
            u.sticks[stick] = Chopstick::Table;
            let other = if act.ends_with('L') { (i + 1) % n } else { i };
            let other_mine = if act.ends_with('L') {
                Chopstick::HeldRight
            } else {
                Chopstick::HeldLeft
            };
            if u.sticks[other] != other_mine {
                u.eaten[i] = false;
            }
        }
        Some(u)
    };
    let mut index: HashMap<Table, StateId> = HashMap::new();
    let mut tables = vec![start.clone()];
    index.insert(start, StateId(0));
    let mut queue = VecDeque::from([StateId(0)]);
    let mut ts = Vec::new();
    while let Some(q) = queue.pop_front() {
        let t = tables[q.index()].clone();
        for i in 0..n {
            for act in ["pickL", "pickR", "putL", "putR"] {
                if let Some(u) = step(&t, i, act) {
                    let r = *index.entry(u.clone()).or_insert_with(|| {
                        tables.push(u);
                        queue.push_back(StateId(tables.len() as u32 - 1));
                        StateId(tables.len() as u32 - 1)
                    });
                    ts.push((q, letter(act, i), r));
                }
            }
        }
    }
    let names = tables.iter().map(|t| t.name(cfg.strict_eat)).collect();
    let acc = tables
        .iter()
        .map(|t| t.sticks.iter().all(|c| *c == Chopstick::Table))
        .collect();
    Ok(Dfa::new(alpha, names, StateId(0), acc, &ts)?)
}

/// The trimmed philosophers' DFA; trimming removes deadlocks.
pub fn philosophers(cfg: &PhilosopherConfig) -> Result<Dfa, FixtureError> {
    Ok(philosophers_untrimmed(cfg)?.trim())
}

/// An asynchronous automaton where every process holds one bit, starts and
/// accepts at 0, and `rule` maps the bits of `loc(a)` (in process order).
fn bit_aa(
    alpha: Arc<DistributedAlphabet>,
    rule: impl Fn(&str, &[u8]) -> Option<Vec<u8>>,
) -> Result<ExplicitAa, FixtureError> {
    let bit = |b: &u8| b.to_string();
    let mut transitions = Vec::new();
    for a in alpha.letters() {
        let n = alpha.loc(a).len();
        for bits in 0..1u32 << n {
            let from: Vec<u8> = (0..n).map(|i| ((bits >> i) & 1) as u8).collect();
            if let Some(to) = rule(alpha.letter_name(a), &from) {
                transitions.push(AaTransitionJson {
                    letter: alpha.letter_name(a).to_string(),
                    from: from.iter().map(bit).collect(),
                    to: to.iter().map(bit).collect(),
                });
            }
        }
    }
    let procs = alpha.num_processes();
    let j = AaJson {
        alphabet: alpha.to_json(),
        processes: alpha
            .processes()
            .map(|p| {
                (
                    alpha.process_name(p).to_string(),
                    vec!["0".to_string(), "1".to_string()],
                )
            })
            .collect(),
        initial: vec!["0".to_string(); procs],
        transitions,
        accepting: vec![vec!["0".to_string(); procs]],
    };
    Ok(ExplicitAa::from_json(&j)?)
}

fn trimmed_semantics(aa: ExplicitAa) -> Result<Dfa, FixtureError> {
    Ok(AsyncAutomaton::new(aa).global_semantics(DEFAULT_STATE_CAP)?.trim())
}

/// Three singleton bags in a chain `x1 - x2 - x3`: local letters toggle a
/// bit, `s12` clears two set bits and `s23` moves a bit from `x3` to `x2`.
pub fn singleton_chain() -> (Dfa, TreeOfBags) {
    let alpha = Arc::new(
        DistributedAlphabet::from_locs(&[
            ("l1", &["x1"]),
            ("l2", &["x2"]),
            ("l3", &["x3"]),
            ("s12", &["x1", "x2"]),
            ("s23", &["x2", "x3"]),
        ])
        .expect("valid alphabet"),
    );
    let aa = bit_aa(alpha, |a, b| match (a, b) {
        ("l1" | "l2" | "l3", [x]) => Some(vec![1 - x]),
        ("s12", [1, 1]) => Some(vec![0, 0]),
        ("s23", [0, 1]) => Some(vec![1, 0]),
        _ => None,
    })
    .expect("valid AA");
    let tob = TreeOfBags::new(
        &[("B1", &["x1"], "x1"), ("B2", &["x2"], "x2"), ("B3", &["x3"], "x3")],
        &[("x2", "x1"), ("x3", "x2")],
    );
    (trimmed_semantics(aa).expect("small AA"), tob)
}

fn bag_rule(a: &str, b: &[u8]) -> Option<Vec<u8>> {
    match (a, b) {
        ("l1" | "l2", [0]) => Some(vec![1]),
        ("l3", [x]) => Some(vec![1 - x]),
        ("u1" | "u2", [1, o]) => Some(vec![0, 1 - o]),
        ("x" | "y", [p, q]) if p == q => Some(vec![0, 0]),
        _ => None,
    }
}

/// Two bags `{o1, i1}` and `{o2, i2}` joined by `x` between the outer
/// processes.
pub fn two_bags() -> (Dfa, TreeOfBags) {
    let alpha = Arc::new(
        DistributedAlphabet::from_locs(&[
            ("u1", &["o1", "i1"]),
            ("l1", &["i1"]),
            ("u2", &["o2", "i2"]),
            ("l2", &["i2"]),
            ("x", &["o1", "o2"]),
        ])
        .expect("valid alphabet"),
    );
    let aa = bit_aa(alpha, bag_rule).expect("valid AA");
    let tob = TreeOfBags::new(
        &[("B1", &["i1", "o1"], "o1"), ("B2", &["i2", "o2"], "o2")],
        &[("o2", "o1")],
    );
    (trimmed_semantics(aa).expect("small AA"), tob)
}

/// [`two_bags`] with a third singleton bag `{o3}` below `o1`.
pub fn three_bags() -> (Dfa, TreeOfBags) {
    let alpha = Arc::new(
        DistributedAlphabet::from_locs(&[
            ("u1", &["o1", "i1"]),
            ("l1", &["i1"]),
            ("u2", &["o2", "i2"]),
            ("l2", &["i2"]),
            ("x", &["o1", "o2"]),
            ("l3", &["o3"]),
            ("y", &["o1", "o3"]),
        ])
        .expect("valid alphabet"),
    );
    let aa = bit_aa(alpha, bag_rule).expect("valid AA");
    let tob = TreeOfBags::new(
        &[
            ("B1", &["i1", "o1"], "o1"),
            ("B2", &["i2", "o2"], "o2"),
            ("B3", &["o3"], "o3"),
        ],
        &[("o2", "o1"), ("o3", "o1")],
    );
    (trimmed_semantics(aa).expect("small AA"), tob)
}

/// A six-bag architecture: outer processes `o0..o5` with tree edges
/// `o0-o1`, `o0-o2`, `o1-o3`, `o1-o4`, `o2-o5`; bag 0 holds a triangle with
/// two inner processes and bag 1 one inner process.
pub fn six_bag_architecture() -> (DistributedAlphabet, TreeOfBags) {
    let alpha = DistributedAlphabet::from_locs(&[
        ("a0", &["o0", "i0"]),
        ("b0", &["i0", "j0"]),
        ("c0", &["o0", "j0"]),
        ("a1", &["o1", "i1"]),
        ("l2", &["o2"]),
        ("l3", &["o3"]),
        ("l4", &["o4"]),
        ("l5", &["o5"]),
        ("e1", &["o0", "o1"]),
        ("e2", &["o0", "o2"]),
        ("e3", &["o1", "o3"]),
        ("e4", &["o1", "o4"]),
        ("e5", &["o2", "o5"]),
    ])
    .expect("valid alphabet");
    let tob = TreeOfBags::new(
        &[
            ("B0", &["o0", "i0", "j0"], "o0"),
            ("B1", &["o1", "i1"], "o1"),
            ("B2", &["o2"], "o2"),
            ("B3", &["o3"], "o3"),
            ("B4", &["o4"], "o4"),
            ("B5", &["o5"], "o5"),
        ],
        &[("o1", "o0"), ("o2", "o0"), ("o3", "o1"), ("o4", "o1"), ("o5", "o2")],
    );
    (alpha, tob)
}
