//! One function per subcommand. Each returns `Ok(false)` when it ran to
//! completion but the answer is a domain failure.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use fairsynth::aa::{AsyncAutomaton, LocalTransitions};
use fairsynth::alphabet::{DistributedAlphabet, LetterId};
use fairsynth::dfa::{Dfa, DiamondKind};
use fairsynth::fixtures::{self, PhilosopherConfig, PhilosopherLocality};
use fairsynth::synthesis::{synthesize, theorem_bound, CutStrategy, Mode, SynthesisConfig};
use fairsynth::treeofbags::{
    bag_fairness_parameter, resolve, tree_of_bags_bound, validate_architecture, TreeOfBagsSynthesis,
};
use serde_json::{json, Value};

use crate::io::{emit, load_aa, load_arch, load_document, load_spec, pretty, CliError, Document};
use crate::{Command, CutArg, Fixture, LocalityArg, ModeArg, SpecArgs};

pub fn dispatch(command: Command, json: bool) -> Result<bool, CliError> {
    match command {
        Command::Validate { spec, arch } => validate(&spec, arch.as_ref(), json),
        Command::Fairness { spec, arch, witness } => fairness(&spec, arch.as_ref(), witness, json),
        Command::Synthesize {
            spec,
            k,
            mode,
            cut,
            arch,
            bag_k,
            cap,
            out,
        } => {
            let req = SynthRequest {
                k: k.map(|k| k as usize),
                mode,
                cut,
                bag_k,
                cap,
                out,
            };
            synthesize_cmd(&spec, arch.as_ref(), req, json)
        }
        Command::Run { aa, word } => run(&aa, &word, json),
        Command::Explore { aa, steps, seed } => explore(&aa, steps, seed, json),
        Command::Semantics { aa, cap } => semantics(&aa, cap),
        Command::Equiv { aa, spec, cap } => equiv(&aa, &spec, cap, json),
        Command::Dot { input, cap, out } => dot(&input, cap, out.as_ref()),
        Command::Gen { fixture, out } => gen(fixture, out.as_ref()),
    }
}

fn report(json: bool, value: Value, text: String) {
    if json {
        print!("{}", pretty(&value));
    } else {
        println!("{text}");
    }
}

fn spec_of(args: &SpecArgs) -> Result<Dfa, CliError> {
    load_spec(&args.spec, args.alphabet.as_ref())
}

fn word_text(alpha: &DistributedAlphabet, w: &[LetterId]) -> String {
    if w.is_empty() {
        "(empty word)".to_string()
    } else {
        alpha.render_word(w)
    }
}

fn diamond_report(dfa: &Dfa) -> Vec<String> {
    let alpha = dfa.alphabet();
    dfa.check_diamond()
        .iter()
        .map(|v| {
            let (q, a, b) = (dfa.state_name(v.state), alpha.letter_name(v.a), alpha.letter_name(v.b));
            match v.kind {
                DiamondKind::MissingFirst => format!("state {q}: `{a} {b}` is defined but `{b}` is not"),
                DiamondKind::MissingSecond => format!("state {q}: `{a} {b}` is defined but `{b} {a}` is not"),
                DiamondKind::Mismatch => format!("state {q}: `{a} {b}` and `{b} {a}` lead to different states"),
            }
        })
        .collect()
}

fn validate(spec: &SpecArgs, arch: Option<&PathBuf>, json: bool) -> Result<bool, CliError> {
    let dfa = spec_of(spec)?;
    let tob = arch.map(|p| load_arch(p)).transpose()?;
    let diamond = diamond_report(&dfa);
    let (reach, coreach) = (dfa.reachable(), dfa.coreachable());
    let names = |flags: &[bool]| -> Vec<String> {
        dfa.states()
            .filter(|q| !flags[q.index()])
            .map(|q| dfa.state_name(q).to_string())
            .collect()
    };
    let unreachable = names(&reach);
    let dead = names(&coreach);
    let architecture: Vec<String> = tob
        .map(|t| {
            validate_architecture(dfa.alphabet(), &t)
                .iter()
                .map(|v| v.to_string())
                .collect()
        })
        .unwrap_or_default();
    let clean = diamond.is_empty() && unreachable.is_empty() && dead.is_empty() && architecture.is_empty();
    let mut lines = Vec::new();
    lines.extend(diamond.iter().map(|d| format!("diamond violation: {d}")));
    lines.extend(unreachable.iter().map(|q| format!("unreachable state: {q}")));
    lines.extend(dead.iter().map(|q| format!("state cannot reach acceptance: {q}")));
    lines.extend(architecture.iter().map(|v| format!("architecture: {v}")));
    if clean {
        lines.push("clean".to_string());
    }
    report(
        json,
        json!({
            "clean": clean,
            "diamond": diamond,
            "unreachable": unreachable,
            "dead": dead,
            "architecture": architecture,
        }),
        lines.join("\n"),
    );
    Ok(clean)
}

fn ensure_valid(dfa: &Dfa) -> Result<(), CliError> {
    dfa.ensure_diamond().map_err(CliError::domain)?;
    dfa.ensure_trim().map_err(CliError::domain)
}

fn fairness(spec: &SpecArgs, arch: Option<&PathBuf>, witness: Option<u64>, json: bool) -> Result<bool, CliError> {
    let dfa = spec_of(spec)?;
    ensure_valid(&dfa)?;
    let alpha = dfa.alphabet();
    let show = |k: Option<usize>| k.map_or("unfair".to_string(), |k| k.to_string());
    let mut value = json!({});
    let mut lines = Vec::new();
    if let Some(path) = arch {
        let tob = load_arch(path)?;
        let a = resolve(alpha, &tob).map_err(|vs| {
            let msgs: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
            CliError::Domain(format!("invalid architecture: {}", msgs.join("; ")))
        })?;
        let mut bags = serde_json::Map::new();
        for b in 0..a.num_bags() {
            let k = bag_fairness_parameter(&dfa, a.procs[b]).map_err(CliError::domain)?;
            bags.insert(a.names[b].clone(), json!(k));
            lines.push(format!("{}: {}", a.names[b], show(k)));
        }
        value["bags"] = Value::Object(bags);
    } else {
        let k = dfa.fairness_parameter().map_err(CliError::domain)?;
        value["parameter"] = json!(k);
        lines.push(show(k));
    }
    if let Some(k) = witness {
        let w = dfa.unfair_witness(k as usize).map_err(CliError::domain)?;
        match w {
            Some(w) => {
                let p = alpha.process_name(w.process);
                let factor = alpha.render_word(&w.word);
                let start = dfa.state_name(w.start);
                let accepted = word_text(alpha, &w.accepted_word());
                lines.push(format!(
                    "not {k}-fair: `{factor}` from state {start} avoids {p}; accepted word `{accepted}`"
                ));
                value["witness"] = json!({
                    "k": k,
                    "process": p,
                    "start": start,
                    "factor": factor,
                    "accepted_word": accepted,
                });
            }
            None => {
                lines.push(format!("{k}-fair: no witness"));
                value["witness"] = Value::Null;
            }
        }
    }
    report(json, value, lines.join("\n"));
    Ok(true)
}

struct SynthRequest {
    k: Option<usize>,
    mode: ModeArg,
    cut: CutArg,
    bag_k: Vec<String>,
    cap: usize,
    out: Option<PathBuf>,
}

fn parse_bag_k(items: &[String]) -> Result<BTreeMap<String, usize>, CliError> {
    let mut out = BTreeMap::new();
    for item in items {
        let parsed = item.split_once('=').and_then(|(b, k)| {
            k.trim()
                .parse::<usize>()
                .ok()
                .filter(|k| *k >= 1)
                .map(|k| (b.trim(), k))
        });
        match parsed {
            Some((b, k)) if !b.is_empty() => {
                out.insert(b.to_string(), k);
            }
            _ => {
                return Err(CliError::Input(format!(
                    "--bag-k expects BAG=K with K >= 1, got `{item}`"
                )))
            }
        }
    }
    Ok(out)
}

fn synthesize_cmd(spec: &SpecArgs, arch: Option<&PathBuf>, req: SynthRequest, json: bool) -> Result<bool, CliError> {
    let dfa = Arc::new(spec_of(spec)?);
    let n = dfa.num_states();
    let sigma = dfa.alphabet().num_letters();
    let mut stats = serde_json::Map::new();
    let mut lines = Vec::new();
    if let Some(path) = arch {
        if req.k.is_some() || matches!(req.mode, ModeArg::Unfair) || matches!(req.cut, CutArg::Optimised) {
            return Err(CliError::Input(
                "--k, --mode unfair and --cut optimised do not apply with --arch; use --bag-k".to_string(),
            ));
        }
        let tob = load_arch(path)?;
        let overrides = parse_bag_k(&req.bag_k)?;
        let syn = TreeOfBagsSynthesis::new(dfa.clone(), &tob, &overrides).map_err(CliError::domain)?;
        let a = syn.architecture().clone();
        let ks = syn.bag_parameters().to_vec();
        let bounds: Vec<u128> = dfa
            .alphabet()
            .processes()
            .map(|p| tree_of_bags_bound(n, ks[a.bag_of[p.index()]], sigma, a.is_outer(p)))
            .collect();
        let params: BTreeMap<&str, usize> = a.names.iter().map(|s| s.as_str()).zip(ks.iter().copied()).collect();
        lines.push(format!(
            "bag parameters: {}",
            params
                .iter()
                .map(|(b, k)| format!("{b} {k}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
        stats.insert("bag_parameters".to_string(), json!(params));
        finish(syn.into_automaton(), &bounds, req, stats, lines, json)
    } else {
        if !req.bag_k.is_empty() {
            return Err(CliError::Input("--bag-k needs --arch".to_string()));
        }
        ensure_valid(&dfa)?;
        let k = match req.k {
            Some(k) => k,
            None => dfa.fairness_parameter().map_err(CliError::domain)?.ok_or_else(|| {
                CliError::Domain("the specification is unfair; pass --k with --mode unfair".to_string())
            })?,
        };
        let mode = match req.mode {
            ModeArg::Fair => Mode::Fair,
            ModeArg::Unfair => Mode::Unfair,
        };
        let cut = match req.cut {
            CutArg::Standard => CutStrategy::Standard,
            CutArg::Optimised => CutStrategy::Optimised,
        };
        let config = SynthesisConfig::new(k).with_mode(mode).with_cut(cut);
        let aa = synthesize(dfa.clone(), config).map_err(CliError::domain)?;
        let bound = theorem_bound(n, k, sigma);
        let bounds = vec![bound; dfa.alphabet().num_processes()];
        lines.push(format!("k = {k}, mode {mode:?}, cut {cut:?}").to_lowercase());
        stats.insert("k".to_string(), json!(k));
        stats.insert("mode".to_string(), json!(format!("{mode:?}").to_lowercase()));
        stats.insert("cut".to_string(), json!(format!("{cut:?}").to_lowercase()));
        finish(aa, &bounds, req, stats, lines, json)
    }
}

fn finish<T: LocalTransitions>(
    mut aa: AsyncAutomaton<T>,
    bounds: &[u128],
    req: SynthRequest,
    mut stats: serde_json::Map<String, Value>,
    mut lines: Vec<String>,
    json: bool,
) -> Result<bool, CliError> {
    let (globals, _) = aa.explore_reachable(req.cap).map_err(CliError::domain)?;
    let dump = aa.to_json(req.cap).map_err(CliError::domain)?;
    let alpha = aa.alphabet().clone();
    let mut counts = serde_json::Map::new();
    let mut bound_map = serde_json::Map::new();
    let mut count_text = Vec::new();
    let mut bound_text = Vec::new();
    for p in alpha.processes() {
        let name = alpha.process_name(p);
        let c = dump.processes.get(name).map_or(0, |v| v.len());
        let b = bounds[p.index()];
        counts.insert(name.to_string(), json!(c));
        bound_map.insert(name.to_string(), json!(b.to_string()));
        count_text.push(format!("{name} {c}"));
        bound_text.push(format!("{name} {b}"));
    }
    lines.push(format!("global states: {}", globals.len()));
    lines.push(format!("local states per process: {}", count_text.join(", ")));
    lines.push(format!("bound per process: {}", bound_text.join(", ")));
    stats.insert("global_states".to_string(), json!(globals.len()));
    stats.insert("local_states".to_string(), Value::Object(counts));
    stats.insert("bound".to_string(), Value::Object(bound_map));
    let automaton = pretty(&dump);
    match (&req.out, json) {
        (Some(p), _) => {
            emit(Some(p), &automaton)?;
            report(json, Value::Object(stats), lines.join("\n"));
        }
        (None, true) => {
            stats.insert(
                "automaton".to_string(),
                serde_json::to_value(&dump).expect("serializable"),
            );
            report(true, Value::Object(stats), String::new());
        }
        (None, false) => {
            emit(None, &automaton)?;
            eprintln!("{}", lines.join("\n"));
        }
    }
    Ok(true)
}

fn local_names<T: LocalTransitions>(aa: &AsyncAutomaton<T>, g: &[u32]) -> Vec<String> {
    aa.alphabet()
        .processes()
        .map(|p| aa.inner().render_local(p, aa.local(p, g[p.index()])))
        .collect()
}

fn run(path: &PathBuf, word: &str, json: bool) -> Result<bool, CliError> {
    let mut aa = load_aa(path)?;
    let alpha = aa.alphabet().clone();
    let w = alpha.parse_word(word).map_err(|e| CliError::Input(e.to_string()))?;
    let r = aa.run(&w);
    let verdict = match r.refused_at {
        Some(i) => format!("refused at position {i} (letter {})", alpha.letter_name(w[i])),
        None if r.accepted => "accepted".to_string(),
        None => "rejected".to_string(),
    };
    report(
        json,
        json!({
            "state": local_names(&aa, &r.last),
            "accepted": r.accepted,
            "refused_at": r.refused_at,
        }),
        format!("state: {}\n{verdict}", aa.render_global(&r.last)),
    );
    Ok(true)
}

fn explore(path: &PathBuf, steps: usize, seed: u64, json: bool) -> Result<bool, CliError> {
    let mut aa = load_aa(path)?;
    let alpha = aa.alphabet().clone();
    let e = aa.random_explore(steps, seed);
    let word = alpha.render_word(&e.word);
    let last = e.accepted.last().copied().unwrap_or(false);
    let hits = e.accepted.iter().filter(|b| **b).count();
    let mut text = format!(
        "word: {}\naccepting prefixes: {hits} of {}\nfinal: {}",
        word_text(&alpha, &e.word),
        e.accepted.len(),
        if last { "accepted" } else { "rejected" }
    );
    if e.deadlock {
        text.push_str("\ndeadlock");
    }
    report(
        json,
        json!({ "word": word, "accepted": e.accepted, "deadlock": e.deadlock }),
        text,
    );
    Ok(true)
}

fn semantics(path: &PathBuf, cap: usize) -> Result<bool, CliError> {
    let mut aa = load_aa(path)?;
    let dfa = aa.global_semantics(cap).map_err(CliError::domain)?;
    emit(None, &pretty(&dfa.to_spec_json()))?;
    Ok(true)
}

fn equiv(path: &PathBuf, spec: &SpecArgs, cap: usize, json: bool) -> Result<bool, CliError> {
    let mut aa = load_aa(path)?;
    let dfa = spec_of(spec)?;
    let sem = aa.global_semantics(cap).map_err(CliError::domain)?;
    let diff = sem.equivalent(&dfa).map_err(CliError::domain)?;
    match diff {
        None => {
            report(json, json!({ "equivalent": true }), "EQUIVALENT".to_string());
            Ok(true)
        }
        Some(w) => {
            let word = dfa.alphabet().render_word(&w);
            report(
                json,
                json!({ "equivalent": false, "separating_word": word }),
                format!("DIFFERENT: separating word `{}`", word_text(dfa.alphabet(), &w)),
            );
            Ok(false)
        }
    }
}

fn dot(input: &PathBuf, cap: usize, out: Option<&PathBuf>) -> Result<bool, CliError> {
    let text = match load_document(input)? {
        Document::Spec(dfa) => dfa.to_dot(None),
        Document::Aa(mut aa) => aa.to_dot(cap).map_err(CliError::domain)?,
    };
    emit(out, &text)?;
    Ok(true)
}

fn gen(fixture: Fixture, out: Option<&PathBuf>) -> Result<bool, CliError> {
    let dfa = match fixture {
        Fixture::Fig1 => fixtures::fig1(),
        Fixture::Fig3 => fixtures::fig3(),
        Fixture::AppendixG => fixtures::appendix_g(),
        Fixture::Example8 { n } => fixtures::example8(n).map_err(CliError::domain)?,
        Fixture::Lowerbound { n } => fixtures::lower_bound_ln(n).map_err(CliError::domain)?,
        Fixture::Philosophers { n, strict, locality } => {
            let cfg = PhilosopherConfig {
                strict_eat: strict,
                locality: match locality {
                    LocalityArg::Neighbourhood => PhilosopherLocality::Neighbourhood,
                    LocalityArg::Chopstick => PhilosopherLocality::Chopstick,
                },
                ..PhilosopherConfig::new(n)
            };
            fixtures::philosophers(&cfg).map_err(CliError::domain)?
        }
    };
    emit(out, &pretty(&dfa.to_spec_json()))?;
    Ok(true)
}
