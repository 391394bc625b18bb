//! Loading inputs, writing outputs and exit-code classification.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fairsynth::aa::{AaJson, AsyncAutomaton, ExplicitAa};
use fairsynth::alphabet::{AlphabetJson, DistributedAlphabet};
use fairsynth::dfa::{Dfa, DfaJson, SpecJson};
use fairsynth::treeofbags::TreeOfBags;
use serde_json::Value;

/// A failed command. `Input` covers unreadable or malformed files and
/// maps to exit code 2; `Domain` maps to 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn domain(e: impl fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn invalid(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

/// Loads a specification document, or a bare DFA with a separate alphabet.
pub fn load_spec(spec: &Path, alphabet: Option<&PathBuf>) -> Result<Dfa, CliError> {
    match alphabet {
        None => {
            let j: SpecJson = parse(spec)?;
            j.load().map_err(|e| invalid(spec, e))
        }
        Some(a) => {
            let aj: AlphabetJson = parse(a)?;
            let alpha = DistributedAlphabet::from_json(&aj).map_err(|e| invalid(a, e))?;
            let dj: DfaJson = parse(spec)?;
            Dfa::from_json(Arc::new(alpha), &dj).map_err(|e| invalid(spec, e))
        }
    }
}

pub fn load_arch(path: &Path) -> Result<TreeOfBags, CliError> {
    parse(path)
}

pub fn load_aa_json(path: &Path) -> Result<AaJson, CliError> {
    parse(path)
}

pub fn load_aa(path: &Path) -> Result<AsyncAutomaton<ExplicitAa>, CliError> {
    let j = load_aa_json(path)?;
    let aa = ExplicitAa::from_json(&j).map_err(|e| invalid(path, e))?;
    Ok(AsyncAutomaton::new(aa))
}

/// A specification or an automaton, told apart by their fields.
pub enum Document {
    Spec(Dfa),
    Aa(AsyncAutomaton<ExplicitAa>),
}

pub fn load_document(path: &Path) -> Result<Document, CliError> {
    let v: Value = parse(path)?;
    if v.get("dfa").is_some() {
        let j: SpecJson = serde_json::from_value(v).map_err(|e| invalid(path, e))?;
        Ok(Document::Spec(j.load().map_err(|e| invalid(path, e))?))
    } else {
        let j: AaJson = serde_json::from_value(v).map_err(|e| invalid(path, e))?;
        let aa = ExplicitAa::from_json(&j).map_err(|e| invalid(path, e))?;
        Ok(Document::Aa(AsyncAutomaton::new(aa)))
    }
}

/// Writes `text` to `out`, or to standard output.
pub fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

pub fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
