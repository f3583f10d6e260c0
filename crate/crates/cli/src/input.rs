//! Resolving `--word`, `--formula`, `--automaton` and `--sig` arguments.

use std::path::Path;
use std::sync::Arc;

use cra_core::automata::Cra;
use cra_core::corpus::{self, Fixture, FixtureKind};
use cra_core::logic::{check_against, parse, Formula};
use cra_core::{Alphabet, DataWord, Signature};

use crate::Failure;

fn read(path: &str) -> Result<Option<String>, Failure> {
    if !Path::new(path).is_file() {
        return Ok(None);
    }
    std::fs::read_to_string(path)
        .map(Some)
        .map_err(|e| Failure::usage(format!("{path}: {e}")))
}

fn fixture(arg: &str, kind: &[FixtureKind]) -> Result<Option<&'static Fixture>, Failure> {
    let Some(name) = arg.strip_prefix("fix:") else {
        return Ok(None);
    };
    let f = corpus::fixture(name)
        .or_else(|| corpus::fixture(&format!("{name}-automaton")))
        .or_else(|| corpus::fixture(&format!("{name}-word")))
        .filter(|f| kind.contains(&f.kind))
        .ok_or_else(|| Failure::usage(format!("no {} fixture `{name}`", kind_name(kind))))?;
    Ok(Some(f))
}

fn kind_name(kind: &[FixtureKind]) -> &'static str {
    kind.first().map_or("", |k| k.as_str())
}

/// Builds an alphabet from `--alphabet` and `--m`.
pub fn alphabet_flags(
    labels: &[String],
    m: Option<usize>,
) -> Result<Option<Arc<Alphabet>>, Failure> {
    if labels.is_empty() {
        return Ok(None);
    }
    let labels: Vec<String> = labels
        .iter()
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    Alphabet::new(labels, m.unwrap_or(1))
        .map(|a| Some(Arc::new(a)))
        .map_err(|e| Failure::usage(e.to_string()))
}

/// Signature by built-in name, or a file whose first non-comment line is
/// one.
pub fn signature(arg: &str) -> Result<Signature, Failure> {
    let name = match read(arg)? {
        Some(text) => text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .unwrap_or("")
            .to_string(),
        None => arg.to_string(),
    };
    Signature::builtin_by_name(&name).map_err(|e| Failure::usage(e.to_string()))
}

pub struct LoadedWord {
    pub word: DataWord,
    pub fixture: Option<&'static Fixture>,
}

/// Labels in order of first occurrence and the common tuple width of an
/// inline word.
fn infer_alphabet(text: &str) -> Result<Arc<Alphabet>, Failure> {
    let mut labels: Vec<String> = Vec::new();
    let mut m = None;
    for tok in text.split(')') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let inner = tok
            .strip_prefix('(')
            .ok_or_else(|| Failure::usage(format!("bad inline word near `{tok}`")))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if m.is_some_and(|m| m != parts.len() - 1) {
            return Err(Failure::usage("inline word mixes tuple widths"));
        }
        m = Some(parts.len() - 1);
        if !labels.iter().any(|l| l == parts[0]) {
            labels.push(parts[0].to_string());
        }
    }
    if labels.is_empty() {
        return Err(Failure::usage(
            "cannot infer an alphabet from the empty word; pass --alphabet",
        ));
    }
    Alphabet::new(labels, m.unwrap_or(0))
        .map(Arc::new)
        .map_err(|e| Failure::usage(e.to_string()))
}

/// `fix:name`, a file in the word format, or an inline word such as
/// `(r,8)(a,5)`, read over `alphabet` when one is known.
pub fn word(arg: &str, alphabet: Option<&Arc<Alphabet>>) -> Result<LoadedWord, Failure> {
    if let Some(f) = fixture(arg, &[FixtureKind::Word, FixtureKind::WordFamily])? {
        let word = f.word().expect("word fixture");
        return Ok(LoadedWord {
            word: rebase(word, alphabet)?,
            fixture: Some(f),
        });
    }
    let word = match read(arg)? {
        Some(text) => DataWord::parse(&text).map_err(|e| Failure::usage(format!("{arg}: {e}")))?,
        None => {
            let text = arg.trim().trim_start_matches('<').trim_end_matches('>');
            let ab = match alphabet {
                Some(a) => a.clone(),
                None => infer_alphabet(text)?,
            };
            DataWord::parse_compact(ab, text).map_err(|e| Failure::usage(e.to_string()))?
        }
    };
    Ok(LoadedWord {
        word: rebase(word, alphabet)?,
        fixture: None,
    })
}

/// Reads `w` over `alphabet` when their labels and arity agree up to order.
fn rebase(w: DataWord, alphabet: Option<&Arc<Alphabet>>) -> Result<DataWord, Failure> {
    let Some(ab) = alphabet else { return Ok(w) };
    if w.alphabet() == ab {
        return Ok(w);
    }
    if ab.m() != w.m() {
        return Err(Failure::usage(format!(
            "word has data arity {}, expected {}",
            w.m(),
            ab.m()
        )));
    }
    DataWord::from_named(
        ab.clone(),
        (1..=w.len()).map(|i| (w.label_name(i), w.letter(i).data.clone())),
    )
    .map_err(|e| Failure::usage(e.to_string()))
}

pub struct LoadedFormula {
    pub formula: Formula,
    pub fixture: Option<&'static Fixture>,
}

/// `fix:name`, a file, or the formula text itself.
pub fn formula(arg: &str) -> Result<LoadedFormula, Failure> {
    if let Some(f) = fixture(arg, &[FixtureKind::Formula])? {
        return Ok(LoadedFormula {
            formula: f.formula().expect("formula fixture"),
            fixture: Some(f),
        });
    }
    let text = read(arg)?.unwrap_or_else(|| arg.to_string());
    let formula = parse(text.trim()).map_err(|e| Failure::usage(format!("formula: {e}")))?;
    Ok(LoadedFormula {
        formula,
        fixture: None,
    })
}

pub fn automaton(arg: &str) -> Result<Cra, Failure> {
    if let Some(f) = fixture(arg, &[FixtureKind::Automaton])? {
        return Ok(f.automaton().expect("automaton fixture"));
    }
    let text = read(arg)?.ok_or_else(|| Failure::usage(format!("{arg}: no such file")))?;
    Cra::parse(&text).map_err(|e| Failure::usage(format!("{arg}: {e}")))
}

/// Signature from `--sig`, falling back to the fixtures involved.
pub fn pick_signature(
    flag: Option<&str>,
    fixtures: &[Option<&'static Fixture>],
) -> Result<Signature, Failure> {
    if let Some(s) = flag {
        return signature(s);
    }
    fixtures
        .iter()
        .flatten()
        .next()
        .map(|f| f.signature())
        .ok_or_else(|| Failure::usage("--sig is required"))
}

pub fn check_formula(f: &Formula, sig: &Signature, ab: &Alphabet) -> Result<(), Failure> {
    check_against(f, &sig.symbol_names(), ab.labels(), ab.m())
        .map_err(|e| Failure::usage(format!("formula: {e}")))
}
