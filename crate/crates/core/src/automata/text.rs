//! Automaton text format.
//!
//! ```text
//! alphabet: r a
//! m: 1
//! signature: succ-cls1
//! states: q1 q2
//! registers: r1 r2
//! transitions:
//! [] true "r" -> q1 {r1 := d[1]@0}
//! [cls1=q1, succ=q1] cls1.r2 = bot "a" -> q2 {r1 := d[1]@0}
//! final[cls1]: q2
//! global: !(q1<=0)
//! ```
//!
//! An optional `gamma: g1 g2 …` line turns the alphabet into `Σ × Γ` (labels
//! `a:g`) and the signature into its extension `S_Γ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::cra::{Cra, GuardAtom, StateLe, Term, Transition, Update};
use crate::boolexpr::{Bool, BoolParser};
use crate::signature::Signature;
use crate::word::Alphabet;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct CraFormatError {
    pub line: usize,
    pub msg: String,
}

fn ferr<T>(line: usize, msg: impl Into<String>) -> Result<T, CraFormatError> {
    Err(CraFormatError {
        line,
        msg: msg.into(),
    })
}

fn parse_term(t: &str) -> Result<Term, String> {
    let t = t.trim();
    if let Some(k) = t.strip_prefix("d[").and_then(|r| r.strip_suffix(']')) {
        return k
            .parse()
            .map(Term::Data)
            .map_err(|_| format!("bad data index in `{t}`"));
    }
    match t.split_once('.') {
        Some((s, r)) if !s.is_empty() && !r.is_empty() => {
            Ok(Term::Reg(s.trim().to_string(), r.trim().to_string()))
        }
        _ => Err(format!("bad guard term `{t}`")),
    }
}

pub(crate) fn parse_guard(text: &str) -> Result<Bool<GuardAtom>, String> {
    BoolParser::parse(text, |atom: &str| {
        let (l, r) = atom
            .split_once('=')
            .ok_or_else(|| format!("expected `=` in `{atom}`"))?;
        let left = parse_term(l)?;
        if r.trim() == "bot" {
            // `θ = ⊥` abbreviates `¬(θ = θ)`.
            return Ok(Bool::Not(Box::new(Bool::Atom(GuardAtom(
                left.clone(),
                left,
            )))));
        }
        Ok(Bool::Atom(GuardAtom(left, parse_term(r)?)))
    })
}

pub(crate) fn parse_global(text: &str) -> Result<Bool<StateLe>, String> {
    BoolParser::parse(text, |atom: &str| {
        let (q, n) = atom
            .split_once("<=")
            .ok_or_else(|| format!("expected `q<=N`, found `{atom}`"))?;
        let bound = n
            .trim()
            .parse()
            .map_err(|_| format!("bad bound in `{atom}`"))?;
        Ok(Bool::Atom(StateLe {
            state: q.trim().to_string(),
            bound,
        }))
    })
}

fn parse_transition(line: &str) -> Result<Transition, String> {
    let rest = line
        .trim()
        .strip_prefix('[')
        .ok_or("transition must start with `[`")?;
    let (src, rest) = rest.split_once(']').ok_or("missing `]`")?;
    let mut sources = BTreeMap::new();
    for part in src.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (s, q) = part
            .split_once('=')
            .ok_or_else(|| format!("bad source `{part}`"))?;
        if sources
            .insert(s.trim().to_string(), q.trim().to_string())
            .is_some()
        {
            return Err(format!("symbol `{}` listed twice", s.trim()));
        }
    }
    let q1 = rest.find('"').ok_or("missing quoted label")?;
    let guard_text = rest[..q1].trim();
    let after = &rest[q1 + 1..];
    let q2 = after.find('"').ok_or("unterminated label")?;
    let label = after[..q2].to_string();
    let after = after[q2 + 1..].trim();
    let after = after.strip_prefix("->").ok_or("expected `->`")?.trim();
    let (target, upd) = match after.find('{') {
        Some(b) => (after[..b].trim(), Some(&after[b..])),
        None => (after, None),
    };
    if target.is_empty() || target.contains(char::is_whitespace) {
        return Err(format!("bad target `{target}`"));
    }
    let guard = if guard_text.is_empty() {
        Bool::True
    } else {
        parse_guard(guard_text)?
    };
    let mut update = BTreeMap::new();
    if let Some(u) = upd {
        let body = u
            .trim()
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or("bad update block")?;
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (r, src) = part
                .split_once(":=")
                .ok_or_else(|| format!("bad update `{part}`"))?;
            let src = src.trim();
            let u = if let Some(g) = src.strip_prefix("d[") {
                let (k, b) = g
                    .split_once("]@")
                    .ok_or_else(|| format!("bad guess `{src}`"))?;
                Update::Guess {
                    k: k.parse().map_err(|_| format!("bad index `{k}`"))?,
                    radius: b.parse().map_err(|_| format!("bad radius `{b}`"))?,
                }
            } else {
                let (s, reg) = src
                    .split_once('.')
                    .ok_or_else(|| format!("bad update source `{src}`"))?;
                Update::Forward {
                    sym: s.trim().to_string(),
                    reg: reg.trim().to_string(),
                }
            };
            if update.insert(r.trim().to_string(), u).is_some() {
                return Err(format!("register `{}` updated twice", r.trim()));
            }
        }
    }
    Ok(Transition {
        sources,
        guard,
        label,
        target: target.to_string(),
        update,
    })
}

impl Cra {
    /// Parses the text format. Cross-references are checked by `validate`.
    pub fn parse(text: &str) -> Result<Cra, CraFormatError> {
        let mut labels: Option<Vec<String>> = None;
        let mut gamma: Option<Vec<String>> = None;
        let mut m: Option<usize> = None;
        let mut sig: Option<Signature> = None;
        let mut states = Vec::new();
        let mut registers = Vec::new();
        let mut transitions = Vec::new();
        let mut finals: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut global = Bool::True;
        let mut in_transitions = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(c) => &raw[..c],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            if in_transitions && content.starts_with('[') {
                transitions.push(parse_transition(content).or_else(|e| ferr(line, e))?);
                continue;
            }
            in_transitions = false;
            let Some((key, value)) = content.split_once(':') else {
                return ferr(line, format!("expected `key: value`, found `{content}`"));
            };
            let value = value.trim();
            let words = || {
                value
                    .split_whitespace()
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            };
            match key.trim() {
                "alphabet" => labels = Some(words()),
                "gamma" => gamma = Some(words()),
                "m" => {
                    m = Some(
                        value
                            .parse()
                            .or_else(|_| ferr(line, format!("bad arity `{value}`")))?,
                    )
                }
                "signature" => {
                    sig = Some(
                        Signature::builtin_by_name(value).or_else(|e| ferr(line, e.to_string()))?,
                    )
                }
                "states" => states = words(),
                "registers" => registers = words(),
                "transitions" => {
                    if !value.is_empty() {
                        return ferr(line, "transitions go on the following lines");
                    }
                    in_transitions = true;
                }
                "global" => global = parse_global(value).or_else(|e| ferr(line, e))?,
                k => {
                    let Some(sym) = k.strip_prefix("final[").and_then(|s| s.strip_suffix(']'))
                    else {
                        return ferr(line, format!("unknown key `{k}`"));
                    };
                    finals.entry(sym.to_string()).or_default().extend(words());
                }
            }
        }
        let sig = sig.ok_or(CraFormatError {
            line: 0,
            msg: "missing `signature:`".into(),
        })?;
        let labels = labels.ok_or(CraFormatError {
            line: 0,
            msg: "missing `alphabet:`".into(),
        })?;
        let m = m.or(sig.arity()).unwrap_or(1);
        let base = Arc::new(Alphabet::new(labels, m).or_else(|e| ferr(0, e.to_string()))?);
        let (alphabet, signature) = match gamma {
            Some(g) => (
                Arc::new(Alphabet::extend(&base, g).or_else(|e| ferr(0, e.to_string()))?),
                sig.extended(),
            ),
            None => (base, sig),
        };
        Ok(Cra {
            alphabet,
            signature,
            states,
            registers,
            transitions,
            finals,
            global,
        })
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let src: Vec<String> = self
            .sources
            .iter()
            .map(|(s, q)| format!("{s}={q}"))
            .collect();
        write!(
            f,
            "[{}] {} \"{}\" -> {}",
            src.join(", "),
            self.guard,
            self.label,
            self.target
        )?;
        if !self.update.is_empty() {
            let ups: Vec<String> = self
                .update
                .iter()
                .map(|(r, u)| format!("{r} := {u}"))
                .collect();
            write!(f, " {{{}}}", ups.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for Cra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alphabet.projection() {
            Some(p) => {
                writeln!(f, "alphabet: {}", p.base.labels().join(" "))?;
                writeln!(f, "gamma: {}", p.gamma.join(" "))?;
            }
            None => writeln!(f, "alphabet: {}", self.alphabet.labels().join(" "))?,
        }
        writeln!(f, "m: {}", self.alphabet.m())?;
        let sig_name = self.signature.base().unwrap_or(&self.signature).name();
        writeln!(f, "signature: {sig_name}")?;
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "registers: {}", self.registers.join(" "))?;
        writeln!(f, "transitions:")?;
        for t in &self.transitions {
            writeln!(f, "{t}")?;
        }
        for (s, qs) in &self.finals {
            writeln!(
                f,
                "final[{s}]: {}",
                qs.iter().cloned().collect::<Vec<_>>().join(" ")
            )?;
        }
        writeln!(f, "global: {}", self.global)
    }
}
