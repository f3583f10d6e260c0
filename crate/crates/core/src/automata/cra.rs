use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::boolexpr::Bool;
use crate::signature::Signature;
use crate::word::{Alphabet, Label};

/// Guard operand: a current data value or a register read at the
/// predecessor along a symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// `d[k]`, 1-based.
    Data(usize),
    /// `sym.reg`
    Reg(String, String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Data(k) => write!(f, "d[{k}]"),
            Term::Reg(s, r) => write!(f, "{s}.{r}"),
        }
    }
}

/// `θ₁ = θ₂`; true iff both sides are defined and equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardAtom(pub Term, pub Term);

impl fmt::Display for GuardAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.0, self.1)
    }
}

pub type Guard = Bool<GuardAtom>;

/// `q ≤ N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateLe {
    pub state: String,
    pub bound: usize,
}

impl fmt::Display for StateLe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<={}", self.state, self.bound)
    }
}

pub type GlobalCondition = Bool<StateLe>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Update {
    /// `r := sym.r'`
    Forward { sym: String, reg: String },
    /// `r := d[k]@B`: any `k`-th value within distance `B`.
    Guess { k: usize, radius: usize },
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::Forward { sym, reg } => write!(f, "{sym}.{reg}"),
            Update::Guess { k, radius } => write!(f, "d[{k}]@{radius}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    /// `p`: symbol → source state.
    pub sources: BTreeMap<String, String>,
    pub guard: Guard,
    pub label: String,
    pub target: String,
    /// `f`: register → update.
    pub update: BTreeMap<String, Update>,
}

/// A class register automaton.
#[derive(Clone, Debug)]
pub struct Cra {
    pub alphabet: Arc<Alphabet>,
    pub signature: Signature,
    pub states: Vec<String>,
    pub registers: Vec<String>,
    pub transitions: Vec<Transition>,
    /// `F_⊲` per symbol name; a symbol without an entry has `F_⊲ = ∅`.
    pub finals: BTreeMap<String, BTreeSet<String>>,
    pub global: GlobalCondition,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CraError {
    #[error("transition {0}: unknown symbol `{1}`")]
    UnknownSymbol(usize, String),
    #[error("transition {0}: unknown state `{1}`")]
    UnknownState(usize, String),
    #[error("transition {0}: unknown label `{1}`")]
    UnknownLabel(usize, String),
    #[error("transition {0}: unknown register `{1}`")]
    UnknownRegister(usize, String),
    #[error("transition {0}: symbol `{1}` used but not in dom(p)")]
    SymbolNotInDomain(usize, String),
    #[error("transition {0}: data index {1} out of range")]
    DataIndex(usize, usize),
    #[error("final set for unknown symbol `{0}`")]
    FinalSymbol(String),
    #[error("final set mentions unknown state `{0}`")]
    FinalState(String),
    #[error("global condition mentions unknown state `{0}`")]
    GlobalState(String),
    #[error("duplicate state or register `{0}`")]
    Duplicate(String),
    #[error("signature expects data arity {expected}, alphabet has {found}")]
    Arity { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubclassReport {
    /// No register updates at all.
    pub is_cma: bool,
    /// Updates only forward registers or store current values.
    pub is_non_guessing: bool,
    /// Non-guessing over the successor-only signature.
    pub is_register_automaton: bool,
}

impl Cra {
    /// Checks all cross-references and reports the subclass flags.
    pub fn validate(&self) -> Result<SubclassReport, Vec<CraError>> {
        let mut errs = Vec::new();
        let sym_ok = |s: &str| self.signature.symbol_index(s).is_some();
        let state_ok = |q: &str| self.states.iter().any(|x| x == q);
        let reg_ok = |r: &str| self.registers.iter().any(|x| x == r);
        let m = self.alphabet.m();
        if let Some(expected) = self.signature.arity() {
            if expected != m {
                errs.push(CraError::Arity { expected, found: m });
            }
        }
        for (i, name) in self.states.iter().chain(&self.registers).enumerate() {
            if self
                .states
                .iter()
                .chain(&self.registers)
                .take(i)
                .any(|x| x == name)
            {
                errs.push(CraError::Duplicate(name.clone()));
            }
        }
        for (idx, t) in self.transitions.iter().enumerate() {
            let n = idx + 1;
            for (s, q) in &t.sources {
                if !sym_ok(s) {
                    errs.push(CraError::UnknownSymbol(n, s.clone()));
                }
                if !state_ok(q) {
                    errs.push(CraError::UnknownState(n, q.clone()));
                }
            }
            if !state_ok(&t.target) {
                errs.push(CraError::UnknownState(n, t.target.clone()));
            }
            if self.alphabet.label(&t.label).is_none() {
                errs.push(CraError::UnknownLabel(n, t.label.clone()));
            }
            let term_check = |term: &Term, errs: &mut Vec<CraError>| match term {
                Term::Data(k) => {
                    if *k == 0 || *k > m {
                        errs.push(CraError::DataIndex(n, *k));
                    }
                }
                Term::Reg(s, r) => {
                    if !t.sources.contains_key(s) {
                        errs.push(CraError::SymbolNotInDomain(n, s.clone()));
                    }
                    if !reg_ok(r) {
                        errs.push(CraError::UnknownRegister(n, r.clone()));
                    }
                }
            };
            for GuardAtom(a, b) in t.guard.atoms() {
                term_check(a, &mut errs);
                term_check(b, &mut errs);
            }
            for (r, u) in &t.update {
                if !reg_ok(r) {
                    errs.push(CraError::UnknownRegister(n, r.clone()));
                }
                match u {
                    Update::Forward { sym, reg } => {
                        term_check(&Term::Reg(sym.clone(), reg.clone()), &mut errs)
                    }
                    Update::Guess { k, .. } => term_check(&Term::Data(*k), &mut errs),
                }
            }
        }
        for (s, qs) in &self.finals {
            if !sym_ok(s) {
                errs.push(CraError::FinalSymbol(s.clone()));
            }
            for q in qs {
                if !state_ok(q) {
                    errs.push(CraError::FinalState(q.clone()));
                }
            }
        }
        for a in self.global.atoms() {
            if !state_ok(&a.state) {
                errs.push(CraError::GlobalState(a.state.clone()));
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        Ok(self.subclasses())
    }

    pub fn subclasses(&self) -> SubclassReport {
        let is_cma = self.transitions.iter().all(|t| t.update.is_empty());
        let is_non_guessing = self.transitions.iter().all(|t| {
            t.update
                .values()
                .all(|u| !matches!(u, Update::Guess { radius, .. } if *radius > 0))
        });
        SubclassReport {
            is_cma,
            is_non_guessing,
            is_register_automaton: is_non_guessing && self.signature.symbol_names() == ["succ"],
        }
    }

    pub(crate) fn state_index(&self, q: &str) -> usize {
        self.states
            .iter()
            .position(|x| x == q)
            .expect("validated state")
    }

    pub(crate) fn reg_index(&self, r: &str) -> usize {
        self.registers
            .iter()
            .position(|x| x == r)
            .expect("validated register")
    }
}

#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Data(usize),
    Reg(usize, usize),
}

#[derive(Clone, Debug)]
pub(crate) enum CUpdate {
    Forward(usize, usize),
    Guess(usize, usize),
}

/// Index-based form used by run checking and search.
#[derive(Clone, Debug)]
pub(crate) struct CTransition {
    pub sources: Vec<Option<usize>>,
    pub guard: Bool<(CTerm, CTerm)>,
    pub label: Label,
    pub target: usize,
    pub updates: Vec<(usize, CUpdate)>,
}

#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub transitions: Vec<CTransition>,
    /// `finals[s][q]`.
    pub finals: Vec<Vec<bool>>,
}

impl Cra {
    /// Assumes `validate` passed.
    pub(crate) fn compile(&self) -> Compiled {
        let syms = self.signature.len();
        let sym = |s: &str| self.signature.symbol_index(s).expect("validated symbol");
        let term = |t: &Term| match t {
            Term::Data(k) => CTerm::Data(*k - 1),
            Term::Reg(s, r) => CTerm::Reg(sym(s), self.reg_index(r)),
        };
        let transitions = self
            .transitions
            .iter()
            .map(|t| {
                let mut sources = vec![None; syms];
                for (s, q) in &t.sources {
                    sources[sym(s)] = Some(self.state_index(q));
                }
                CTransition {
                    sources,
                    guard: t
                        .guard
                        .map(&mut |GuardAtom(a, b)| Bool::Atom((term(a), term(b)))),
                    label: self.alphabet.label(&t.label).expect("validated label"),
                    target: self.state_index(&t.target),
                    updates: t
                        .update
                        .iter()
                        .map(|(r, u)| {
                            let cu = match u {
                                Update::Forward { sym: s, reg } => {
                                    CUpdate::Forward(sym(s), self.reg_index(reg))
                                }
                                Update::Guess { k, radius } => CUpdate::Guess(*k - 1, *radius),
                            };
                            (self.reg_index(r), cu)
                        })
                        .collect(),
                }
            })
            .collect();
        let finals = self
            .signature
            .symbol_names()
            .iter()
            .map(|s| {
                let set = self.finals.get(*s);
                self.states
                    .iter()
                    .map(|q| set.is_some_and(|f| f.contains(q)))
                    .collect()
            })
            .collect();
        Compiled {
            transitions,
            finals,
        }
    }
}
