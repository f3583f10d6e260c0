//! Union, intersection and projection of automata, plus the automaton that
//! accepts exactly the words equivalent to a given one.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::cra::{Cra, GlobalCondition, GuardAtom, StateLe, Term, Transition, Update};
use crate::boolexpr::Bool;
use crate::graph::{build_graph, GraphError};
use crate::signature::Signature;
use crate::word::DataWord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClosureError {
    #[error("signatures differ: `{0}` vs `{1}`")]
    Signature(String, String),
    #[error("alphabets differ")]
    Alphabet,
    #[error("automaton is not over an extended alphabet Σ × Γ")]
    NotExtended,
}

fn same_signature(a: &Signature, b: &Signature) -> bool {
    a.name() == b.name() && a.symbol_names() == b.symbol_names()
}

fn compatible(a1: &Cra, a2: &Cra) -> Result<(), ClosureError> {
    if !same_signature(&a1.signature, &a2.signature) {
        return Err(ClosureError::Signature(
            a1.signature.name().into(),
            a2.signature.name().into(),
        ));
    }
    if a1.alphabet != a2.alphabet {
        return Err(ClosureError::Alphabet);
    }
    Ok(())
}

/// Renames states and registers of `a` with `prefix`.
fn prefixed(a: &Cra, prefix: &str) -> Cra {
    let st = |q: &String| format!("{prefix}{q}");
    let term = |t: &Term| match t {
        Term::Data(k) => Term::Data(*k),
        Term::Reg(s, r) => Term::Reg(s.clone(), format!("{prefix}{r}")),
    };
    Cra {
        alphabet: a.alphabet.clone(),
        signature: a.signature.clone(),
        states: a.states.iter().map(st).collect(),
        registers: a.registers.iter().map(st).collect(),
        transitions: a
            .transitions
            .iter()
            .map(|t| Transition {
                sources: t.sources.iter().map(|(s, q)| (s.clone(), st(q))).collect(),
                guard: t
                    .guard
                    .map(&mut |GuardAtom(x, y)| Bool::Atom(GuardAtom(term(x), term(y)))),
                label: t.label.clone(),
                target: st(&t.target),
                update: t
                    .update
                    .iter()
                    .map(|(r, u)| {
                        let u = match u {
                            Update::Forward { sym, reg } => Update::Forward {
                                sym: sym.clone(),
                                reg: format!("{prefix}{reg}"),
                            },
                            g => g.clone(),
                        };
                        (st(r), u)
                    })
                    .collect(),
            })
            .collect(),
        finals: a
            .finals
            .iter()
            .map(|(s, qs)| (s.clone(), qs.iter().map(st).collect()))
            .collect(),
        global: a.global.map(&mut |l| {
            Bool::Atom(StateLe {
                state: st(&l.state),
                bound: l.bound,
            })
        }),
    }
}

fn all_unused(states: &[String]) -> GlobalCondition {
    Bool::and(states.iter().map(|q| {
        Bool::Atom(StateLe {
            state: q.clone(),
            bound: 0,
        })
    }))
}

/// Disjoint union. A run with no predecessors anywhere could mix both
/// components, so `Φ` also requires one side to be unused.
pub fn union(a1: &Cra, a2: &Cra) -> Result<Cra, ClosureError> {
    compatible(a1, a2)?;
    let b1 = prefixed(a1, "1.");
    let b2 = prefixed(a2, "2.");
    let global = Bool::or([
        Bool::and([b1.global.clone(), all_unused(&b2.states)]),
        Bool::and([b2.global.clone(), all_unused(&b1.states)]),
    ]);
    let mut finals = b1.finals.clone();
    for (s, qs) in &b2.finals {
        finals
            .entry(s.clone())
            .or_default()
            .extend(qs.iter().cloned());
    }
    Ok(Cra {
        alphabet: b1.alphabet.clone(),
        signature: b1.signature.clone(),
        states: b1.states.iter().chain(&b2.states).cloned().collect(),
        registers: b1.registers.iter().chain(&b2.registers).cloned().collect(),
        transitions: b1
            .transitions
            .iter()
            .chain(&b2.transitions)
            .cloned()
            .collect(),
        finals,
        global,
    })
}

fn pair(q1: &str, q2: &str) -> String {
    format!("{q1}/{q2}")
}

/// All vectors of `parts` non-negative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `Σ_{q'} count(pair(q, q')) ≤ N` over product states; `on_left` says
/// whether `q` is the first component.
fn sum_le(q: &str, others: &[String], bound: usize, on_left: bool) -> GlobalCondition {
    let name = |o: &String| if on_left { pair(q, o) } else { pair(o, q) };
    let ge = |o: &String, k: usize| {
        if k == 0 {
            Bool::True
        } else {
            Bool::not(Bool::Atom(StateLe {
                state: name(o),
                bound: k - 1,
            }))
        }
    };
    let exceeds = Bool::or(
        compositions(bound + 1, others.len())
            .into_iter()
            .map(|ks| Bool::and(others.iter().zip(ks).map(|(o, k)| ge(o, k)))),
    );
    Bool::not(exceeds)
}

/// Product construction with disjoint registers. Two transitions combine
/// when they read the same label and have the same `dom(p)`.
pub fn intersect(a1: &Cra, a2: &Cra) -> Result<Cra, ClosureError> {
    compatible(a1, a2)?;
    let b1 = prefixed(a1, "1.");
    let b2 = prefixed(a2, "2.");
    let states = a1
        .states
        .iter()
        .flat_map(|q1| a2.states.iter().map(move |q2| pair(q1, q2)))
        .collect();
    let mut transitions = Vec::new();
    for (t1, u1) in a1.transitions.iter().zip(&b1.transitions) {
        for (t2, u2) in a2.transitions.iter().zip(&b2.transitions) {
            if t1.label != t2.label || !t1.sources.keys().eq(t2.sources.keys()) {
                continue;
            }
            let sources = t1
                .sources
                .iter()
                .map(|(s, q1)| (s.clone(), pair(q1, &t2.sources[s])))
                .collect();
            let mut update = u1.update.clone();
            update.extend(u2.update.clone());
            transitions.push(Transition {
                sources,
                guard: Bool::and([u1.guard.clone(), u2.guard.clone()]),
                label: t1.label.clone(),
                target: pair(&t1.target, &t2.target),
                update,
            });
        }
    }
    let empty = BTreeSet::new();
    let mut finals = BTreeMap::new();
    for s in a1.signature.symbol_names() {
        let f1 = a1.finals.get(s).unwrap_or(&empty);
        let f2 = a2.finals.get(s).unwrap_or(&empty);
        let prod: BTreeSet<String> = f1
            .iter()
            .flat_map(|q1| f2.iter().map(move |q2| pair(q1, q2)))
            .collect();
        if !prod.is_empty() {
            finals.insert(s.to_string(), prod);
        }
    }
    let g1 = a1
        .global
        .map(&mut |l| sum_le(&l.state, &a2.states, l.bound, true));
    let g2 = a2
        .global
        .map(&mut |l| sum_le(&l.state, &a1.states, l.bound, false));
    Ok(Cra {
        alphabet: a1.alphabet.clone(),
        signature: a1.signature.clone(),
        states,
        registers: b1.registers.iter().chain(&b2.registers).cloned().collect(),
        transitions,
        finals,
        global: Bool::and([g1, g2]),
    })
}

/// `proj_Σ`: from an automaton over `Σ × Γ` and `S_Γ` to one over `Σ` and
/// `S`. Each transition keeps its shape and forgets the Γ component of its
/// label; the run then chooses the annotation nondeterministically.
pub fn project(a: &Cra) -> Result<Cra, ClosureError> {
    let proj = a.alphabet.projection().ok_or(ClosureError::NotExtended)?;
    let base_sig = a.signature.base().ok_or(ClosureError::NotExtended)?;
    let mut transitions: Vec<Transition> = Vec::new();
    for t in &a.transitions {
        let label = match a.alphabet.label(&t.label) {
            Some(l) => {
                let (b, _) = a.alphabet.split_label(l).expect("extended alphabet");
                proj.base.name(b).to_string()
            }
            None => t.label.clone(),
        };
        let t = Transition { label, ..t.clone() };
        if !transitions.contains(&t) {
            transitions.push(t);
        }
    }
    Ok(Cra {
        alphabet: proj.base.clone(),
        signature: base_sig.clone(),
        states: a.states.clone(),
        registers: a.registers.clone(),
        transitions,
        finals: a.finals.clone(),
        global: a.global.clone(),
    })
}

/// A class memory automaton accepting exactly the words `S`-equivalent to
/// `w`: one state per position, each used exactly once.
pub fn exact_word_automaton(sig: &Signature, w: &DataWord) -> Result<Cra, GraphError> {
    let g = build_graph(sig, w)?;
    let n = w.len();
    let q = |i: usize| format!("q{i}");
    let names = sig.symbol_names();
    let mut transitions = Vec::new();
    for i in 1..=n {
        let sources = names
            .iter()
            .enumerate()
            .filter_map(|(s, name)| g.prev(s, i).map(|j| (name.to_string(), q(j))))
            .collect();
        let part = w.partition(i);
        let mut atoms = Vec::new();
        for k in 1..=w.m() {
            for l in k + 1..=w.m() {
                let eq = Bool::Atom(GuardAtom(Term::Data(k), Term::Data(l)));
                atoms.push(if part.same_block(k, l) {
                    eq
                } else {
                    Bool::not(eq)
                });
            }
        }
        transitions.push(Transition {
            sources,
            guard: Bool::and(atoms),
            label: w.label_name(i).to_string(),
            target: q(i),
            update: BTreeMap::new(),
        });
    }
    let finals = names
        .iter()
        .enumerate()
        .map(|(s, name)| {
            let qs = (1..=n).filter(|&i| g.next(s, i).is_none()).map(q).collect();
            (name.to_string(), qs)
        })
        .collect();
    let global = Bool::and((1..=n).map(|i| {
        let le = |bound| Bool::Atom(StateLe { state: q(i), bound });
        Bool::and([le(1), Bool::not(le(0))])
    }));
    Ok(Cra {
        alphabet: Arc::clone(w.alphabet()),
        signature: sig.clone(),
        states: (1..=n).map(q).collect(),
        registers: Vec::new(),
        transitions,
        finals,
        global,
    })
}
