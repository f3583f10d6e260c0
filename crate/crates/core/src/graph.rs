//! The graph `G(w)` of a data word: positions as nodes, one injective
//! partial successor map per relation symbol, node labels `λ` and `ν`.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::signature::{check_relation, interpret, AxiomViolation, Signature, SignatureError};
use crate::word::{Alphabet, DataWord, Label, Partition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("axiom violations: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Axioms(Vec<AxiomViolation>),
    #[error("position {0} out of range")]
    OutOfRange(usize),
}

/// `G(w)`. Internally nodes are 0-based; the public API is 1-based.
#[derive(Clone, Debug)]
pub struct DwGraph {
    alphabet: Arc<Alphabet>,
    symbols: Arc<[String]>,
    labels: Vec<Label>,
    parts: Vec<Partition>,
    next: Vec<Vec<Option<u32>>>,
    prev: Vec<Vec<Option<u32>>>,
}

/// Builds `G(w)`, running `axiom_check` first unless the signature is trusted.
pub fn build_graph(sig: &Signature, w: &DataWord) -> Result<DwGraph, GraphError> {
    let rels = interpret(sig, w)?;
    if !sig.trusted() {
        let violations: Vec<_> = sig
            .symbols()
            .iter()
            .zip(&rels)
            .flat_map(|(s, r)| check_relation(&s.name, r, w))
            .collect();
        if !violations.is_empty() {
            return Err(GraphError::Axioms(violations));
        }
    }
    let n = w.len();
    let mut next = vec![vec![None; n]; rels.len()];
    let mut prev = vec![vec![None; n]; rels.len()];
    for (s, rel) in rels.iter().enumerate() {
        for &(i, j) in rel {
            next[s][i - 1] = Some((j - 1) as u32);
            prev[s][j - 1] = Some((i - 1) as u32);
        }
    }
    Ok(DwGraph {
        alphabet: w.alphabet().clone(),
        symbols: sig.symbol_names().iter().map(|s| s.to_string()).collect(),
        labels: w.letters().iter().map(|l| l.label).collect(),
        parts: (1..=n).map(|i| w.partition(i)).collect(),
        next,
        prev,
    })
}

impl DwGraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    /// `λ(i)`.
    pub fn label(&self, i: usize) -> Label {
        self.labels[i - 1]
    }

    /// `ν(i)`.
    pub fn partition(&self, i: usize) -> &Partition {
        &self.parts[i - 1]
    }

    /// `next_⊲(i)` for the symbol with index `s`.
    pub fn next(&self, s: usize, i: usize) -> Option<usize> {
        self.next[s][i - 1].map(|j| j as usize + 1)
    }

    /// `prev_⊲(i)` for the symbol with index `s`.
    pub fn prev(&self, s: usize, i: usize) -> Option<usize> {
        self.prev[s][i - 1].map(|j| j as usize + 1)
    }

    /// Edges of symbol `s`, sorted.
    pub fn edges(&self, s: usize) -> Vec<(usize, usize)> {
        self.next[s]
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i + 1, j as usize + 1)))
            .collect()
    }

    /// Undirected neighbours of 1-based `i`: per symbol, successor then
    /// predecessor, in declaration order.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.symbols.len())
            .flat_map(move |s| self.next(s, i).into_iter().chain(self.prev(s, i)))
    }

    fn check(&self, i: usize) -> Result<(), GraphError> {
        if i == 0 || i > self.len() {
            Err(GraphError::OutOfRange(i))
        } else {
            Ok(())
        }
    }

    /// BFS distances from `i`, truncated at `limit` when given. Index 0 of the
    /// result is unused so that it can be addressed by position.
    pub fn distances_from(&self, i: usize, limit: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len() + 1];
        dist[i] = Some(0);
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            if limit.is_some_and(|l| d >= l) {
                continue;
            }
            for v in self.neighbours(u) {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest-path distance in the undirected union of all relations.
    pub fn dist(&self, i: usize, j: usize) -> Result<Option<usize>, GraphError> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.distances_from(i, None)[j])
    }

    /// Positions within distance `b` of `i`, ascending.
    pub fn ball(&self, i: usize, b: usize) -> Vec<usize> {
        self.distances_from(i, Some(b))
            .iter()
            .enumerate()
            .filter_map(|(j, d)| d.map(|_| j))
            .collect()
    }

    /// Connected components, each sorted, ordered by least position.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len() + 1];
        let mut out = Vec::new();
        for i in 1..=self.len() {
            if seen[i] {
                continue;
            }
            let comp: Vec<usize> = self.ball(i, usize::MAX);
            for &j in &comp {
                seen[j] = true;
            }
            out.push(comp);
        }
        out
    }

    /// DOT rendering: nodes `i:label/ν`, one edge style per symbol.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n  rankdir=LR;\n");
        for i in 1..=self.len() {
            let _ = writeln!(
                s,
                "  n{i} [label=\"{i}:{}/{}\"];",
                escape(self.alphabet.name(self.label(i))),
                self.partition(i)
            );
        }
        for (k, name) in self.symbols.iter().enumerate() {
            for (i, j) in self.edges(k) {
                let _ = writeln!(
                    s,
                    "  n{i} -> n{j} [label=\"{}\", style={}];",
                    escape(name),
                    edge_style(name, k)
                );
            }
        }
        s.push_str("}\n");
        s
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub(crate) fn edge_style(name: &str, idx: usize) -> &'static str {
    if name == "succ" {
        "solid"
    } else if name.starts_with("cls") || name == "proc" {
        "dashed"
    } else {
        ["dotted", "bold", "solid"][idx % 3]
    }
}

/// Whether `G(u) ≅ G(v)`, decided by comparing canonical component keys.
pub fn equivalent(sig: &Signature, u: &DataWord, v: &DataWord) -> Result<bool, GraphError> {
    if u.len() != v.len() {
        return Ok(false);
    }
    let gu = build_graph(sig, u)?;
    let gv = build_graph(sig, v)?;
    Ok(crate::spheres::graph_key(&gu) == crate::spheres::graph_key(&gv))
}

/// `normalize`: first-occurrence renaming of data values. Only meaningful
/// for renaming-invariant signatures.
pub fn normalize(sig: &Signature, w: &DataWord) -> Result<DataWord, NormalizeError> {
    if !sig.renaming_invariant() {
        return Err(NormalizeError(sig.name().to_string()));
    }
    Ok(w.normalized())
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("signature `{0}` is not renaming-invariant")]
pub struct NormalizeError(pub String);
