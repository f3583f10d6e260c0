//! The sphere automaton `A_B`, represented intensionally: states and
//! transitions are checked or synthesized on demand and never enumerated.
//!
//! A state is a set of extended spheres `(S, α, col)`. Registers are pairs
//! `((S, α, col), k)`. Because every relation is an injective partial
//! function, a rooted sphere has no non-trivial automorphism, so the
//! canonical numbering identifies nodes of isomorphic spheres exactly.

mod run;
mod search;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::boolexpr::Bool;
use crate::signature::Signature;
use crate::spheres::{color_bound, CanonSphere, SphereError};
use crate::word::{Alphabet, Label, Partition};

pub use run::{
    register_invariance, sphere_run_table, CanonicalRun, SphereConfig, SphereRun, SphereRunError,
};
pub use search::SearchError;

/// `(S, α, col)`.
#[derive(Clone, Debug)]
pub struct ExtendedSphere {
    pub sphere: Arc<CanonSphere>,
    pub active: usize,
    pub color: u32,
}

impl ExtendedSphere {
    pub fn new(sphere: Arc<CanonSphere>, active: usize, color: u32) -> Self {
        ExtendedSphere {
            sphere,
            active,
            color,
        }
    }

    /// `E[j]`.
    pub fn at(&self, j: usize) -> ExtendedSphere {
        ExtendedSphere {
            sphere: self.sphere.clone(),
            active: j,
            color: self.color,
        }
    }

    fn same_slot(&self, other: &ExtendedSphere) -> bool {
        self.color == other.color && self.sphere == other.sphere
    }

    pub fn is_centered(&self) -> bool {
        self.active == self.sphere.center()
    }

    /// `⊲_E`: the first declared symbol with a predecessor at `α`.
    pub fn pred_symbol(&self) -> Option<usize> {
        self.sphere.ptype(self.active).first().copied()
    }

    pub fn register(&self, k: usize) -> SReg {
        SReg {
            sphere: self.sphere.clone(),
            color: self.color,
            node: self.active,
            k,
        }
    }
}

impl PartialEq for ExtendedSphere {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtendedSphere {}

impl PartialOrd for ExtendedSphere {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedSphere {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.sphere, self.color, self.active).cmp(&(&other.sphere, other.color, other.active))
    }
}

impl fmt::Display for ExtendedSphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}#{}@{}",
            self.sphere.key().short(),
            self.color,
            self.active
        )
    }
}

/// Register `(E, k)` with `E = (sphere, node, color)`; `k` is 1-based.
#[derive(Clone, Debug)]
pub struct SReg {
    pub sphere: Arc<CanonSphere>,
    pub color: u32,
    pub node: usize,
    pub k: usize,
}

impl SReg {
    fn tuple(&self) -> (&CanonSphere, u32, usize, usize) {
        (&self.sphere, self.color, self.node, self.k)
    }
}

impl PartialEq for SReg {
    fn eq(&self, other: &Self) -> bool {
        self.tuple() == other.tuple()
    }
}

impl Eq for SReg {}

impl PartialOrd for SReg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SReg {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tuple().cmp(&other.tuple())
    }
}

impl fmt::Display for SReg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}#{}@{},{})",
            self.sphere.key().short(),
            self.color,
            self.node,
            self.k
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum STerm {
    /// `k`, 1-based.
    Data(usize),
    /// `(⊲, (E, k))` with `⊲` a symbol index.
    Reg(usize, SReg),
}

impl fmt::Display for STerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            STerm::Data(k) => write!(f, "{k}"),
            STerm::Reg(s, r) => write!(f, "(#{s},{r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SAtom(pub STerm, pub STerm);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SUpdate {
    Forward(usize, SReg),
    Guess { k: usize, radius: usize },
}

/// A valid state: conditions (i)–(iii) hold.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SphereState(BTreeSet<ExtendedSphere>);

impl SphereState {
    pub fn members(&self) -> &BTreeSet<ExtendedSphere> {
        &self.0
    }

    fn any(&self) -> &ExtendedSphere {
        self.0.iter().next().expect("states are non-empty")
    }

    pub fn label(&self) -> Label {
        let e = self.any();
        e.sphere.label(e.active)
    }

    pub fn data(&self) -> &Partition {
        let e = self.any();
        e.sphere.partition(e.active)
    }

    /// The member whose active node is its center.
    pub fn centered(&self) -> &ExtendedSphere {
        self.0
            .iter()
            .find(|e| e.is_centered())
            .expect("condition (i)")
    }

    /// `π(q)`.
    pub fn pi(&self) -> &Arc<CanonSphere> {
        &self.centered().sphere
    }

    /// The member sharing `(S, col)` with `e`; unique by (iii).
    pub fn in_slot(&self, e: &ExtendedSphere) -> Option<&ExtendedSphere> {
        let lo = ExtendedSphere::new(e.sphere.clone(), 0, e.color);
        self.0.range(lo..).take_while(|x| x.same_slot(e)).next()
    }

    pub fn contains(&self, e: &ExtendedSphere) -> bool {
        self.0.contains(e)
    }
}

impl fmt::Display for SphereState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateViolation {
    #[error("state is empty")]
    Empty,
    #[error("(i): {0} members have their active node at the center")]
    Centers(usize),
    #[error("(ii): {0} and {1} disagree on label or data at the active node")]
    LabelOrData(String, String),
    #[error("(iii): {0} and {1} share sphere and color but not the active node")]
    Active(String, String),
    #[error("{0} has radius {1}, automaton radius is {2}")]
    Radius(String, usize, usize),
    #[error("{0} has color outside 1..={1}")]
    Color(String, u64),
    #[error("{0} has an active node outside its sphere")]
    Node(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransitionViolation {
    #[error("T1: label(q) differs from the transition label")]
    T1,
    #[error("T2: `{sym}` not in dom(p) but {member} has a `{sym}`-predecessor")]
    T2 { sym: String, member: String },
    #[error("T3: `{sym}`: {member} and p_{sym} disagree on the predecessor")]
    T3 { sym: String, member: String },
    #[error("T4: `{sym}`: {member} in p_{sym} and q disagree on the successor")]
    T4 { sym: String, member: String },
    #[error("T5: `{sym}`: {member} lacks a predecessor at distance < B from its center")]
    T5 { sym: String, member: String },
    #[error("T6: `{sym}`: {member} lacks a successor at distance < B from its center")]
    T6 { sym: String, member: String },
}

/// A transition of `A_B` with its synthesized guard (T7) and update (T8).
#[derive(Clone, Debug)]
pub struct SphereTransition {
    /// `p`, indexed by symbol.
    pub sources: Vec<Option<SphereState>>,
    pub guard: Bool<SAtom>,
    pub label: Label,
    pub target: SphereState,
    pub update: BTreeMap<SReg, SUpdate>,
}

/// `A_B` for one signature, alphabet and radius.
#[derive(Clone, Debug)]
pub struct SphereAutomaton {
    pub signature: Signature,
    pub alphabet: Arc<Alphabet>,
    pub radius: usize,
    /// Size of the color palette `(2|S|+1)·maxSize²+1`.
    pub colors: u64,
}

impl SphereAutomaton {
    pub fn new(
        signature: Signature,
        alphabet: Arc<Alphabet>,
        radius: usize,
    ) -> Result<Self, SphereError> {
        let colors = color_bound(radius, signature.len())?;
        Ok(SphereAutomaton {
            signature,
            alphabet,
            radius,
            colors,
        })
    }

    fn sym_name(&self, s: usize) -> String {
        self.signature.symbol_names()[s].to_string()
    }

    /// Checks conditions (i)–(iii) plus membership in `eSpheres_B`.
    pub fn state_check(
        &self,
        members: BTreeSet<ExtendedSphere>,
    ) -> Result<SphereState, StateViolation> {
        let Some(first) = members.iter().next() else {
            return Err(StateViolation::Empty);
        };
        for e in &members {
            if e.sphere.radius() != self.radius {
                return Err(StateViolation::Radius(
                    e.to_string(),
                    e.sphere.radius(),
                    self.radius,
                ));
            }
            if e.color == 0 || u64::from(e.color) > self.colors {
                return Err(StateViolation::Color(e.to_string(), self.colors));
            }
            if e.active >= e.sphere.len() {
                return Err(StateViolation::Node(e.to_string()));
            }
        }
        let centers = members.iter().filter(|e| e.is_centered()).count();
        if centers != 1 {
            return Err(StateViolation::Centers(centers));
        }
        let (a, eta) = (
            first.sphere.label(first.active),
            first.sphere.partition(first.active),
        );
        for e in &members {
            if e.sphere.label(e.active) != a || e.sphere.partition(e.active) != eta {
                return Err(StateViolation::LabelOrData(
                    first.to_string(),
                    e.to_string(),
                ));
            }
        }
        let mut prev: Option<&ExtendedSphere> = None;
        for e in &members {
            if let Some(p) = prev.filter(|p| p.same_slot(e)) {
                return Err(StateViolation::Active(p.to_string(), e.to_string()));
            }
            prev = Some(e);
        }
        Ok(SphereState(members))
    }

    /// Checks T1–T6 and synthesizes the guard (T7) and update (T8).
    pub fn transition_check(
        &self,
        p: &[Option<&SphereState>],
        a: Label,
        q: &SphereState,
    ) -> Result<SphereTransition, TransitionViolation> {
        if q.label() != a {
            return Err(TransitionViolation::T1);
        }
        let b = self.radius;
        for (s, ps) in p.iter().enumerate() {
            let sym = || self.sym_name(s);
            let Some(ps) = ps else {
                if let Some(e) = q
                    .members()
                    .iter()
                    .find(|e| e.sphere.prev(s, e.active).is_some())
                {
                    return Err(TransitionViolation::T2 {
                        sym: sym(),
                        member: e.to_string(),
                    });
                }
                continue;
            };
            for e in q.members() {
                // T3: j ⊲ α iff E[j] ∈ p_⊲, for all j.
                let expected = e.sphere.prev(s, e.active).map(|j| e.at(j));
                if ps.in_slot(e).cloned() != expected {
                    return Err(TransitionViolation::T3 {
                        sym: sym(),
                        member: e.to_string(),
                    });
                }
                if expected.is_none() && e.sphere.dist(0, e.active) != b {
                    return Err(TransitionViolation::T5 {
                        sym: sym(),
                        member: e.to_string(),
                    });
                }
            }
            for e in ps.members() {
                // T4: α ⊲ j iff E[j] ∈ q, for all j.
                let expected = e.sphere.next(s, e.active).map(|j| e.at(j));
                if q.in_slot(e).cloned() != expected {
                    return Err(TransitionViolation::T4 {
                        sym: sym(),
                        member: e.to_string(),
                    });
                }
                if expected.is_none() && e.sphere.dist(0, e.active) != b {
                    return Err(TransitionViolation::T6 {
                        sym: sym(),
                        member: e.to_string(),
                    });
                }
            }
        }
        Ok(SphereTransition {
            sources: p.iter().map(|x| x.cloned()).collect(),
            guard: self.guard(q),
            label: a,
            target: q.clone(),
            update: self.update(q),
        })
    }

    /// T7: `g₁ ∧ g₂ ∧ g₃`.
    fn guard(&self, q: &SphereState) -> Bool<SAtom> {
        let m = self.alphabet.m();
        let eta = q.data();
        let mut atoms = Vec::new();
        for k1 in 1..=m {
            for k2 in k1 + 1..=m {
                let eq = Bool::Atom(SAtom(STerm::Data(k1), STerm::Data(k2)));
                atoms.push(if eta.same_block(k1, k2) {
                    eq
                } else {
                    Bool::not(eq)
                });
            }
        }
        for e in q.members() {
            let ptype = e.sphere.ptype(e.active);
            for k in 1..=m {
                for &s in &ptype {
                    atoms.push(Bool::Atom(SAtom(
                        STerm::Data(k),
                        STerm::Reg(s, e.register(k)),
                    )));
                }
            }
            for j in 0..e.sphere.len() {
                let r = |k| e.at(j).register(k);
                for k in 1..=m {
                    for (x, &s1) in ptype.iter().enumerate() {
                        for &s2 in &ptype[x..] {
                            atoms.push(Bool::Atom(SAtom(
                                STerm::Reg(s1, r(k)),
                                STerm::Reg(s2, r(k)),
                            )));
                        }
                    }
                }
            }
        }
        Bool::and(atoms)
    }

    /// T8. For every `(S, col)` occurring in `q` with active node `j`, every
    /// register `((S, α, col), k)` is updated.
    fn update(&self, q: &SphereState) -> BTreeMap<SReg, SUpdate> {
        let m = self.alphabet.m();
        let mut f = BTreeMap::new();
        for e in q.members() {
            let forward = e.pred_symbol();
            for alpha in 0..e.sphere.len() {
                let target = e.at(alpha);
                for k in 1..=m {
                    let u = match forward {
                        None => SUpdate::Guess {
                            k,
                            radius: e.sphere.dist(e.active, alpha),
                        },
                        Some(s) => SUpdate::Forward(s, target.register(k)),
                    };
                    f.insert(target.register(k), u);
                }
            }
        }
        f
    }

    /// `q ∈ F_⊲`: no member has a `⊲`-successor at its active node.
    pub fn is_final(&self, s: usize, q: &SphereState) -> bool {
        q.members()
            .iter()
            .all(|e| e.sphere.next(s, e.active).is_none())
    }
}

#[cfg(test)]
mod tests;
