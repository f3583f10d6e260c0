use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use super::{
    ExtendedSphere, SAtom, SReg, STerm, SUpdate, SphereAutomaton, SphereState, SphereTransition,
    StateViolation, TransitionViolation,
};
use crate::automata::RunVerdict;
use crate::graph::{build_graph, DwGraph, GraphError};
use crate::spheres::{all_spheres, coloring_from, CanonicalKey, Sphere, SphereError};
use crate::word::{DataWord, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereConfig {
    pub state: SphereState,
    pub regs: BTreeMap<SReg, Value>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereRun {
    pub configs: Vec<SphereConfig>,
}

/// The run built from the word's own spheres and overlap coloring.
#[derive(Clone, Debug)]
pub struct CanonicalRun {
    pub run: SphereRun,
    pub transitions: Vec<SphereTransition>,
    /// Overlap coloring, indexed by position - 1.
    pub colors: Vec<u32>,
    /// `B-Sph(w, i)`, indexed by position - 1.
    pub spheres: Vec<Sphere>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SphereRunError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error("internal error: register slot {slot} claimed by centers {first} and {second}")]
    Ambiguous {
        slot: String,
        first: usize,
        second: usize,
    },
    #[error("internal error: position {0}: {1}")]
    State(usize, StateViolation),
    #[error("internal error: position {0}: {1}")]
    Transition(usize, TransitionViolation),
}

impl SphereAutomaton {
    /// `q_i = {(B-Sph(w, i_c), i, col(i_c)) | dist(i_c, i) ≤ B}` and
    /// `ρ_i((S, α, col), k) = d^k(i')` for the unique witnessing pair.
    pub fn canonical_run(&self, w: &DataWord) -> Result<CanonicalRun, SphereRunError> {
        let g = build_graph(&self.signature, w)?;
        let spheres = all_spheres(&g, self.radius)?;
        let colors = coloring_from(&g, &spheres, self.radius);
        let mut configs = Vec::with_capacity(w.len());
        for i in 1..=w.len() {
            let mut members = BTreeSet::new();
            let mut regs = BTreeMap::new();
            let mut owner: BTreeMap<(&CanonicalKey, u32), usize> = BTreeMap::new();
            for ic in g.ball(i, self.radius) {
                let sph = &spheres[ic - 1];
                let col = colors[ic - 1];
                let node = sph.node_of(i).expect("i lies within B of i_c");
                members.insert(ExtendedSphere::new(sph.canon.clone(), node, col));
                if let Some(&first) = owner.get(&(sph.key(), col)) {
                    return Err(SphereRunError::Ambiguous {
                        slot: format!("{}#{col}", sph.key().short()),
                        first,
                        second: ic,
                    });
                }
                owner.insert((sph.key(), col), ic);
                for (x, &pos) in sph.positions.iter().enumerate() {
                    for k in 1..=w.m() {
                        let r = ExtendedSphere::new(sph.canon.clone(), x, col).register(k);
                        regs.insert(r, w.datum(pos, k));
                    }
                }
            }
            let state = self
                .state_check(members)
                .map_err(|v| SphereRunError::State(i, v))?;
            configs.push(SphereConfig { state, regs });
        }
        let run = SphereRun { configs };
        let transitions = self
            .transitions_of(&g, w, &run)
            .map_err(|(i, v)| SphereRunError::Transition(i, v))?;
        Ok(CanonicalRun {
            run,
            transitions,
            colors,
            spheres,
        })
    }

    /// The transitions determined by the run's states, one per position.
    fn transitions_of(
        &self,
        g: &DwGraph,
        w: &DataWord,
        run: &SphereRun,
    ) -> Result<Vec<SphereTransition>, (usize, TransitionViolation)> {
        (1..=w.len())
            .map(|i| {
                let p: Vec<Option<&SphereState>> = (0..self.signature.len())
                    .map(|s| g.prev(s, i).map(|j| &run.configs[j - 1].state))
                    .collect();
                self.transition_check(&p, w.label(i), &run.configs[i - 1].state)
                    .map_err(|v| (i, v))
            })
            .collect()
    }

    /// Checks the run against `A_B`: states, T1–T8, run conditions (1)–(4),
    /// local finals. `Φ` is `true`.
    pub fn verify_run(&self, w: &DataWord, run: &SphereRun) -> RunVerdict {
        match self.verify_inner(w, run) {
            Ok(()) => RunVerdict::Accepted,
            Err(e) => RunVerdict::Rejected(e),
        }
    }

    fn verify_inner(&self, w: &DataWord, run: &SphereRun) -> Result<(), String> {
        if w.alphabet() != &self.alphabet {
            return Err("word is over a different alphabet".into());
        }
        let g = build_graph(&self.signature, w).map_err(|e| e.to_string())?;
        if run.configs.len() != w.len() {
            return Err(format!(
                "run has {} configurations, word has {} positions",
                run.configs.len(),
                w.len()
            ));
        }
        for (i, c) in run.configs.iter().enumerate() {
            self.state_check(c.state.members().clone())
                .map_err(|v| format!("position {}: {v}", i + 1))?;
        }
        let transitions = self
            .transitions_of(&g, w, run)
            .map_err(|(i, v)| format!("position {i}: {v}"))?;
        for (idx, t) in transitions.iter().enumerate() {
            let i = idx + 1;
            let val = |term: &STerm| match term {
                STerm::Data(k) => Some(w.datum(i, *k)),
                STerm::Reg(s, r) => g
                    .prev(*s, i)
                    .and_then(|j| run.configs[j - 1].regs.get(r).copied()),
            };
            let ok = t.guard.eval(&mut |SAtom(a, b)| match (val(a), val(b)) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            });
            if !ok {
                let failing = t
                    .guard
                    .atoms()
                    .into_iter()
                    .find(|SAtom(a, b)| {
                        let (x, y) = (val(a), val(b));
                        x.is_none() || y.is_none() || x != y
                    })
                    .map(|SAtom(a, b)| format!("{a} = {b}"))
                    .unwrap_or_default();
                return Err(format!("position {i}: guard is false ({failing})"));
            }
            let regs = &run.configs[idx].regs;
            for (r, u) in &t.update {
                let have = regs.get(r).copied();
                let ok = match u {
                    SUpdate::Forward(s, r2) => {
                        have == g
                            .prev(*s, i)
                            .and_then(|j| run.configs[j - 1].regs.get(r2).copied())
                    }
                    SUpdate::Guess { k, radius } => have
                        .is_some_and(|v| g.ball(i, *radius).iter().any(|&j| w.datum(j, *k) == v)),
                };
                if !ok {
                    return Err(format!("position {i}: register {r} violates its update"));
                }
            }
            if let Some(r) = regs.keys().find(|r| !t.update.contains_key(*r)) {
                return Err(format!("position {i}: register {r} must be undefined"));
            }
            for s in 0..self.signature.len() {
                if g.next(s, i).is_none() && !self.is_final(s, &t.target) {
                    return Err(format!(
                        "position {i}: state is not in F_{}",
                        self.signature.symbol_names()[s]
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Follows every member `E ∈ q_i` through the word along the edges of its
/// sphere and checks that the simulating positions are consistent, that
/// registers `(E[j], k)` stay constant along the way, and that
/// `ρ((E[j_z], k)) = d^k` at each simulating position. Returns the number of
/// (member, node) pairs visited.
pub fn register_invariance(
    sa: &SphereAutomaton,
    w: &DataWord,
    run: &SphereRun,
) -> Result<usize, String> {
    let g = build_graph(&sa.signature, w).map_err(|e| e.to_string())?;
    let mut visited_total = 0;
    for (idx, c) in run.configs.iter().enumerate() {
        let i = idx + 1;
        for e in c.state.members() {
            let n = e.sphere.len();
            let mut pos = vec![None; n];
            pos[e.active] = Some(i);
            let mut queue = VecDeque::from([e.active]);
            let base = &c.regs;
            while let Some(x) = queue.pop_front() {
                let px = pos[x].unwrap();
                visited_total += 1;
                let cfg = &run.configs[px - 1];
                if !cfg.state.contains(&e.at(x)) {
                    return Err(format!("{e} at {i}: E[{x}] missing from q_{px}"));
                }
                for j in 0..n {
                    for k in 1..=w.m() {
                        let r = e.at(j).register(k);
                        if cfg.regs.get(&r) != base.get(&r) {
                            return Err(format!("{e} at {i}: register {r} changes at {px}"));
                        }
                    }
                }
                for k in 1..=w.m() {
                    if cfg.regs.get(&e.at(x).register(k)) != Some(&w.datum(px, k)) {
                        return Err(format!(
                            "{e} at {i}: register of node {x} differs from d^{k}({px})"
                        ));
                    }
                }
                for s in 0..sa.signature.len() {
                    let steps = [
                        (e.sphere.next(s, x), g.next(s, px)),
                        (e.sphere.prev(s, x), g.prev(s, px)),
                    ];
                    for (y, py) in steps {
                        let Some(y) = y else { continue };
                        let Some(py) = py else {
                            return Err(format!(
                                "{e} at {i}: edge from node {x} not simulated at {px}"
                            ));
                        };
                        match pos[y] {
                            None => {
                                pos[y] = Some(py);
                                queue.push_back(y);
                            }
                            Some(old) if old != py => {
                                return Err(format!(
                                    "{e} at {i}: node {y} simulated at both {old} and {py}"
                                ))
                            }
                            Some(_) => {}
                        }
                    }
                }
            }
        }
    }
    Ok(visited_total)
}

/// Per position: input, number of members, `π(q_i)` key, defined registers.
pub fn sphere_run_table(w: &DataWord, run: &SphereRun) -> String {
    let mut rows = vec![vec![
        "pos".to_string(),
        "input".into(),
        "|q|".into(),
        "pi(q)".into(),
        "regs".into(),
    ]];
    for (idx, c) in run.configs.iter().enumerate() {
        let i = idx + 1;
        let data: Vec<String> = w.letter(i).data.iter().map(|v| v.to_string()).collect();
        let input = if data.is_empty() {
            format!("({})", w.label_name(i))
        } else {
            format!("({},{})", w.label_name(i), data.join(","))
        };
        rows.push(vec![
            i.to_string(),
            input,
            c.state.members().len().to_string(),
            c.state.pi().key().short(),
            c.regs.len().to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|col| {
            rows.iter()
                .map(|r| r[col].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:w$}"))
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}
