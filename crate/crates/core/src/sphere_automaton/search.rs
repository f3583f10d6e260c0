use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::run::{SphereConfig, SphereRun};
use super::{ExtendedSphere, SAtom, SReg, STerm, SUpdate, SphereAutomaton, SphereState};
use crate::graph::{build_graph, DwGraph, GraphError};
use crate::spheres::{all_spheres, CanonSphere, SphereError};
use crate::word::{DataWord, Value};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error("word is over a different alphabet")]
    Alphabet,
    #[error("palette of {0} colors is outside 1..={1}")]
    Palette(u32, u64),
    #[error("search budget of {0} nodes exceeded")]
    Budget(u64),
}

type Slot = (Arc<CanonSphere>, u32);

impl SphereAutomaton {
    /// Depth-first search for an accepting run of `A_B` on `w`, drawing
    /// spheres from those realized in `w` and colors from `1..=palette`.
    ///
    /// Every sphere carried by an accepting run is realized in the word (its
    /// center is eventually simulated), so restricting to realized spheres
    /// loses nothing; a small palette may.
    pub fn membership(
        &self,
        w: &DataWord,
        palette: u32,
        budget: u64,
    ) -> Result<Option<SphereRun>, SearchError> {
        if w.alphabet() != &self.alphabet {
            return Err(SearchError::Alphabet);
        }
        if palette == 0 || u64::from(palette) > self.colors {
            return Err(SearchError::Palette(palette, self.colors));
        }
        let g = build_graph(&self.signature, w)?;
        let mut classes: Vec<Arc<CanonSphere>> = all_spheres(&g, self.radius)?
            .into_iter()
            .map(|s| s.canon)
            .collect();
        classes.sort();
        classes.dedup();
        let mut search = Search {
            sa: self,
            w,
            g,
            classes,
            palette,
            configs: Vec::with_capacity(w.len()),
            nodes: 0,
            budget,
        };
        let found = search.dfs()?;
        Ok(found.then_some(SphereRun {
            configs: search.configs,
        }))
    }
}

struct Search<'a> {
    sa: &'a SphereAutomaton,
    w: &'a DataWord,
    g: DwGraph,
    classes: Vec<Arc<CanonSphere>>,
    palette: u32,
    configs: Vec<SphereConfig>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), SearchError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SearchError::Budget(self.budget));
        }
        Ok(())
    }

    /// Members not forced by a predecessor: nodes without any predecessor
    /// in their sphere, grouped by slot.
    fn fresh_slots(&self, i: usize, p: &[Option<&SphereState>]) -> Vec<(Slot, Vec<usize>)> {
        let label = self.w.label(i);
        let eta = self.w.partition(i);
        let any_pred = p.iter().any(Option::is_some);
        let mut out = Vec::new();
        for s in &self.classes {
            let nodes: Vec<usize> = (0..s.len())
                .filter(|&a| {
                    s.ptype(a).is_empty()
                        && s.label(a) == label
                        && *s.partition(a) == eta
                        && (!any_pred || s.dist(s.center(), a) == self.sa.radius)
                })
                .collect();
            if nodes.is_empty() {
                continue;
            }
            for col in 1..=self.palette {
                let probe = ExtendedSphere::new(s.clone(), 0, col);
                if p.iter().flatten().any(|ps| ps.in_slot(&probe).is_some()) {
                    continue;
                }
                out.push(((s.clone(), col), nodes.clone()));
            }
        }
        out
    }

    fn dfs(&mut self) -> Result<bool, SearchError> {
        let i = self.configs.len() + 1;
        if i > self.w.len() {
            return Ok(true);
        }
        let syms = self.sa.signature.len();
        let prev: Vec<Option<usize>> = (0..syms).map(|s| self.g.prev(s, i)).collect();
        let maximal: Vec<usize> = (0..syms).filter(|&s| self.g.next(s, i).is_none()).collect();
        let states: Vec<Option<SphereState>> = prev
            .iter()
            .map(|j| j.map(|j| self.configs[j - 1].state.clone()))
            .collect();
        let p: Vec<Option<&SphereState>> = states.iter().map(Option::as_ref).collect();
        let mut forced = BTreeSet::new();
        for (s, ps) in p.iter().enumerate() {
            for e in ps.iter().flat_map(|ps| ps.members()) {
                if let Some(j) = e.sphere.next(s, e.active) {
                    forced.insert(e.at(j));
                }
            }
        }
        let slots: Vec<(Slot, Vec<usize>)> = self
            .fresh_slots(i, &p)
            .into_iter()
            .filter(|((s, col), _)| {
                let probe = ExtendedSphere::new(s.clone(), 0, *col);
                !forced.iter().any(|e| e.same_slot(&probe))
            })
            .collect();
        // choice[x] = 0 leaves slot x empty, otherwise picks node choice[x]-1.
        let mut choice = vec![0usize; slots.len()];
        loop {
            self.tick()?;
            let mut members = forced.clone();
            for (x, &c) in choice.iter().enumerate() {
                if c > 0 {
                    let ((s, col), nodes) = &slots[x];
                    members.insert(ExtendedSphere::new(s.clone(), nodes[c - 1], *col));
                }
            }
            if self.try_state(i, &prev, &p, &maximal, members)? {
                return Ok(true);
            }
            if !advance(&mut choice, |x| slots[x].1.len() + 1) {
                return Ok(false);
            }
        }
    }

    fn try_state(
        &mut self,
        i: usize,
        prev: &[Option<usize>],
        p: &[Option<&SphereState>],
        maximal: &[usize],
        members: BTreeSet<ExtendedSphere>,
    ) -> Result<bool, SearchError> {
        let Ok(q) = self.sa.state_check(members) else {
            return Ok(false);
        };
        if maximal.iter().any(|&s| !self.sa.is_final(s, &q)) {
            return Ok(false);
        }
        let Ok(t) = self.sa.transition_check(p, self.w.label(i), &q) else {
            return Ok(false);
        };
        let val = |term: &STerm| match term {
            STerm::Data(k) => Some(self.w.datum(i, *k)),
            STerm::Reg(s, r) => prev[*s].and_then(|j| self.configs[j - 1].regs.get(r).copied()),
        };
        let ok = t.guard.eval(&mut |SAtom(a, b)| match (val(a), val(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        });
        if !ok {
            return Ok(false);
        }
        let mut regs: BTreeMap<SReg, Value> = BTreeMap::new();
        let mut guesses: Vec<(SReg, Vec<Value>)> = Vec::new();
        for (r, u) in &t.update {
            match u {
                SUpdate::Forward(s, r2) => {
                    if let Some(v) = val(&STerm::Reg(*s, r2.clone())) {
                        regs.insert(r.clone(), v);
                    }
                }
                SUpdate::Guess { k, radius } => {
                    let mut d: Vec<Value> = self
                        .g
                        .ball(i, *radius)
                        .into_iter()
                        .map(|j| self.w.datum(j, *k))
                        .collect();
                    d.sort_unstable();
                    d.dedup();
                    guesses.push((r.clone(), d));
                }
            }
        }
        let mut choice = vec![0usize; guesses.len()];
        loop {
            self.tick()?;
            for (x, (r, d)) in guesses.iter().enumerate() {
                regs.insert(r.clone(), d[choice[x]]);
            }
            self.configs.push(SphereConfig {
                state: q.clone(),
                regs: regs.clone(),
            });
            if self.dfs()? {
                return Ok(true);
            }
            self.configs.pop();
            if !advance(&mut choice, |x| guesses[x].1.len()) {
                return Ok(false);
            }
        }
    }
}

/// Odometer step, last digit fastest; digit `x` ranges over `0..len(x)`.
fn advance(choice: &mut [usize], len: impl Fn(usize) -> usize) -> bool {
    for x in (0..choice.len()).rev() {
        choice[x] += 1;
        if choice[x] < len(x) {
            return true;
        }
        choice[x] = 0;
    }
    false
}
