//! Runs: checking a given run and searching for an accepting one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::cra::{CTerm, CTransition, CUpdate, Compiled, Cra, CraError, Guard, Term};
use crate::boolexpr::Bool;
use crate::graph::{build_graph, DwGraph, GraphError};
use crate::word::{DataWord, Label, Value};

/// `(q_i, ρ_i)`. Registers absent from the map are undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub state: String,
    pub regs: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub configs: Vec<Config>,
    /// Optional witness: 0-based transition index per position.
    pub transitions: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunVerdict {
    Accepted,
    Rejected(String),
}

impl RunVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, RunVerdict::Accepted)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MembershipError {
    #[error("invalid automaton: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<CraError>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("word has data arity {found}, automaton expects {expected}")]
    Arity { expected: usize, found: usize },
    #[error("search budget of {0} nodes exceeded")]
    Budget(u64),
}

pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Evaluates a guard; `val` returns `None` for undefined operands. An atom is
/// true iff both sides are defined and equal.
pub fn guard_eval(guard: &Guard, val: &mut impl FnMut(&Term) -> Option<Value>) -> bool {
    guard.eval(&mut |a| match (val(&a.0), val(&a.1)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    })
}

/// Everything a check or search needs about one automaton/word pair.
struct Setup<'a> {
    cra: &'a Cra,
    w: &'a DataWord,
    g: DwGraph,
    c: Compiled,
    /// `Φ` over state indices.
    global: Bool<(usize, usize)>,
    /// Automaton label of each position, if the label exists there.
    labels: Vec<Option<Label>>,
    /// `prev[s][i]`, 0-based.
    prev: Vec<Vec<Option<usize>>>,
    /// Symbols without a successor at each position.
    maximal: Vec<Vec<usize>>,
}

impl<'a> Setup<'a> {
    fn new(cra: &'a Cra, w: &'a DataWord) -> Result<Self, MembershipError> {
        cra.validate().map_err(MembershipError::Invalid)?;
        if w.m() != cra.alphabet.m() {
            return Err(MembershipError::Arity {
                expected: cra.alphabet.m(),
                found: w.m(),
            });
        }
        let g = build_graph(&cra.signature, w)?;
        let n = w.len();
        let syms = cra.signature.len();
        let prev = (0..syms)
            .map(|s| (1..=n).map(|i| g.prev(s, i).map(|p| p - 1)).collect())
            .collect();
        let maximal = (1..=n)
            .map(|i| (0..syms).filter(|&s| g.next(s, i).is_none()).collect())
            .collect();
        let labels = (1..=n)
            .map(|i| cra.alphabet.label(w.label_name(i)))
            .collect();
        Ok(Setup {
            cra,
            w,
            g,
            c: cra.compile(),
            global: cra
                .global
                .map(&mut |a| Bool::Atom((cra.state_index(&a.state), a.bound))),
            labels,
            prev,
            maximal,
        })
    }

    /// `𝔇ᵏ_B(i)`, sorted and deduplicated; `k` 0-based, `i` 0-based.
    fn domain(&self, i: usize, k: usize, radius: usize) -> Vec<Value> {
        if radius == 0 {
            return vec![self.w.datum(i + 1, k + 1)];
        }
        let mut vals: Vec<Value> = self
            .g
            .ball(i + 1, radius)
            .into_iter()
            .map(|j| self.w.datum(j, k + 1))
            .collect();
        vals.sort_unstable();
        vals.dedup();
        vals
    }

    /// Conditions (1), (2), label, target state when given, and guard.
    fn enabled(
        &self,
        t: &CTransition,
        i: usize,
        states: &[usize],
        regs: &[Vec<Option<Value>>],
    ) -> Result<(), String> {
        if self.labels[i] != Some(t.label) {
            return Err("label mismatch".into());
        }
        for (s, p) in self.prev.iter().enumerate() {
            match (p[i], t.sources[s]) {
                (None, None) => {}
                (Some(j), Some(q)) => {
                    if states[j] != q {
                        return Err(format!(
                            "source for `{}` expects {}, found {}",
                            self.cra.signature.symbol_names()[s],
                            self.cra.states[q],
                            self.cra.states[states[j]]
                        ));
                    }
                }
                (Some(_), None) | (None, Some(_)) => {
                    return Err(format!(
                        "dom(p) does not match the defined predecessors at `{}`",
                        self.cra.signature.symbol_names()[s]
                    ))
                }
            }
        }
        let val = |term: &CTerm| match *term {
            CTerm::Data(k) => Some(self.w.datum(i + 1, k + 1)),
            CTerm::Reg(s, r) => self.prev[s][i].and_then(|j| regs[j][r]),
        };
        let ok = t.guard.eval(&mut |(a, b)| match (val(a), val(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        });
        if ok {
            Ok(())
        } else {
            Err("guard is false".into())
        }
    }

    fn locally_final(&self, i: usize, q: usize) -> bool {
        self.maximal[i].iter().all(|&s| self.c.finals[s][q])
    }

    fn global_holds(&self, states: &[usize]) -> bool {
        let mut counts = vec![0usize; self.cra.states.len()];
        for &q in states {
            counts[q] += 1;
        }
        self.global.eval(&mut |&(q, n)| counts[q] <= n)
    }
}

/// Checks run conditions (1)–(4), local finals and `Φ`.
pub fn run_check(a: &Cra, w: &DataWord, run: &Run) -> RunVerdict {
    let setup = match Setup::new(a, w) {
        Ok(s) => s,
        Err(e) => return RunVerdict::Rejected(e.to_string()),
    };
    let n = w.len();
    if run.configs.len() != n {
        return RunVerdict::Rejected(format!(
            "run has {} configurations, word has {n} positions",
            run.configs.len()
        ));
    }
    if let Some(ts) = &run.transitions {
        if ts.len() != n {
            return RunVerdict::Rejected("witness length differs from word length".into());
        }
    }
    let mut states = Vec::with_capacity(n);
    let mut regs = Vec::with_capacity(n);
    for (i, c) in run.configs.iter().enumerate() {
        let Some(q) = a.states.iter().position(|x| *x == c.state) else {
            return RunVerdict::Rejected(format!(
                "position {}: unknown state `{}`",
                i + 1,
                c.state
            ));
        };
        let mut row = vec![None; a.registers.len()];
        for (r, v) in &c.regs {
            let Some(ri) = a.registers.iter().position(|x| x == r) else {
                return RunVerdict::Rejected(format!("position {}: unknown register `{r}`", i + 1));
            };
            row[ri] = Some(*v);
        }
        states.push(q);
        regs.push(row);
    }
    for i in 0..n {
        let candidates: Vec<usize> = match &run.transitions {
            Some(ts) => vec![ts[i]],
            None => (0..setup.c.transitions.len()).collect(),
        };
        let mut last = String::from("no transition");
        let found = candidates.iter().any(|&ti| {
            let Some(t) = setup.c.transitions.get(ti) else {
                last = format!("transition {} does not exist", ti + 1);
                return false;
            };
            if t.target != states[i] {
                last = format!("transition {} targets another state", ti + 1);
                return false;
            }
            if let Err(e) = setup.enabled(t, i, &states, &regs) {
                last = format!("transition {}: {e}", ti + 1);
                return false;
            }
            match updates_agree(&setup, t, i, &regs) {
                Ok(()) => true,
                Err(e) => {
                    last = format!("transition {}: {e}", ti + 1);
                    false
                }
            }
        });
        if !found {
            return RunVerdict::Rejected(format!("position {}: {last}", i + 1));
        }
        if !setup.locally_final(i, states[i]) {
            return RunVerdict::Rejected(format!(
                "position {}: state {} is not locally final",
                i + 1,
                a.states[states[i]]
            ));
        }
    }
    if !setup.global_holds(&states) {
        return RunVerdict::Rejected("global condition is false".into());
    }
    RunVerdict::Accepted
}

/// Condition (4).
fn updates_agree(
    setup: &Setup,
    t: &CTransition,
    i: usize,
    regs: &[Vec<Option<Value>>],
) -> Result<(), String> {
    let mut assigned = vec![false; setup.cra.registers.len()];
    for (r, u) in &t.updates {
        assigned[*r] = true;
        let have = regs[i][*r];
        let ok = match *u {
            CUpdate::Forward(s, r2) => have == setup.prev[s][i].and_then(|j| regs[j][r2]),
            CUpdate::Guess(k, b) => have.is_some_and(|v| setup.domain(i, k, b).contains(&v)),
        };
        if !ok {
            return Err(format!(
                "register {} violates its update",
                setup.cra.registers[*r]
            ));
        }
    }
    for (r, done) in assigned.iter().enumerate() {
        if !done && regs[i][r].is_some() {
            return Err(format!(
                "register {} must be undefined",
                setup.cra.registers[r]
            ));
        }
    }
    Ok(())
}

/// Depth-first search for an accepting run: transitions in declaration
/// order, guessed values ascending. `Ok(None)` means no accepting run.
pub fn membership(a: &Cra, w: &DataWord, budget: u64) -> Result<Option<Run>, MembershipError> {
    let setup = Setup::new(a, w)?;
    let n = w.len();
    let mut search = Search {
        setup: &setup,
        states: Vec::with_capacity(n),
        regs: Vec::with_capacity(n),
        trans: Vec::with_capacity(n),
        nodes: 0,
        budget,
    };
    if !search.dfs()? {
        return Ok(None);
    }
    let configs = search
        .states
        .iter()
        .zip(&search.regs)
        .map(|(&q, row)| Config {
            state: a.states[q].clone(),
            regs: row
                .iter()
                .enumerate()
                .filter_map(|(r, v)| v.map(|v| (a.registers[r].clone(), v)))
                .collect(),
        })
        .collect();
    Ok(Some(Run {
        configs,
        transitions: Some(search.trans),
    }))
}

struct Search<'s, 'a> {
    setup: &'s Setup<'a>,
    states: Vec<usize>,
    regs: Vec<Vec<Option<Value>>>,
    trans: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_, '_> {
    fn dfs(&mut self) -> Result<bool, MembershipError> {
        let i = self.states.len();
        if i == self.setup.w.len() {
            return Ok(self.setup.global_holds(&self.states));
        }
        let setup = self.setup;
        for (ti, t) in setup.c.transitions.iter().enumerate() {
            if setup.enabled(t, i, &self.states, &self.regs).is_err()
                || !setup.locally_final(i, t.target)
            {
                continue;
            }
            // Forwarded values are fixed; guessed ones range over their domains.
            let mut row = vec![None; setup.cra.registers.len()];
            let mut guesses: Vec<(usize, Vec<Value>)> = Vec::new();
            for (r, u) in &t.updates {
                match *u {
                    CUpdate::Forward(s, r2) => {
                        row[*r] = setup.prev[s][i].and_then(|j| self.regs[j][r2]);
                    }
                    CUpdate::Guess(k, b) => guesses.push((*r, setup.domain(i, k, b))),
                }
            }
            if guesses.iter().any(|(_, d)| d.is_empty()) {
                continue;
            }
            let mut choice = vec![0usize; guesses.len()];
            loop {
                for (gi, (r, d)) in guesses.iter().enumerate() {
                    row[*r] = Some(d[choice[gi]]);
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(MembershipError::Budget(self.budget));
                }
                self.states.push(t.target);
                self.regs.push(row.clone());
                self.trans.push(ti);
                if self.dfs()? {
                    return Ok(true);
                }
                self.states.pop();
                self.regs.pop();
                self.trans.pop();
                if !advance(&mut choice, &guesses) {
                    break;
                }
            }
        }
        Ok(false)
    }
}

/// Odometer step over guess choices, last register fastest. False once all
/// combinations were tried.
fn advance(choice: &mut [usize], guesses: &[(usize, Vec<Value>)]) -> bool {
    for pos in (0..choice.len()).rev() {
        choice[pos] += 1;
        if choice[pos] < guesses[pos].1.len() {
            return true;
        }
        choice[pos] = 0;
    }
    false
}

/// The run as a table in the style of a transition/run listing.
pub fn run_table(a: &Cra, w: &DataWord, run: &Run) -> String {
    let mut header = vec![
        "pos".to_string(),
        "input".into(),
        "trans".into(),
        "state".into(),
    ];
    header.extend(a.registers.iter().cloned());
    let mut rows = vec![header];
    for (i, c) in run.configs.iter().enumerate() {
        let letter = w.letter(i + 1);
        let data: Vec<String> = letter.data.iter().map(|v| v.to_string()).collect();
        let input = if data.is_empty() {
            format!("({})", w.label_name(i + 1))
        } else {
            format!("({},{})", w.label_name(i + 1), data.join(","))
        };
        let t = run
            .transitions
            .as_ref()
            .map_or("-".to_string(), |ts| (ts[i] + 1).to_string());
        let mut row = vec![(i + 1).to_string(), input, t, c.state.clone()];
        row.extend(
            a.registers
                .iter()
                .map(|r| c.regs.get(r).map_or("⊥".to_string(), |v| v.to_string())),
        );
        rows.push(row);
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
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}
