//! Cross-validation suite: the ten reproduction and agreement checks run by
//! `cra oracle` and by the `acceptance` test target.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automata::{
    self, intersect, project, run_check, union, Config, Cra, Run, DEFAULT_BUDGET,
};
use crate::corpus;
use crate::graph::{build_graph, equivalent};
use crate::hanf::{
    compile, compiled_membership, default_params, enumerate_words, escalate, validate_params,
    CompileOptions, HanfParams, Membership, Validation,
};
use crate::logic::{classify, eval_sentence, Formula};
use crate::signature::{interpret, Signature};
use crate::sphere_automaton::{register_invariance, SphereAutomaton};
use crate::spheres::{all_spheres, color_bound, extract_sphere, overlap_coloring, overlap_edges};
use crate::word::{Alphabet, DataWord, Value};

type Check = fn() -> Result<String, String>;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub limit: Duration,
    check: Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

impl Report {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {}  ({} ms, limit {} ms)  {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.elapsed_ms,
            self.limit_ms,
            self.detail
        )
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

static CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "fig1-reproduction",
        limit: secs(1),
        check: fig1,
    },
    Criterion {
        id: 2,
        name: "fig2-reproduction",
        limit: secs(1),
        check: fig2,
    },
    Criterion {
        id: 3,
        name: "fig3-reproduction",
        limit: secs(30),
        check: fig3,
    },
    Criterion {
        id: 4,
        name: "canonical-runs",
        limit: secs(300),
        check: canonical_runs,
    },
    Criterion {
        id: 5,
        name: "coloring-and-invariance",
        limit: secs(120),
        check: coloring_and_invariance,
    },
    Criterion {
        id: 6,
        name: "hanf-consistency",
        limit: secs(300),
        check: hanf_consistency,
    },
    Criterion {
        id: 7,
        name: "compiled-membership",
        limit: secs(600),
        check: end_to_end,
    },
    Criterion {
        id: 8,
        name: "closure-laws",
        limit: secs(120),
        check: closure_laws,
    },
    Criterion {
        id: 9,
        name: "pattern-words",
        limit: secs(1),
        check: patterns,
    },
    Criterion {
        id: 10,
        name: "graph-invariance",
        limit: secs(120),
        check: graph_invariance,
    },
];

pub fn criteria() -> &'static [Criterion] {
    CRITERIA
}

impl Criterion {
    /// Runs the check; a check that passes but overruns its limit fails.
    pub fn run(&self) -> Report {
        let start = Instant::now();
        let outcome = (self.check)();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if pass && elapsed > self.limit {
            pass = false;
            detail = format!("over time limit; {detail}");
        }
        Report {
            id: self.id,
            name: self.name,
            pass,
            detail,
            elapsed_ms: elapsed.as_millis(),
            limit_ms: self.limit.as_millis(),
        }
    }
}

pub fn run_all() -> Vec<Report> {
    CRITERIA.iter().map(Criterion::run).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ra() -> Arc<Alphabet> {
    Arc::new(Alphabet::new(["r", "a"], 1).expect("non-empty"))
}

fn words(
    sig: &Signature,
    ab: &Arc<Alphabet>,
    max_len: usize,
    max_vals: usize,
) -> Result<impl Iterator<Item = DataWord>, String> {
    enumerate_words(sig, ab, max_len, max_vals).map_err(err)
}

fn fig1() -> Result<String, String> {
    let sig = Signature::succ_cls1();
    let w = corpus::word("fig1-word");
    let rels = interpret(&sig, &w).map_err(err)?;
    let cls = sig.symbol_index("cls1").expect("symbol");
    ensure(rels[cls] == vec![(2, 7), (3, 5), (4, 6), (6, 8)], || {
        format!("cls1 = {:?}", rels[cls])
    })?;
    let g = build_graph(&sig, &w).map_err(err)?;
    let d = g.dist(1, 8).map_err(err)?;
    ensure(d == Some(3), || format!("dist(1,8) = {d:?}"))?;
    let s = extract_sphere(&g, 4, 1).map_err(err)?;
    ensure(s.node_set() == vec![3, 4, 5, 6], || {
        format!("nodes {:?}", s.node_set())
    })?;
    let succ = sig.symbol_index("succ").expect("symbol");
    ensure(s.edges(succ) == vec![(3, 4), (4, 5), (5, 6)], || {
        format!("succ edges {:?}", s.edges(succ))
    })?;
    ensure(s.edges(cls) == vec![(3, 5), (4, 6)], || {
        format!("cls1 edges {:?}", s.edges(cls))
    })?;
    Ok("class successor, dist(1,8) = 3, sphere {3,4,5,6}".into())
}

fn fig2() -> Result<String, String> {
    let sig = Signature::dyn_msc();
    let w = corpus::word("fig2-word");
    let rels = interpret(&sig, &w).map_err(err)?;
    let rel = |name: &str| {
        let mut r = rels[sig.symbol_index(name).expect("symbol")].clone();
        r.sort_unstable();
        r
    };
    let mut proc = vec![
        (1, 2),
        (2, 4),
        (4, 6),
        (3, 7),
        (7, 10),
        (10, 11),
        (5, 8),
        (8, 9),
    ];
    proc.sort_unstable();
    ensure(rel("fork") == vec![(2, 3), (4, 5)], || {
        format!("fork {:?}", rel("fork"))
    })?;
    ensure(rel("msg") == vec![(6, 7), (8, 10), (9, 11)], || {
        format!("msg {:?}", rel("msg"))
    })?;
    ensure(rel("proc") == proc, || format!("proc {:?}", rel("proc")))?;
    let msc = corpus::formula("msc");
    ensure(eval_sentence(&sig, &w, &msc).map_err(err)?, || {
        "MSC false on W2".into()
    })?;
    let cut = w.remove(1).map_err(err)?;
    ensure(!eval_sentence(&sig, &cut, &msc).map_err(err)?, || {
        "MSC true after deleting position 1".into()
    })?;
    Ok("fork, msg, proc match; MSC true, false without position 1".into())
}

/// The normalized members of `{(r,1)…(r,n)(a,1)…(a,n) | n ≥ 1}` up to
/// length `max_len`.
fn in_order_language(max_len: usize) -> BTreeSet<String> {
    (1..=max_len / 2)
        .map(|n| {
            let mut s = String::new();
            for v in 1..=n {
                write!(s, "(r,{v})").unwrap();
            }
            for v in 1..=n {
                write!(s, "(a,{v})").unwrap();
            }
            s
        })
        .collect()
}

fn fig3() -> Result<String, String> {
    let a = corpus::automaton("fig3-automaton");
    let w = corpus::word("fig3-word");
    let cfg = |q: &str, r1: Value, r2: Option<Value>| Config {
        state: q.into(),
        regs: [("r1".to_string(), Some(r1)), ("r2".to_string(), r2)]
            .into_iter()
            .filter_map(|(r, v)| v.map(|v| (r, v)))
            .collect(),
    };
    let table = Run {
        configs: vec![
            cfg("q1", 8, None),
            cfg("q1", 5, Some(8)),
            cfg("q2", 8, None),
            cfg("q2", 5, None),
        ],
        transitions: None,
    };
    let v = run_check(&a, &w, &table);
    ensure(v.is_accepted(), || format!("tabulated run: {v:?}"))?;
    let found = automata::membership(&a, &w, DEFAULT_BUDGET).map_err(err)?;
    let run = found.ok_or("no accepting run found")?;
    ensure(run_check(&a, &w, &run).is_accepted(), || {
        "found run fails run_check".into()
    })?;
    let short = DataWord::parse_compact(ra(), "(r,8)(a,5)").map_err(err)?;
    ensure(
        automata::membership(&a, &short, DEFAULT_BUDGET)
            .map_err(err)?
            .is_none(),
        || "(r,8)(a,5) accepted".into(),
    )?;
    let lang = in_order_language(8);
    let mut n = 0usize;
    let mut members = 0usize;
    for u in words(&a.signature, &a.alphabet, 8, 8)? {
        n += 1;
        let got = automata::membership(&a, &u, DEFAULT_BUDGET)
            .map_err(err)?
            .is_some();
        let want = lang.contains(&u.compact());
        ensure(got == want, || {
            format!("{}: membership {got}, language {want}", u.compact())
        })?;
        members += usize::from(got);
    }
    ensure(members == lang.len(), || {
        format!("{members} members, expected {}", lang.len())
    })?;
    Ok(format!(
        "tabulated run accepted; {n} words agree, {members} members"
    ))
}

/// Words of the sphere-automaton corpus: normalized words over
/// `succ-cls1` with length ≤ 6 and values ≤ 3 at `B ∈ {0,1}`, plus W2.
fn sphere_corpus() -> Result<Vec<(Signature, DataWord, usize)>, String> {
    let sig = Signature::succ_cls1();
    let mut out = Vec::new();
    for w in words(&sig, &ra(), 6, 3)? {
        out.push((sig.clone(), w.clone(), 0));
        out.push((sig.clone(), w, 1));
    }
    out.push((Signature::dyn_msc(), corpus::word("fig2-word"), 1));
    Ok(out)
}

fn canonical_runs() -> Result<String, String> {
    let corpus = sphere_corpus()?;
    let mut runs = Vec::new();
    for (sig, w, b) in &corpus {
        let sa = SphereAutomaton::new(sig.clone(), w.alphabet().clone(), *b).map_err(err)?;
        let c = sa.canonical_run(w).map_err(err)?;
        let v = sa.verify_run(w, &c.run);
        ensure(v.is_accepted(), || {
            format!("{} at B={b}: {v:?}", w.compact())
        })?;
        let g = build_graph(sig, w).map_err(err)?;
        for (idx, cfg) in c.run.configs.iter().enumerate() {
            let s = extract_sphere(&g, idx + 1, *b).map_err(err)?;
            ensure(cfg.state.pi().key() == s.key(), || {
                format!("{} at B={b}: π(q_{}) differs", w.compact(), idx + 1)
            })?;
        }
        if !w.is_empty() {
            runs.push((sa, w, c.run));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut rejected = 0;
    for _ in 0..50 {
        let (sa, w, run) = runs.choose(&mut rng).expect("non-empty corpus");
        let mut run = run.clone();
        let pos = rng.gen_range(0..run.configs.len());
        let regs = &mut run.configs[pos].regs;
        let r = regs
            .keys()
            .nth(rng.gen_range(0..regs.len()))
            .expect("register")
            .clone();
        let old = regs[&r];
        let others: Vec<Value> = w.values().into_iter().filter(|&v| v != old).collect();
        let new = if others.is_empty() || rng.gen_bool(0.5) {
            w.values().into_iter().max().unwrap_or(0) + 1
        } else {
            *others.choose(&mut rng).expect("non-empty")
        };
        regs.insert(r, new);
        if !sa.verify_run(w, &run).is_accepted() {
            rejected += 1;
        }
    }
    ensure(rejected == 50, || {
        format!("only {rejected} of 50 perturbations rejected")
    })?;
    Ok(format!(
        "{} canonical runs verified; 50 of 50 perturbations rejected",
        corpus.len()
    ))
}

fn coloring_and_invariance() -> Result<String, String> {
    let corpus = sphere_corpus()?;
    let mut visited = 0;
    for (sig, w, b) in &corpus {
        let g = build_graph(sig, w).map_err(err)?;
        let colors = overlap_coloring(&g, *b).map_err(err)?;
        let spheres = all_spheres(&g, *b).map_err(err)?;
        for (i, j) in overlap_edges(&g, &spheres, *b) {
            ensure(colors[i - 1] != colors[j - 1], || {
                format!(
                    "{} at B={b}: positions {i} and {j} share a color",
                    w.compact()
                )
            })?;
        }
        let bound = color_bound(*b, sig.len()).map_err(err)?;
        let max = colors.iter().copied().max().unwrap_or(0);
        ensure(u64::from(max) <= bound, || {
            format!("{} at B={b}: color {max} above bound {bound}", w.compact())
        })?;
        let sa = SphereAutomaton::new(sig.clone(), w.alphabet().clone(), *b).map_err(err)?;
        let c = sa.canonical_run(w).map_err(err)?;
        ensure(c.colors == colors, || {
            format!("{}: run colors differ", w.compact())
        })?;
        visited += register_invariance(&sa, w, &c.run)
            .map_err(|e| format!("{} at B={b}: {e}", w.compact()))?;
    }
    Ok(format!(
        "{} words; {visited} simulated nodes checked",
        corpus.len()
    ))
}

fn rank2_sentences() -> Vec<(&'static str, Formula)> {
    ["phi1", "phi2", "ack-has-request", "ack-then-request"]
        .into_iter()
        .map(|n| (n, corpus::formula(n)))
        .collect()
}

/// Parameters that survive validation at the default enumeration size,
/// escalating up to three times.
fn validated_params(
    sig: &Signature,
    ab: &Arc<Alphabet>,
    phi: &Formula,
) -> Result<HanfParams, String> {
    let mut p = default_params(phi);
    for _ in 0..=3 {
        if let Validation::Ok { .. } = validate_params(sig, ab, phi, &p).map_err(err)? {
            return Ok(p);
        }
        p = escalate(p);
    }
    Err("no consistent parameters after three escalations".into())
}

fn hanf_consistency() -> Result<String, String> {
    let sig = Signature::succ_cls1();
    let ab = ra();
    let mut out = Vec::new();
    for (name, phi) in rank2_sentences() {
        let r = classify(&phi);
        ensure(r.is_rfo && r.qrank <= 2, || {
            format!("{name} is not rank-≤2 rFO")
        })?;
        let p = validated_params(&sig, &ab, &phi)?;
        let full = HanfParams {
            max_len: 6,
            max_vals: 3,
            ..p
        };
        match validate_params(&sig, &ab, &phi, &full).map_err(err)? {
            Validation::Ok { words } => out.push(format!(
                "{name}: B={} t={} over {words} words",
                p.radius, p.threshold
            )),
            Validation::Counterexample { u, v } => {
                return Err(format!(
                    "{name}: {} and {} share a type",
                    u.compact(),
                    v.compact()
                ))
            }
        }
    }
    Ok(out.join("; "))
}

fn end_to_end() -> Result<String, String> {
    let sig = Signature::succ_cls1();
    let ab = ra();
    let mut out = Vec::new();
    for name in ["phi1", "phi2", "emso-marked-requests"] {
        let phi = corpus::formula(name);
        let c = compile(&sig, &ab, &phi, &CompileOptions::default()).map_err(err)?;
        let mut n = 0;
        let mut accepted = 0;
        for w in words(&sig, &ab, 5, 3)? {
            n += 1;
            let want = eval_sentence(&sig, &w, &phi).map_err(err)?;
            let got = match compiled_membership(&c, &w).map_err(err)? {
                Membership::Accepted { annotation, run } => {
                    let u = w.annotate(&c.kernel.ext, &annotation);
                    let v = c.automaton.verify_run(&u, &run.run);
                    ensure(v.is_accepted(), || {
                        format!("{name}: certificate for {} rejected: {v:?}", w.compact())
                    })?;
                    true
                }
                Membership::Rejected => false,
                Membership::OutOfCoverage { type_key } => {
                    return Err(format!(
                        "{name}: {} out of coverage ({type_key})",
                        w.compact()
                    ))
                }
            };
            ensure(got == want, || {
                format!("{name}: {} compiled {got}, eval {want}", w.compact())
            })?;
            accepted += usize::from(got);
        }
        let p = c.beta.params;
        out.push(format!(
            "{name}: B={} t={} {} types, {n} words, {accepted} accepted",
            p.radius,
            p.threshold,
            c.beta.entries.len()
        ));
    }
    Ok(out.join("; "))
}

fn member(a: &Cra, w: &DataWord) -> Result<bool, String> {
    Ok(automata::membership(a, w, DEFAULT_BUDGET)
        .map_err(err)?
        .is_some())
}

fn closure_laws() -> Result<String, String> {
    let reqack = corpus::automaton("fig3-automaton");
    let empty = corpus::automaton("empty-only");
    let fresh = corpus::automaton("fresh-requests");
    let mark = corpus::automaton("mark");
    let u = union(&reqack, &empty).map_err(err)?;
    let i_self = intersect(&reqack, &reqack).map_err(err)?;
    let i_fresh = intersect(&fresh, &fresh).map_err(err)?;
    let i_both = intersect(&reqack, &fresh).map_err(err)?;
    let p = project(&mark).map_err(err)?;
    for a in [&u, &i_self, &i_fresh, &i_both, &p] {
        a.validate()
            .map_err(|e| format!("closure output invalid: {e:?}"))?;
    }
    let mut n = 0;
    let mut counts = BTreeMap::new();
    let mut tally = |k: &'static str, b: bool| *counts.entry(k).or_insert(0usize) += usize::from(b);
    for w in words(&reqack.signature, &reqack.alphabet, 5, 5)? {
        n += 1;
        let (r, e, f) = (
            member(&reqack, &w)?,
            member(&empty, &w)?,
            member(&fresh, &w)?,
        );
        let cases = [
            ("union", member(&u, &w)?, r || e),
            ("intersect-self", member(&i_self, &w)?, r),
            ("intersect-self-cma", member(&i_fresh, &w)?, f),
            ("intersect", member(&i_both, &w)?, r && f),
        ];
        for (law, got, want) in cases {
            ensure(got == want, || {
                format!("{law} on {}: {got}, expected {want}", w.compact())
            })?;
            tally(law, got);
        }
    }
    let mut pn = 0;
    for w in words(&p.signature, &p.alphabet, 5, 5)? {
        pn += 1;
        let got = member(&p, &w)?;
        let gammas = mark.alphabet.projection().expect("extended").gamma.len();
        let mut want = false;
        let total = gammas.pow(w.len() as u32);
        for code in 0..total {
            let ann: Vec<usize> = (0..w.len())
                .map(|k| code / gammas.pow(k as u32) % gammas)
                .collect();
            if member(&mark, &w.annotate(&mark.alphabet, &ann))? {
                want = true;
                break;
            }
        }
        ensure(got == want, || {
            format!("project on {}: {got}, expected {want}", w.compact())
        })?;
        tally("project", got);
    }
    let counts: Vec<String> = counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
    Ok(format!("{n} + {pn} words; members: {}", counts.join(", ")))
}

fn patterns() -> Result<String, String> {
    let sig = Signature::cls2();
    let phi = corpus::formula("pattern");
    for k in 1..=3 {
        let w = corpus::gen_nested_patterns(k);
        ensure(eval_sentence(&sig, &w, &phi).map_err(err)?, || {
            format!("false on nested({k})")
        })?;
    }
    let m = corpus::gen_merged_patterns();
    ensure(!eval_sentence(&sig, &m, &phi).map_err(err)?, || {
        "true on merged".into()
    })?;
    Ok("true on nested(1..3), false on merged".into())
}

/// Random injective renaming of the values of `w` into `1..=1000`.
fn renamed(w: &DataWord, rng: &mut ChaCha8Rng) -> DataWord {
    let vals = w.values();
    let mut pool: Vec<Value> = (1..=1000).collect();
    pool.shuffle(rng);
    let map: BTreeMap<Value, Value> = vals.into_iter().zip(pool).collect();
    w.map_values(|v| map[&v])
}

fn graph_invariance() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut pairs: Vec<(Signature, DataWord, DataWord)> = Vec::new();

    // Distinct normalized words with isomorphic graphs: without a successor
    // relation, positions can be permuted.
    let cls = Signature::cls2();
    let ab2 = Arc::new(Alphabet::new(["a"], 2).expect("non-empty"));
    let mut groups: BTreeMap<Vec<Vec<u8>>, Vec<DataWord>> = BTreeMap::new();
    for w in words(&cls, &ab2, 4, 8)? {
        let g = build_graph(&cls, &w).map_err(err)?;
        groups
            .entry(crate::spheres::graph_key(&g))
            .or_default()
            .push(w);
    }
    let mut nontrivial: Vec<(DataWord, DataWord)> = groups
        .values()
        .filter(|ws| ws.len() > 1)
        .flat_map(|ws| ws[1..].iter().map(|v| (ws[0].clone(), v.clone())))
        .collect();
    nontrivial.shuffle(&mut rng);
    pairs.extend(
        nontrivial
            .into_iter()
            .take(40)
            .map(|(u, v)| (cls.clone(), u, v)),
    );

    let sc = Signature::succ_cls1();
    let mut base: Vec<DataWord> = words(&sc, &ra(), 5, 3)?.filter(|w| !w.is_empty()).collect();
    base.shuffle(&mut rng);
    for w in base.into_iter().take(50) {
        let v = renamed(&w, &mut rng);
        pairs.push((sc.clone(), w, v));
    }
    let dy = Signature::dyn_msc();
    let w2 = corpus::word("fig2-word");
    for _ in 0..10 {
        let v = renamed(&w2, &mut rng);
        pairs.push((dy.clone(), w2.clone(), v));
    }
    ensure(pairs.len() == 100, || format!("only {} pairs", pairs.len()))?;

    let sentences: Vec<(&str, Signature, Formula)> = corpus::fixtures()
        .iter()
        .filter_map(|f| Some((f.name, f.signature(), f.formula()?)))
        .filter(|(_, _, phi)| classify(phi).is_rmso)
        .collect();
    let mut evals = 0;
    for (sig, u, v) in &pairs {
        ensure(u != v && equivalent(sig, u, v).map_err(err)?, || {
            format!(
                "{} and {} are not a proper equivalent pair",
                u.compact(),
                v.compact()
            )
        })?;
        for (name, s, phi) in &sentences {
            if s.name() != sig.name() {
                continue;
            }
            let (a, b) = (
                eval_sentence(sig, u, phi).map_err(err)?,
                eval_sentence(sig, v, phi).map_err(err)?,
            );
            ensure(a == b, || {
                format!("{name} differs on {} and {}", u.compact(), v.compact())
            })?;
            evals += 1;
        }
    }
    Ok(format!(
        "100 pairs, {} sentences, {evals} comparisons",
        sentences.len()
    ))
}
