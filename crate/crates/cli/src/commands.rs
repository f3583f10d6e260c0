use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{json, Value as Json};

use cra_core::automata::{self, run_check, run_table, MembershipError};
use cra_core::corpus::{self, FixtureKind};
use cra_core::hanf::{
    self, compiled_membership, default_params, enumerate_words, rewrite_kernel, CompileOptions,
    CompiledCra, CoveragePolicy, HanfError, HanfParams, Membership, TableFile,
};
use cra_core::logic::{classify, eval_sentence};
use cra_core::oracle;
use cra_core::sphere_automaton::{sphere_run_table, SphereAutomaton};
use cra_core::spheres::{color_bound, hanf_type as type_of};
use cra_core::{axiom_check, build_graph, Alphabet, DataWord, DwGraph, Signature};

use crate::input::{self, alphabet_flags, check_formula, pick_signature};
use crate::{AlphabetFlags, Common, Failure, Policy};

type Out = Result<String, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::usage(e.to_string())
}

fn pretty(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn graph_of(sig: &Signature, w: &DataWord) -> Result<DwGraph, Failure> {
    build_graph(sig, w).map_err(usage)
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn validate(
    common: &Common,
    ab: &AlphabetFlags,
    word: Option<&str>,
    formula: Option<&str>,
    automaton: Option<&str>,
) -> Out {
    if word.is_none() && formula.is_none() && automaton.is_none() {
        return Err(Failure::usage("give --word, --formula or --automaton"));
    }
    let flags_ab = alphabet_flags(&ab.alphabet, ab.m)?;
    let mut text = String::new();
    let mut report = serde_json::Map::new();
    let mut ok = true;
    if let Some(arg) = automaton {
        let a = input::automaton(arg)?;
        match a.validate() {
            Ok(r) => {
                writeln!(
                    text,
                    "automaton: valid ({} states, {} registers, {} transitions)\n  class memory automaton: {}\n  non-guessing: {}\n  register automaton: {}",
                    a.states.len(),
                    a.registers.len(),
                    a.transitions.len(),
                    r.is_cma,
                    r.is_non_guessing,
                    r.is_register_automaton
                )
                .unwrap();
                report.insert(
                    "automaton".into(),
                    json!({ "valid": true, "subclasses": r }),
                );
            }
            Err(errs) => {
                ok = false;
                let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
                writeln!(text, "automaton: invalid").unwrap();
                for m in &msgs {
                    writeln!(text, "  {m}").unwrap();
                }
                report.insert(
                    "automaton".into(),
                    json!({ "valid": false, "errors": msgs }),
                );
            }
        }
    }
    if let Some(arg) = formula {
        let f = input::formula(arg)?;
        let r = classify(&f.formula);
        let sig = common.sig.as_deref().map(input::signature).transpose()?;
        let sig = sig.or_else(|| f.fixture.map(|x| x.signature()));
        let alphabet = flags_ab.clone().or_else(|| f.fixture.map(|x| x.alphabet()));
        if let (Some(sig), Some(alphabet)) = (&sig, &alphabet) {
            check_formula(&f.formula, sig, alphabet)?;
        }
        writeln!(
            text,
            "formula: {}\n  sentence: {}\n  fragment: {}\n  quantifier rank: {}",
            f.formula,
            r.is_sentence,
            fragment(&r),
            r.qrank
        )
        .unwrap();
        report.insert(
            "formula".into(),
            json!({ "text": f.formula.to_string(), "report": r }),
        );
    }
    if let Some(arg) = word {
        let w = input::word(arg, flags_ab.as_ref())?;
        let sig = pick_signature(common.sig.as_deref(), &[w.fixture])?;
        let violations = axiom_check(&sig, &w.word).map_err(usage)?;
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        writeln!(
            text,
            "word: {} positions, m = {}, alphabet {}",
            w.word.len(),
            w.word.m(),
            w.word.alphabet().labels().join(" ")
        )
        .unwrap();
        if msgs.is_empty() {
            writeln!(text, "  axioms of `{}`: hold", sig.name()).unwrap();
        } else {
            ok = false;
            writeln!(text, "  axioms of `{}`: violated", sig.name()).unwrap();
            for m in &msgs {
                writeln!(text, "  {m}").unwrap();
            }
        }
        report.insert(
            "word".into(),
            json!({
                "positions": w.word.len(),
                "m": w.word.m(),
                "signature": sig.name(),
                "violations": msgs,
            }),
        );
    }
    let out = if common.json {
        pretty(&Json::Object(report))
    } else {
        text
    };
    if ok {
        Ok(out)
    } else {
        Err(Failure::property(out))
    }
}

fn fragment(r: &cra_core::logic::FragmentReport) -> &'static str {
    match (r.is_fo, r.is_emso, r.is_rmso) {
        (true, _, true) => "rFO",
        (true, _, false) => "FO",
        (false, true, true) => "rEMSO",
        (false, true, false) => "EMSO",
        (false, false, true) => "rMSO",
        (false, false, false) => "MSO",
    }
}

pub fn graph(common: &Common, ab: &AlphabetFlags, word: &str, emit_dot: Option<PathBuf>) -> Out {
    let w = input::word(word, alphabet_flags(&ab.alphabet, ab.m)?.as_ref())?;
    let sig = pick_signature(common.sig.as_deref(), &[w.fixture])?;
    let g = graph_of(&sig, &w.word)?;
    if let Some(path) = &emit_dot {
        write_file(path, &g.to_dot())?;
    }
    let names = sig.symbol_names();
    if common.json {
        let positions: Vec<Json> = (1..=g.len())
            .map(|i| {
                json!({
                    "pos": i,
                    "label": w.word.label_name(i),
                    "data": w.word.letter(i).data,
                    "partition": g.partition(i).to_string(),
                })
            })
            .collect();
        let rels: serde_json::Map<String, Json> = names
            .iter()
            .enumerate()
            .map(|(s, n)| (n.to_string(), json!(g.edges(s))))
            .collect();
        return Ok(pretty(&json!({
            "signature": sig.name(),
            "positions": positions,
            "relations": rels,
            "components": g.components(),
        })));
    }
    let mut out = String::new();
    writeln!(out, "signature {}", sig.name()).unwrap();
    for i in 1..=g.len() {
        writeln!(
            out,
            "{i:>3}  {:<6} ν = {}",
            w.word.label_name(i),
            g.partition(i)
        )
        .unwrap();
    }
    for (s, n) in names.iter().enumerate() {
        let edges: Vec<String> = g
            .edges(s)
            .iter()
            .map(|(i, j)| format!("({i},{j})"))
            .collect();
        writeln!(out, "{n}: {}", edges.join(" ")).unwrap();
    }
    let comps: Vec<String> = g
        .components()
        .iter()
        .map(|c| {
            format!(
                "{{{}}}",
                c.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    writeln!(out, "components: {}", comps.join(" ")).unwrap();
    Ok(out)
}

pub fn eval(common: &Common, ab: &AlphabetFlags, formula: &str, word: &str) -> Out {
    let f = input::formula(formula)?;
    let w = input::word(word, alphabet_flags(&ab.alphabet, ab.m)?.as_ref())?;
    let sig = pick_signature(common.sig.as_deref(), &[w.fixture, f.fixture])?;
    check_formula(&f.formula, &sig, w.word.alphabet())?;
    let truth = eval_sentence(&sig, &w.word, &f.formula).map_err(usage)?;
    let out = if common.json {
        pretty(&json!({ "value": truth }))
    } else {
        format!("{truth}\n")
    };
    if truth {
        Ok(out)
    } else {
        Err(Failure::property(out))
    }
}

fn search(a: &automata::Cra, w: &DataWord, budget: u64) -> Result<Option<automata::Run>, Failure> {
    match automata::membership(a, w, budget) {
        Ok(r) => Ok(r),
        Err(MembershipError::Budget(b)) => Err(Failure::usage(format!(
            "search budget of {b} nodes exceeded; raise --budget"
        ))),
        Err(e) => Err(usage(e)),
    }
}

pub fn run(common: &Common, automaton: &str, word: &str, budget: u64) -> Out {
    let a = input::automaton(automaton)?;
    let w = input::word(word, Some(&a.alphabet))?.word;
    match search(&a, &w, budget)? {
        Some(run) => {
            let verdict = run_check(&a, &w, &run);
            if common.json {
                let configs: Vec<Json> = run
                    .configs
                    .iter()
                    .map(|c| json!({ "state": c.state, "regs": c.regs }))
                    .collect();
                Ok(pretty(&json!({
                    "accepted": true,
                    "transitions": run.transitions.as_ref().map(|t| t.iter().map(|x| x + 1).collect::<Vec<_>>()),
                    "configs": configs,
                    "check": verdict.is_accepted(),
                })))
            } else {
                let mut out = run_table(&a, &w, &run);
                writeln!(
                    out,
                    "run check: {}",
                    if verdict.is_accepted() {
                        "accepted"
                    } else {
                        "rejected"
                    }
                )
                .unwrap();
                Ok(out)
            }
        }
        None if common.json => Err(Failure::property(pretty(&json!({ "accepted": false })))),
        None => Err(Failure::property("no accepting run\n")),
    }
}

pub fn member(
    common: &Common,
    automaton: Option<&str>,
    table: Option<PathBuf>,
    word: &str,
    budget: u64,
) -> Out {
    if let Some(path) = table {
        return member_table(common, &path, word);
    }
    let a = input::automaton(automaton.expect("clap requires one"))?;
    let w = input::word(word, Some(&a.alphabet))?.word;
    let found = search(&a, &w, budget)?.is_some();
    let out = match (common.json, found) {
        (true, _) => pretty(&json!({ "member": found })),
        (false, true) => "accepting run found\n".into(),
        (false, false) => "no accepting run\n".into(),
    };
    if found {
        Ok(out)
    } else {
        Err(Failure::property(out))
    }
}

fn member_table(common: &Common, path: &PathBuf, word: &str) -> Out {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let table: TableFile = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let c = CompiledCra::from_table_json(&table).map_err(usage)?;
    let w = input::word(word, Some(&c.kernel.base))?.word;
    let m = compiled_membership(&c, &w).map_err(usage)?;
    let gamma = c.kernel.ext.projection().expect("extended").gamma.clone();
    let (json_out, text, ok) = match &m {
        Membership::Accepted { annotation, .. } => {
            let names: Vec<&str> = annotation.iter().map(|&g| gamma[g].as_str()).collect();
            (
                json!({ "result": "accepted", "annotation": names }),
                format!("accepted\nannotation: {}\n", names.join(" ")),
                true,
            )
        }
        Membership::Rejected => (json!({ "result": "rejected" }), "rejected\n".into(), false),
        Membership::OutOfCoverage { type_key } => (
            json!({ "result": "out_of_coverage", "type_key": type_key }),
            format!("out of coverage: no table entry for type {type_key}\n"),
            false,
        ),
    };
    let out = if common.json { pretty(&json_out) } else { text };
    if ok {
        Ok(out)
    } else {
        Err(Failure::property(out))
    }
}

pub fn spheres(
    common: &Common,
    ab: &AlphabetFlags,
    word: &str,
    radius: usize,
    emit_dot: Option<PathBuf>,
) -> Out {
    let w = input::word(word, alphabet_flags(&ab.alphabet, ab.m)?.as_ref())?;
    let sig = pick_signature(common.sig.as_deref(), &[w.fixture])?;
    let w = w.word;
    let sa = SphereAutomaton::new(sig.clone(), w.alphabet().clone(), radius).map_err(usage)?;
    let c = sa.canonical_run(&w).map_err(usage)?;
    let verdict = sa.verify_run(&w, &c.run);
    if let Some(dir) = &emit_dot {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
        for (idx, s) in c.spheres.iter().enumerate() {
            let name = format!("sphere-{}", idx + 1);
            write_file(&dir.join(format!("{name}.dot")), &s.to_dot(&name, None))?;
        }
    }
    let bound = color_bound(radius, sig.len()).map_err(usage)?;
    if common.json {
        let rows: Vec<Json> = c
            .spheres
            .iter()
            .zip(&c.colors)
            .zip(&c.run.configs)
            .map(|((s, col), cfg)| {
                json!({
                    "pos": s.center,
                    "key": s.key().to_string(),
                    "nodes": s.node_set(),
                    "color": col,
                    "members": cfg.state.members().len(),
                })
            })
            .collect();
        return Ok(pretty(&json!({
            "signature": sig.name(),
            "radius": radius,
            "color_bound": bound,
            "positions": rows,
            "verified": verdict.is_accepted(),
        })));
    }
    let mut out = String::new();
    writeln!(
        out,
        "B = {radius}, signature {}, color bound {bound}",
        sig.name()
    )
    .unwrap();
    writeln!(out, "pos  sphere      color  nodes").unwrap();
    for (s, col) in c.spheres.iter().zip(&c.colors) {
        let nodes: Vec<String> = s.node_set().iter().map(|i| i.to_string()).collect();
        writeln!(
            out,
            "{:<4} {}  {:<5}  {{{}}}",
            s.center,
            s.key().short(),
            col,
            nodes.join(",")
        )
        .unwrap();
    }
    out.push('\n');
    out.push_str(&sphere_run_table(&w, &c.run));
    writeln!(
        out,
        "canonical run: {}",
        match &verdict {
            automata::RunVerdict::Accepted => "accepted".to_string(),
            automata::RunVerdict::Rejected(why) => format!("rejected: {why}"),
        }
    )
    .unwrap();
    if verdict.is_accepted() {
        Ok(out)
    } else {
        Err(Failure::property(out))
    }
}

pub fn hanf_type(
    common: &Common,
    ab: &AlphabetFlags,
    word: &str,
    radius: usize,
    threshold: usize,
) -> Out {
    let w = input::word(word, alphabet_flags(&ab.alphabet, ab.m)?.as_ref())?;
    let sig = pick_signature(common.sig.as_deref(), &[w.fixture])?;
    let ty = type_of(&sig, &w.word, radius, threshold).map_err(usage)?;
    if common.json {
        let entries: Vec<Json> = ty
            .counts()
            .iter()
            .map(|(k, c)| {
                json!({
                    "key": k.to_string(),
                    "count": c,
                    "size": ty.sphere(k).map_or(0, |s| s.len()),
                })
            })
            .collect();
        return Ok(pretty(&json!({
            "radius": ty.radius,
            "threshold": ty.threshold,
            "type_key": ty.type_key(),
            "entries": entries,
        })));
    }
    let mut out = format!(
        "B = {}, t = {}\ncount  sphere      size  center\n",
        ty.radius, ty.threshold
    );
    for (k, c) in ty.counts() {
        let s = ty.sphere(k).expect("representative");
        let at_least = if *c == ty.threshold { "≥" } else { " " };
        writeln!(
            out,
            "{at_least}{c:<5} {}  {:<4}  {} {}",
            k.short(),
            s.len(),
            s.alphabet().name(s.label(s.center())),
            s.partition(s.center())
        )
        .unwrap();
    }
    Ok(out)
}

pub struct ParamFlags {
    pub radius: Option<usize>,
    pub threshold: Option<usize>,
    pub max_len: Option<usize>,
    pub max_vals: Option<usize>,
}

fn hanf_failure(e: HanfError) -> Failure {
    match e {
        HanfError::Inconsistent { .. } | HanfError::NotLocal(_) | HanfError::NotSentence => {
            Failure::property(format!("{e}\n"))
        }
        e => usage(e),
    }
}

pub fn compile(
    common: &Common,
    ab: &AlphabetFlags,
    formula: &str,
    p: ParamFlags,
    escalations: usize,
    policy: Policy,
    out: Option<PathBuf>,
) -> Out {
    let f = input::formula(formula)?;
    let sig = pick_signature(common.sig.as_deref(), &[f.fixture])?;
    let base: Arc<Alphabet> = alphabet_flags(&ab.alphabet, ab.m)?
        .or_else(|| f.fixture.map(|x| x.alphabet()))
        .ok_or_else(|| Failure::usage("--alphabet is required"))?;
    check_formula(&f.formula, &sig, &base)?;
    let kernel = rewrite_kernel(&f.formula, &base).map_err(hanf_failure)?;
    let d = default_params(&kernel.psi);
    let params = HanfParams {
        radius: p.radius.unwrap_or(d.radius),
        threshold: p.threshold.unwrap_or(d.threshold),
        max_len: p.max_len.unwrap_or(d.max_len),
        max_vals: p.max_vals.unwrap_or(d.max_vals),
    };
    let opts = CompileOptions {
        params: Some(params),
        escalations,
        policy: match policy {
            Policy::Error => CoveragePolicy::Error,
            Policy::Reject => CoveragePolicy::Reject,
        },
    };
    let c = hanf::compile(&sig, &base, &f.formula, &opts).map_err(hanf_failure)?;
    let table = serde_json::to_string_pretty(&c.to_table_json()).expect("serializable") + "\n";
    let bp = c.beta.params;
    let summary = json!({
        "radius": bp.radius,
        "threshold": bp.threshold,
        "max_len": bp.max_len,
        "max_vals": bp.max_vals,
        "types": c.beta.entries.len(),
        "words": c.beta.coverage.words,
        "true_types": c.beta.entries.values().filter(|v| **v).count(),
    });
    match out {
        Some(path) => {
            write_file(&path, &table)?;
            Ok(if common.json {
                pretty(&summary)
            } else {
                format!(
                    "compiled with B = {}, t = {} over {} words (length ≤ {}, values ≤ {}): {} types, {} true\nwrote {}\n",
                    bp.radius,
                    bp.threshold,
                    c.beta.coverage.words,
                    bp.max_len,
                    bp.max_vals,
                    c.beta.entries.len(),
                    summary["true_types"],
                    path.display()
                )
            })
        }
        None => Ok(table),
    }
}

pub fn enumerate(
    common: &Common,
    ab: &AlphabetFlags,
    max_len: usize,
    max_vals: usize,
    formula: Option<&str>,
) -> Out {
    let f = formula.map(input::formula).transpose()?;
    let fx = f.as_ref().and_then(|f| f.fixture);
    let sig = pick_signature(common.sig.as_deref(), &[fx])?;
    let alphabet = alphabet_flags(&ab.alphabet, ab.m)?
        .or_else(|| fx.map(|x| x.alphabet()))
        .ok_or_else(|| Failure::usage("--alphabet is required"))?;
    if let Some(f) = &f {
        check_formula(&f.formula, &sig, &alphabet)?;
    }
    let words = enumerate_words(&sig, &alphabet, max_len, max_vals).map_err(usage)?;
    let mut out = String::new();
    let mut rows = Vec::new();
    for w in words {
        let truth = f
            .as_ref()
            .map(|f| eval_sentence(&sig, &w, &f.formula))
            .transpose()
            .map_err(usage)?;
        if common.json {
            rows.push(json!({ "word": w.compact(), "value": truth }));
        } else {
            match truth {
                Some(t) => writeln!(out, "{}\t{t}", w.compact()).unwrap(),
                None => writeln!(out, "{}", w.compact()).unwrap(),
            }
        }
    }
    Ok(if common.json {
        pretty(&json!(rows))
    } else {
        out
    })
}

pub fn oracle(json_out: bool, only: &[u8]) -> Out {
    let selected: Vec<&oracle::Criterion> = oracle::criteria()
        .iter()
        .filter(|c| only.is_empty() || only.contains(&c.id))
        .collect();
    if selected.is_empty() {
        return Err(Failure::usage("no criteria selected"));
    }
    let reports: Vec<oracle::Report> = selected.iter().map(|c| c.run()).collect();
    let pass = reports.iter().all(|r| r.pass);
    let out = if json_out {
        pretty(&json!(reports))
    } else {
        let mut s: String = reports.iter().map(|r| r.line() + "\n").collect();
        let passed = reports.iter().filter(|r| r.pass).count();
        writeln!(s, "{passed}/{} criteria passed", reports.len()).unwrap();
        s
    };
    if pass {
        Ok(out)
    } else {
        Err(Failure::property(out))
    }
}

pub fn examples_list(json_out: bool) -> Out {
    let fx = corpus::fixtures();
    if json_out {
        let rows: Vec<Json> = fx
            .iter()
            .map(|f| {
                json!({
                    "name": f.name,
                    "kind": f.kind.as_str(),
                    "signature": f.signature,
                    "note": f.note,
                })
            })
            .collect();
        return Ok(pretty(&json!(rows)));
    }
    let mut out = String::new();
    for f in fx {
        writeln!(
            out,
            "{:<22} {:<11} {:<10} {}",
            f.name,
            f.kind.as_str(),
            f.signature,
            f.note
        )
        .unwrap();
    }
    Ok(out)
}

pub fn examples_show(name: &str) -> Out {
    let f = corpus::fixture(name).ok_or_else(|| Failure::usage(format!("no fixture `{name}`")))?;
    let mut out = format!(
        "# {} ({}, {})\n# {}\n",
        f.name,
        f.kind.as_str(),
        f.signature,
        f.note
    );
    if f.kind == FixtureKind::WordFamily {
        let w = f.word().expect("family");
        writeln!(out, "# generated by {}", f.payload).unwrap();
        out.push_str(&w.to_string());
    } else {
        out.push_str(f.payload);
        if !out.ends_with('\n') {
            out.push('\n');
        }
    }
    Ok(out)
}
