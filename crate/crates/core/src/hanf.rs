//! From local EMSO sentences to sphere automata: the SO prefix becomes a
//! label annotation, the kernel is summarized by Hanf types, and `β` is a
//! table from realized types to truth values built by enumeration.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{classify, emso_kernel, eval_sentence, parse, EvalError, Formula, ParseError};
use crate::signature::{Signature, SignatureError};
use crate::sphere_automaton::{CanonicalRun, SphereAutomaton, SphereRunError};
use crate::spheres::{hanf_type, HanfType, SphereError};
use crate::word::{Alphabet, DataWord, Letter, Value, WordError};

/// Upper bound on the number of words a survey may visit.
pub const WORD_CAP: usize = 5_000_000;
/// Upper bound on `|Γ|^n` annotations tried per word.
pub const ANNOTATION_CAP: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum HanfError {
    #[error("not a sentence")]
    NotSentence,
    #[error("not in rEMSO: {0}")]
    NotLocal(String),
    #[error("signature `{0}` is not renaming-invariant")]
    NotRenamingInvariant(String),
    #[error("enumeration exceeds {0} words")]
    WordBudget(usize),
    #[error("{0} annotations exceed the cap of {ANNOTATION_CAP}")]
    Annotations(u128),
    #[error("inconsistent table: {u} and {v} share a Hanf type but differ in truth value")]
    Inconsistent { u: String, v: String },
    #[error("word is over a different alphabet than the compiled sentence")]
    Alphabet,
    #[error("malformed table: {0}")]
    Table(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Run(#[from] SphereRunError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// Radius `B`, threshold `t`, and the enumeration bounds used to build and
/// validate the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HanfParams {
    pub radius: usize,
    pub threshold: usize,
    pub max_len: usize,
    pub max_vals: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoveragePolicy {
    #[default]
    Error,
    Reject,
}

/// `Γ = 2^{1..n}` by name, in binary counting order: `{}`, `{1}`, `{2}`,
/// `{1,2}`, …
pub fn gamma_names(n: usize) -> Vec<String> {
    (0..1usize << n)
        .map(|mask| {
            let members: Vec<String> = (0..n)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| (j + 1).to_string())
                .collect();
            format!("{{{}}}", members.join(","))
        })
        .collect()
}

/// The rewritten kernel `ψ̂` over `Σ × Γ`.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub so_vars: Vec<String>,
    pub base: Arc<Alphabet>,
    pub ext: Arc<Alphabet>,
    pub psi: Formula,
}

/// Strips the SO prefix and replaces `lab(x)=a` and `x in X_j` by
/// disjunctions over annotated labels.
pub fn rewrite_kernel(sentence: &Formula, base: &Arc<Alphabet>) -> Result<Kernel, HanfError> {
    let report = classify(sentence);
    if !report.is_sentence {
        return Err(HanfError::NotSentence);
    }
    if !report.is_remso {
        let why = if !report.is_rmso {
            "data equality across positions or `lt`"
        } else {
            "second-order quantifier outside the existential prefix"
        };
        return Err(HanfError::NotLocal(why.into()));
    }
    let (so_vars, body) = emso_kernel(sentence);
    let gamma = gamma_names(so_vars.len());
    let ext = Arc::new(Alphabet::extend(base, gamma.clone())?);
    let annotated = |a: &str, g: usize| format!("{a}:{}", gamma[g]);
    let psi = body.map_atoms(&mut |atom| match atom {
        Formula::LabelIs(x, a) => Formula::Or(
            (0..gamma.len())
                .map(|g| Formula::LabelIs(x.clone(), annotated(a, g)))
                .collect(),
        ),
        Formula::In(x, set) => {
            let j = so_vars.iter().position(|v| v == set).expect("sentence");
            Formula::Or(
                base.labels()
                    .iter()
                    .flat_map(|a| {
                        (0..gamma.len())
                            .filter(move |g| g >> j & 1 == 1)
                            .map(move |g| (a, g))
                    })
                    .map(|(a, g)| Formula::LabelIs(x.clone(), annotated(a, g)))
                    .collect(),
            )
        }
        other => other.clone(),
    });
    Ok(Kernel {
        so_vars,
        base: base.clone(),
        ext,
        psi,
    })
}

/// `B(0) = 0`, `B(k+1) = 3·B(k) + 1`.
pub fn locality_radius(qrank: usize) -> usize {
    (0..qrank).fold(0, |b, _| 3 * b + 1)
}

/// Radius from the locality recursion on the quantifier rank; threshold
/// `max(qrank, 1)` since the kernels carry no counting constants.
pub fn default_params(psi: &Formula) -> HanfParams {
    let q = classify(psi).qrank;
    HanfParams {
        radius: locality_radius(q),
        threshold: q.max(1),
        max_len: 5,
        max_vals: 3,
    }
}

pub fn escalate(p: HanfParams) -> HanfParams {
    HanfParams {
        radius: p.radius + 1,
        threshold: p.threshold * 2,
        ..p
    }
}

/// All normalized words of length at most `max_len` using at most
/// `max_vals` distinct values, by length, then data pattern, then labels.
pub fn enumerate_words(
    sig: &Signature,
    alphabet: &Arc<Alphabet>,
    max_len: usize,
    max_vals: usize,
) -> Result<WordIter, HanfError> {
    if !sig.renaming_invariant() {
        return Err(HanfError::NotRenamingInvariant(sig.name().into()));
    }
    Ok(WordIter {
        alphabet: alphabet.clone(),
        max_len,
        max_vals,
        len: 0,
        patterns: vec![Vec::new()],
        pattern: 0,
        labels: Vec::new(),
        done: false,
    })
}

/// Restricted growth strings of length `len` with maximum at most `cap`.
fn growth_strings(len: usize, cap: usize) -> Vec<Vec<Value>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn go(cur: &mut Vec<Value>, len: usize, cap: Value, max: Value, out: &mut Vec<Vec<Value>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in 1..=(max + 1).min(cap) {
            cur.push(v);
            go(cur, len, cap, max.max(v), out);
            cur.pop();
        }
    }
    go(&mut cur, len, cap as Value, 0, &mut out);
    out
}

pub struct WordIter {
    alphabet: Arc<Alphabet>,
    max_len: usize,
    max_vals: usize,
    len: usize,
    patterns: Vec<Vec<Value>>,
    pattern: usize,
    labels: Vec<u16>,
    done: bool,
}

impl Iterator for WordIter {
    type Item = DataWord;

    fn next(&mut self) -> Option<DataWord> {
        loop {
            if self.done {
                return None;
            }
            if self.pattern < self.patterns.len() {
                let m = self.alphabet.m();
                let data = &self.patterns[self.pattern];
                let letters = self
                    .labels
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| Letter {
                        label: crate::word::Label(l),
                        data: data[i * m..(i + 1) * m].to_vec(),
                    })
                    .collect();
                let w = DataWord::new(self.alphabet.clone(), letters).expect("well-formed");
                // Labels fastest, then data pattern.
                let k = self.alphabet.len() as u16;
                let mut carry = true;
                for l in self.labels.iter_mut().rev() {
                    *l += 1;
                    if *l < k {
                        carry = false;
                        break;
                    }
                    *l = 0;
                }
                if carry {
                    self.pattern += 1;
                }
                return Some(w);
            }
            if self.len == self.max_len {
                self.done = true;
                continue;
            }
            self.len += 1;
            let cap = if self.alphabet.m() == 0 {
                0
            } else {
                self.max_vals
            };
            self.patterns = growth_strings(self.len * self.alphabet.m(), cap);
            self.pattern = 0;
            self.labels = vec![0; self.len];
        }
    }
}

/// Outcome of enumerating words and grouping them by Hanf type.
#[derive(Clone, Debug)]
pub enum Validation {
    Ok { words: usize },
    Counterexample { u: DataWord, v: DataWord },
}

struct Survey {
    entries: BTreeMap<String, (bool, DataWord)>,
    words: usize,
    conflict: Option<(DataWord, DataWord)>,
}

fn survey(
    sig: &Signature,
    alphabet: &Arc<Alphabet>,
    psi: &Formula,
    p: &HanfParams,
) -> Result<Survey, HanfError> {
    let mut s = Survey {
        entries: BTreeMap::new(),
        words: 0,
        conflict: None,
    };
    for w in enumerate_words(sig, alphabet, p.max_len, p.max_vals)? {
        s.words += 1;
        if s.words > WORD_CAP {
            return Err(HanfError::WordBudget(WORD_CAP));
        }
        let key = hanf_type(sig, &w, p.radius, p.threshold)?.type_key();
        let truth = eval_sentence(sig, &w, psi)?;
        match s.entries.get(&key) {
            Some((t, u)) if *t != truth => {
                s.conflict = Some((u.clone(), w));
                return Ok(s);
            }
            Some(_) => {}
            None => {
                s.entries.insert(key, (truth, w));
            }
        }
    }
    Ok(s)
}

/// Looks for two enumerated words with equal Hanf type and different truth
/// values of `psi`.
pub fn validate_params(
    sig: &Signature,
    alphabet: &Arc<Alphabet>,
    psi: &Formula,
    params: &HanfParams,
) -> Result<Validation, HanfError> {
    let s = survey(sig, alphabet, psi, params)?;
    Ok(match s.conflict {
        Some((u, v)) => Validation::Counterexample { u, v },
        None => Validation::Ok { words: s.words },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub max_len: usize,
    pub max_vals: usize,
    pub words: usize,
}

/// `β` as a table over realized Hanf types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaTable {
    pub params: HanfParams,
    pub entries: BTreeMap<String, bool>,
    pub coverage: Coverage,
    pub policy: CoveragePolicy,
}

impl BetaTable {
    pub fn lookup(&self, ty: &HanfType) -> Option<bool> {
        self.entries.get(&ty.type_key()).copied()
    }
}

pub fn build_beta(
    sig: &Signature,
    alphabet: &Arc<Alphabet>,
    psi: &Formula,
    params: &HanfParams,
    policy: CoveragePolicy,
) -> Result<BetaTable, HanfError> {
    let s = survey(sig, alphabet, psi, params)?;
    if let Some((u, v)) = s.conflict {
        return Err(HanfError::Inconsistent {
            u: u.compact(),
            v: v.compact(),
        });
    }
    Ok(BetaTable {
        params: *params,
        entries: s.entries.into_iter().map(|(k, (t, _))| (k, t)).collect(),
        coverage: Coverage {
            max_len: params.max_len,
            max_vals: params.max_vals,
            words: s.words,
        },
        policy,
    })
}

#[derive(Clone, Debug)]
pub struct CompileOptions {
    /// Starting parameters; `default_params` of the kernel when absent.
    pub params: Option<HanfParams>,
    /// How many escalation steps to try when validation fails.
    pub escalations: usize,
    pub policy: CoveragePolicy,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            params: None,
            escalations: 3,
            policy: CoveragePolicy::Error,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompiledCra {
    pub sentence: Formula,
    pub signature: Signature,
    pub ext_signature: Signature,
    pub kernel: Kernel,
    pub beta: BetaTable,
    /// `A_B` over `S_Γ` and `Σ × Γ`.
    pub automaton: SphereAutomaton,
}

pub fn compile(
    sig: &Signature,
    base: &Arc<Alphabet>,
    sentence: &Formula,
    opts: &CompileOptions,
) -> Result<CompiledCra, HanfError> {
    let kernel = rewrite_kernel(sentence, base)?;
    let ext_sig = sig.extended();
    let mut params = opts.params.unwrap_or_else(|| default_params(&kernel.psi));
    let mut attempt = 0;
    let beta = loop {
        match build_beta(&ext_sig, &kernel.ext, &kernel.psi, &params, opts.policy) {
            Err(HanfError::Inconsistent { .. }) if attempt < opts.escalations => {
                attempt += 1;
                params = escalate(params);
            }
            other => break other?,
        }
    };
    assemble(sig, sentence, kernel, beta)
}

fn assemble(
    sig: &Signature,
    sentence: &Formula,
    kernel: Kernel,
    beta: BetaTable,
) -> Result<CompiledCra, HanfError> {
    let ext_sig = sig.extended();
    let automaton = SphereAutomaton::new(ext_sig.clone(), kernel.ext.clone(), beta.params.radius)?;
    Ok(CompiledCra {
        sentence: sentence.clone(),
        signature: sig.clone(),
        ext_signature: ext_sig,
        kernel,
        beta,
        automaton,
    })
}

#[derive(Clone, Debug)]
pub enum Membership {
    /// Some annotation's type maps to true; the certificate is that
    /// annotation (Γ indices per position) and its canonical run.
    Accepted {
        annotation: Vec<usize>,
        run: Box<CanonicalRun>,
    },
    Rejected,
    /// No annotation maps to true and some type is missing from the table.
    OutOfCoverage {
        type_key: String,
    },
}

impl CompiledCra {
    /// Hanf type of an annotated word, read off `π` of its canonical run.
    pub fn run_type(&self, run: &CanonicalRun) -> HanfType {
        HanfType::from_spheres(
            self.beta.params.radius,
            self.beta.params.threshold,
            run.run.configs.iter().map(|c| c.state.pi()),
        )
    }

    /// `proj_Σ` by annotation enumeration: tries every Γ-annotation of `w`.
    pub fn membership(&self, w: &DataWord) -> Result<Membership, HanfError> {
        if w.alphabet() != &self.kernel.base {
            return Err(HanfError::Alphabet);
        }
        let g = self.kernel.ext.projection().expect("extended").gamma.len();
        let total = (g as u128).checked_pow(w.len() as u32).unwrap_or(u128::MAX);
        if total > ANNOTATION_CAP as u128 {
            return Err(HanfError::Annotations(total));
        }
        let mut gammas = vec![0usize; w.len()];
        let mut missing = None;
        loop {
            let u = w.annotate(&self.kernel.ext, &gammas);
            let run = self.automaton.canonical_run(&u)?;
            let ty = self.run_type(&run);
            match self.beta.lookup(&ty) {
                Some(true) => {
                    return Ok(Membership::Accepted {
                        annotation: gammas,
                        run: Box::new(run),
                    })
                }
                Some(false) => {}
                None => {
                    missing.get_or_insert_with(|| ty.type_key());
                }
            }
            let mut carry = true;
            for x in gammas.iter_mut().rev() {
                *x += 1;
                if *x < g {
                    carry = false;
                    break;
                }
                *x = 0;
            }
            if carry {
                break;
            }
        }
        Ok(match (missing, self.beta.policy) {
            (Some(type_key), CoveragePolicy::Error) => Membership::OutOfCoverage { type_key },
            _ => Membership::Rejected,
        })
    }

    pub fn to_table_json(&self) -> TableFile {
        TableFile {
            sentence: self.sentence.to_string(),
            signature: self.signature.name().to_string(),
            alphabet: self.kernel.base.labels().to_vec(),
            m: self.kernel.base.m(),
            params: self.beta.params,
            policy: self.beta.policy,
            entries: self
                .beta
                .entries
                .iter()
                .map(|(k, &v)| TableEntry {
                    type_key: k.clone(),
                    value: v,
                })
                .collect(),
            coverage: self.beta.coverage.clone(),
        }
    }

    /// Rebuilds a compiled sentence from a serialized table without
    /// re-enumerating.
    pub fn from_table_json(t: &TableFile) -> Result<CompiledCra, HanfError> {
        let sig = Signature::builtin_by_name(&t.signature)?;
        let base = Arc::new(Alphabet::new(t.alphabet.clone(), t.m)?);
        let sentence = parse(&t.sentence)?;
        let kernel = rewrite_kernel(&sentence, &base)?;
        let beta = BetaTable {
            params: t.params,
            entries: t
                .entries
                .iter()
                .map(|e| (e.type_key.clone(), e.value))
                .collect(),
            coverage: t.coverage.clone(),
            policy: t.policy,
        };
        if beta.entries.len() != t.entries.len() {
            return Err(HanfError::Table("duplicate type keys".into()));
        }
        assemble(&sig, &sentence, kernel, beta)
    }
}

pub fn compiled_membership(c: &CompiledCra, w: &DataWord) -> Result<Membership, HanfError> {
    c.membership(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub type_key: String,
    pub value: bool,
}

/// On-disk form of a compiled sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFile {
    pub sentence: String,
    pub signature: String,
    pub alphabet: Vec<String>,
    pub m: usize,
    pub params: HanfParams,
    #[serde(default)]
    pub policy: CoveragePolicy,
    pub entries: Vec<TableEntry>,
    pub coverage: Coverage,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval;
    use crate::logic::Valuation;

    fn ra() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["r", "a"], 1).unwrap())
    }

    fn w1() -> DataWord {
        DataWord::parse_compact(ra(), "(r,8)(r,5)(r,3)(r,4)(a,3)(a,4)(a,5)(a,4)").unwrap()
    }

    const PHI1: &str = "E x. E y. (lab(x)=r & lab(y)=a & x ~1 y)";
    const PHI2: &str = "A x. E y. (lab(x)=r -> lab(y)=a & x ~1 y)";

    #[test]
    fn radius_recursion() {
        assert_eq!(locality_radius(0), 0);
        assert_eq!(locality_radius(1), 1);
        assert_eq!(locality_radius(2), 4);
        let p = default_params(&parse(PHI1).unwrap());
        assert_eq!((p.radius, p.threshold), (4, 2));
        assert_eq!(default_params(&Formula::True).threshold, 1);
    }

    #[test]
    fn gamma_and_rewrite() {
        assert_eq!(gamma_names(0), vec!["{}"]);
        assert_eq!(gamma_names(2), vec!["{}", "{1}", "{2}", "{1,2}"]);
        let k = rewrite_kernel(&parse("A x. lab(x)=r").unwrap(), &ra()).unwrap();
        assert_eq!(
            k.psi,
            Formula::forall("x", Formula::Or(vec![Formula::label("x", "r:{}")]))
        );
        let k = rewrite_kernel(&parse("E2 X. A x. x in X").unwrap(), &ra()).unwrap();
        assert_eq!(
            k.psi,
            Formula::forall(
                "x",
                Formula::Or(vec![
                    Formula::label("x", "r:{1}"),
                    Formula::label("x", "a:{1}")
                ])
            )
        );
        assert!(matches!(
            rewrite_kernel(&parse("E x. E y. d[1](x)=d[1](y)").unwrap(), &ra()),
            Err(HanfError::NotLocal(_))
        ));
        assert!(matches!(
            rewrite_kernel(&parse("lab(x)=r").unwrap(), &ra()),
            Err(HanfError::NotSentence)
        ));
    }

    #[test]
    fn rewrite_agrees_on_annotations() {
        // φ₁ under a dummy SO prefix: ψ̂ on the annotation encoding X
        // agrees with the original under X.
        let f = parse(&format!("E2 X. {PHI1}")).unwrap();
        let k = rewrite_kernel(&f, &ra()).unwrap();
        let sig = Signature::succ_cls1();
        let w = w1();
        let inner = emso_kernel(&f).1;
        for mask in [0u32, 0b1010_0101, 0xff] {
            let gammas: Vec<usize> = (0..8).map(|i| (mask >> i & 1) as usize).collect();
            let u = w.annotate(&k.ext, &gammas);
            let set = (1..=8).filter(|i| gammas[i - 1] == 1);
            let direct = eval(&sig, &w, inner, &Valuation::default().with_so("X", set)).unwrap();
            assert_eq!(eval_sentence(&sig.extended(), &u, &k.psi).unwrap(), direct);
        }
    }

    #[test]
    fn enumeration() {
        let sig = Signature::succ_cls1();
        let r = Arc::new(Alphabet::new(["r"], 1).unwrap());
        let words: Vec<String> = enumerate_words(&sig, &r, 2, 2)
            .unwrap()
            .map(|w| w.compact())
            .collect();
        assert_eq!(words, vec!["ε", "(r,1)", "(r,1)(r,1)", "(r,1)(r,2)"]);
        assert_eq!(enumerate_words(&sig, &r, 0, 3).unwrap().count(), 1);
        // Against a naive generator deduplicated by normalization.
        let mut naive = std::collections::BTreeSet::new();
        for n in 0..=3u32 {
            for code in 0..(6u32).pow(n) {
                let letters: Vec<(&str, Vec<Value>)> = (0..n)
                    .map(|i| {
                        let c = code / 6u32.pow(i) % 6;
                        (["r", "a"][(c / 3) as usize], vec![(c % 3 + 1) as Value])
                    })
                    .collect();
                naive.insert(
                    DataWord::from_named(ra(), letters)
                        .unwrap()
                        .normalized()
                        .compact(),
                );
            }
        }
        let ours: std::collections::BTreeSet<String> = enumerate_words(&sig, &ra(), 3, 3)
            .unwrap()
            .map(|w| w.compact())
            .collect();
        assert_eq!(ours, naive);
        assert_eq!(
            enumerate_words(&sig, &ra(), 3, 3).unwrap().count(),
            naive.len()
        );
    }

    #[test]
    fn validation() {
        let sig = Signature::succ_cls1();
        let p = |radius, threshold| HanfParams {
            radius,
            threshold,
            max_len: 4,
            max_vals: 3,
        };
        let some_r = parse("E x. lab(x)=r").unwrap();
        assert!(matches!(
            validate_params(&sig, &ra(), &some_r, &p(0, 1)).unwrap(),
            Validation::Ok { .. }
        ));
        let phi3 = parse(
            "A x. A y. (lab(x)=r & lab(y)=r & x succ y -> \
             E x2. E y2. (lab(x2)=a & lab(y2)=a & x ~1 x2 & x2 succ y2 & y ~1 y2))",
        )
        .unwrap();
        let Validation::Counterexample { u, v } =
            validate_params(&sig, &ra(), &phi3, &p(0, 1)).unwrap()
        else {
            panic!("radius 0 cannot see class successors");
        };
        assert_eq!(
            hanf_type(&sig, &u, 0, 1).unwrap(),
            hanf_type(&sig, &v, 0, 1).unwrap()
        );
        assert_ne!(
            eval_sentence(&sig, &u, &phi3).unwrap(),
            eval_sentence(&sig, &v, &phi3).unwrap()
        );
        let empty = HanfParams {
            max_len: 0,
            ..p(0, 1)
        };
        assert!(matches!(
            validate_params(&sig, &ra(), &phi3, &empty).unwrap(),
            Validation::Ok { words: 1 }
        ));
    }

    #[test]
    fn beta_tables() {
        let sig = Signature::succ_cls1();
        let p = HanfParams {
            radius: 0,
            threshold: 1,
            max_len: 3,
            max_vals: 2,
        };
        let t = build_beta(&sig, &ra(), &Formula::True, &p, CoveragePolicy::Error).unwrap();
        assert!(t.entries.values().all(|&v| v));
        let nothing = parse("!(E x. true)").unwrap();
        let t = build_beta(&sig, &ra(), &nothing, &p, CoveragePolicy::Error).unwrap();
        let trues: Vec<&String> = t
            .entries
            .iter()
            .filter(|(_, &v)| v)
            .map(|(k, _)| k)
            .collect();
        assert_eq!(trues, vec!["0:1:"]);
    }

    #[test]
    fn compiled_phi1_phi2() {
        let sig = Signature::succ_cls1();
        let opts = CompileOptions {
            params: Some(HanfParams {
                radius: 4,
                threshold: 2,
                max_len: 4,
                max_vals: 3,
            }),
            ..Default::default()
        };
        let c1 = compile(&sig, &ra(), &parse(PHI1).unwrap(), &opts).unwrap();
        let c2 = compile(&sig, &ra(), &parse(PHI2).unwrap(), &opts).unwrap();
        let empty = DataWord::empty(ra());
        assert!(matches!(
            c1.membership(&empty).unwrap(),
            Membership::Rejected
        ));
        assert!(matches!(
            c2.membership(&empty).unwrap(),
            Membership::Accepted { .. }
        ));
        let w = DataWord::parse_compact(ra(), "(r,1)(a,1)(r,2)").unwrap();
        assert!(matches!(
            c1.membership(&w).unwrap(),
            Membership::Accepted { .. }
        ));
        assert!(matches!(c2.membership(&w).unwrap(), Membership::Rejected));
        // Round trip through the table file.
        let json = serde_json::to_string(&c1.to_table_json()).unwrap();
        let back: TableFile = serde_json::from_str(&json).unwrap();
        let c1b = CompiledCra::from_table_json(&back).unwrap();
        assert_eq!(c1b.beta, c1.beta);
        assert!(matches!(
            c1b.membership(&w).unwrap(),
            Membership::Accepted { .. }
        ));
    }

    #[test]
    fn run_type_matches_direct_type() {
        let sig = Signature::succ_cls1();
        let f = parse(PHI1).unwrap();
        let opts = CompileOptions {
            params: Some(HanfParams {
                radius: 1,
                threshold: 2,
                max_len: 2,
                max_vals: 2,
            }),
            escalations: 0,
            ..Default::default()
        };
        let c = compile(&sig, &ra(), &f, &opts).unwrap();
        let u = w1().annotate(&c.kernel.ext, &[0; 8]);
        let run = c.automaton.canonical_run(&u).unwrap();
        assert_eq!(
            c.run_type(&run),
            hanf_type(&c.ext_signature, &u, 1, 2).unwrap()
        );
        // W1 is far outside the coverage of length 2.
        assert!(matches!(
            c.membership(&w1()).unwrap(),
            Membership::OutOfCoverage { .. }
        ));
    }
}
