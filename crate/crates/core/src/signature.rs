//! Signatures: named binary relation symbols with a per-word interpretation.
//!
//! Every interpretation must satisfy the four structural axioms (order
//! compliance, out-degree ≤ 1, in-degree ≤ 1, monotonicity on equal
//! letters). Built-in interpretations are trusted; user-supplied ones are
//! checked per word by [`axiom_check`].

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::word::DataWord;

/// Interpreted relation as sorted 1-based position pairs.
pub type Relation = Vec<(usize, usize)>;

pub trait Interpretation: Send + Sync + fmt::Debug {
    fn relation(&self, w: &DataWord) -> Relation;

    /// Whether the relation only depends on the equality pattern of data.
    fn renaming_invariant(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug)]
pub struct Symbol {
    pub name: String,
    pub interp: Arc<dyn Interpretation>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("signature `{sig}` expects data arity {expected}, word has {found}")]
    Arity {
        sig: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown signature `{0}`")]
    UnknownSignature(String),
    #[error("axiom violations: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Axioms(Vec<AxiomViolation>),
}

#[derive(Clone, Debug)]
pub struct Signature {
    name: String,
    symbols: Vec<Symbol>,
    arity: Option<usize>,
    trusted: bool,
    base: Option<Box<Signature>>,
}

impl Signature {
    /// A user signature; its interpretations are axiom-checked on every word.
    pub fn custom(name: impl Into<String>, symbols: Vec<Symbol>, arity: Option<usize>) -> Self {
        Signature {
            name: name.into(),
            symbols,
            arity,
            trusted: false,
            base: None,
        }
    }

    fn builtin(name: &str, symbols: Vec<Symbol>, arity: Option<usize>) -> Self {
        Signature {
            name: name.to_string(),
            symbols,
            arity,
            trusted: true,
            base: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol_names(&self) -> Vec<&str> {
        self.symbols.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity(&self) -> Option<usize> {
        self.arity
    }

    pub fn trusted(&self) -> bool {
        self.trusted
    }

    /// Forces (or skips) axiom checking in `build_graph`.
    pub fn with_trust(mut self, trusted: bool) -> Self {
        self.trusted = trusted;
        self
    }

    pub fn renaming_invariant(&self) -> bool {
        self.symbols.iter().all(|s| s.interp.renaming_invariant())
    }

    /// For an extended signature `S_Γ`, the signature it was derived from.
    pub fn base(&self) -> Option<&Signature> {
        self.base.as_deref()
    }

    pub fn check_arity(&self, m: usize) -> Result<(), SignatureError> {
        match self.arity {
            Some(expected) if expected != m => Err(SignatureError::Arity {
                sig: self.name.clone(),
                expected,
                found: m,
            }),
            _ => Ok(()),
        }
    }

    /// `S_Γ`: same symbol names, interpreted on `proj_Σ(w)`.
    pub fn extended(&self) -> Signature {
        Signature {
            name: format!("{}[ext]", self.name),
            symbols: self
                .symbols
                .iter()
                .map(|s| Symbol {
                    name: s.name.clone(),
                    interp: Arc::new(Projected(s.interp.clone())),
                })
                .collect(),
            arity: self.arity,
            trusted: self.trusted,
            base: Some(Box::new(self.clone())),
        }
    }

    /// Resolves the built-in signatures by CLI name.
    ///
    /// `succ` (any `m`), `succ-cls1`, `succ-cls1-cls2`, `cls1-cls2`, `dyn`,
    /// and `clsK` for a single class relation on coordinate `K`.
    pub fn builtin_by_name(name: &str) -> Result<Signature, SignatureError> {
        match name {
            "succ" => Ok(Signature::succ()),
            "succ-cls1" => Ok(Signature::succ_cls1()),
            "succ-cls1-cls2" => Ok(Signature::succ_cls2()),
            "cls1-cls2" => Ok(Signature::cls2()),
            "dyn" => Ok(Signature::dyn_msc()),
            other => {
                if let Some(k) = other
                    .strip_prefix("cls")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                {
                    Ok(Signature::builtin(other, vec![cls_symbol(k)], None))
                } else {
                    Err(SignatureError::UnknownSignature(other.to_string()))
                }
            }
        }
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["succ", "succ-cls1", "succ-cls1-cls2", "cls1-cls2", "dyn"]
    }

    /// `S^m_{+1}`: the direct successor alone.
    pub fn succ() -> Signature {
        Signature::builtin("succ", vec![succ_symbol()], None)
    }

    /// `S¹_{+1,∼}`.
    pub fn succ_cls1() -> Signature {
        Signature::builtin("succ-cls1", vec![succ_symbol(), cls_symbol(1)], Some(1))
    }

    /// `S²_{+1,∼}`.
    pub fn succ_cls2() -> Signature {
        Signature::builtin(
            "succ-cls1-cls2",
            vec![succ_symbol(), cls_symbol(1), cls_symbol(2)],
            Some(2),
        )
    }

    /// `S²_∼`: one class relation per coordinate, no successor.
    pub fn cls2() -> Signature {
        Signature::builtin("cls1-cls2", vec![cls_symbol(1), cls_symbol(2)], Some(2))
    }

    /// `S²_dyn` over `Σ_dyn = {f, n, !, ?}`: `proc`, `fork`, `msg`.
    pub fn dyn_msc() -> Signature {
        Signature::builtin(
            "dyn",
            vec![
                Symbol {
                    name: "proc".into(),
                    interp: Arc::new(SameValue(1)),
                },
                Symbol {
                    name: "fork".into(),
                    interp: Arc::new(Fork),
                },
                Symbol {
                    name: "msg".into(),
                    interp: Arc::new(FifoMsg),
                },
            ],
            Some(2),
        )
    }
}

fn succ_symbol() -> Symbol {
    Symbol {
        name: "succ".into(),
        interp: Arc::new(Successor),
    }
}

fn cls_symbol(k: usize) -> Symbol {
    Symbol {
        name: format!("cls{k}"),
        interp: Arc::new(SameValue(k)),
    }
}

/// `≺₊₁`.
#[derive(Debug)]
pub struct Successor;

impl Interpretation for Successor {
    fn relation(&self, w: &DataWord) -> Relation {
        (1..w.len()).map(|i| (i, i + 1)).collect()
    }
}

/// `≺∼ᵏ`: the next position carrying the same `k`-th value.
#[derive(Debug)]
pub struct SameValue(pub usize);

impl Interpretation for SameValue {
    fn relation(&self, w: &DataWord) -> Relation {
        let k = self.0;
        if k == 0 || k > w.m() {
            return Vec::new();
        }
        let mut rel = Vec::new();
        for i in 1..=w.len() {
            let v = w.datum(i, k);
            if let Some(j) = (i + 1..=w.len()).find(|&j| w.datum(j, k) == v) {
                rel.push((i, j));
            }
        }
        rel
    }
}

/// `P_(a,b)(i,j)`: labels `a`,`b` and crosswise equal identities.
fn crossed(w: &DataWord, a: &str, b: &str, i: usize, j: usize) -> bool {
    w.m() >= 2
        && w.label_name(i) == a
        && w.label_name(j) == b
        && w.datum(i, 1) == w.datum(j, 2)
        && w.datum(i, 2) == w.datum(j, 1)
}

/// Fork edge: nearest `P_(f,n)` match with no intervening match on either side.
#[derive(Debug)]
pub struct Fork;

impl Interpretation for Fork {
    fn relation(&self, w: &DataWord) -> Relation {
        let p = |i, j| crossed(w, "f", "n", i, j);
        let mut rel = Vec::new();
        for i in 1..=w.len() {
            for j in i + 1..=w.len() {
                if p(i, j) && !(i + 1..j).any(|k| p(i, k) || p(k, j)) {
                    rel.push((i, j));
                }
            }
        }
        rel
    }
}

/// FIFO message edge: the N-th send on a channel matches the N-th receive.
#[derive(Debug)]
pub struct FifoMsg;

impl Interpretation for FifoMsg {
    fn relation(&self, w: &DataWord) -> Relation {
        let p = |i, j| crossed(w, "!", "?", i, j);
        let mut rel = Vec::new();
        for i in 1..=w.len() {
            for j in i + 1..=w.len() {
                if !p(i, j) {
                    continue;
                }
                let sends_before = (1..i).filter(|&i2| p(i2, j)).count();
                let recvs_before = (1..j).filter(|&j2| p(i, j2)).count();
                if sends_before == recvs_before {
                    rel.push((i, j));
                }
            }
        }
        rel
    }
}

/// `⊲_Γ`: interprets the wrapped relation on the Σ-projection.
#[derive(Debug)]
pub struct Projected(pub Arc<dyn Interpretation>);

impl Interpretation for Projected {
    fn relation(&self, w: &DataWord) -> Relation {
        self.0.relation(&w.project())
    }

    fn renaming_invariant(&self) -> bool {
        self.0.renaming_invariant()
    }
}

/// Interprets every symbol of `sig` on `w`, in declaration order.
pub fn interpret(sig: &Signature, w: &DataWord) -> Result<Vec<Relation>, SignatureError> {
    sig.check_arity(w.m())?;
    Ok(sig
        .symbols
        .iter()
        .map(|s| {
            let mut r = s.interp.relation(w);
            r.sort_unstable();
            r.dedup();
            r
        })
        .collect())
}

/// Interprets a single symbol by name.
pub fn interpret_symbol(
    sig: &Signature,
    name: &str,
    w: &DataWord,
) -> Result<Relation, SignatureError> {
    sig.check_arity(w.m())?;
    let idx = sig
        .symbol_index(name)
        .ok_or_else(|| SignatureError::UnknownSymbol(name.to_string()))?;
    let mut r = sig.symbols[idx].interp.relation(w);
    r.sort_unstable();
    r.dedup();
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    /// `i ⊲ j` with `i ≥ j`, or an endpoint outside the word.
    Order,
    OutDegree,
    InDegree,
    Monotonicity,
}

impl fmt::Display for AxiomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomKind::Order => "order",
            AxiomKind::OutDegree => "out-degree",
            AxiomKind::InDegree => "in-degree",
            AxiomKind::Monotonicity => "monotonicity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub symbol: String,
    pub kind: AxiomKind,
    /// The offending edges.
    pub edges: Vec<(usize, usize)>,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self
            .edges
            .iter()
            .map(|(i, j)| format!("({i},{j})"))
            .collect::<Vec<_>>();
        write!(f, "{} at `{}`: {}", self.kind, self.symbol, edges.join(" "))
    }
}

/// Checks axioms (1)–(4) for every symbol on `w`; an empty list means pass.
pub fn axiom_check(sig: &Signature, w: &DataWord) -> Result<Vec<AxiomViolation>, SignatureError> {
    let rels = interpret(sig, w)?;
    let mut out = Vec::new();
    for (sym, rel) in sig.symbols.iter().zip(&rels) {
        out.extend(check_relation(&sym.name, rel, w));
    }
    Ok(out)
}

pub(crate) fn check_relation(name: &str, rel: &Relation, w: &DataWord) -> Vec<AxiomViolation> {
    let n = w.len();
    let mut out = Vec::new();
    let mut push = |kind, edges| {
        out.push(AxiomViolation {
            symbol: name.to_string(),
            kind,
            edges,
        })
    };
    for &(i, j) in rel {
        if i == 0 || j == 0 || i > n || j > n || i >= j {
            push(AxiomKind::Order, vec![(i, j)]);
        }
    }
    let mut seen_src = BTreeSet::new();
    let mut seen_dst = BTreeSet::new();
    for &(i, j) in rel {
        if !seen_src.insert(i) {
            let first = *rel.iter().find(|e| e.0 == i).unwrap();
            push(AxiomKind::OutDegree, vec![first, (i, j)]);
        }
        if !seen_dst.insert(j) {
            let first = *rel.iter().find(|e| e.1 == j).unwrap();
            push(AxiomKind::InDegree, vec![first, (i, j)]);
        }
    }
    let in_range = |&(i, j): &(usize, usize)| i >= 1 && j >= 1 && i <= n && j <= n;
    for (a, e1) in rel.iter().enumerate().filter(|(_, e)| in_range(e)) {
        for e2 in rel[a + 1..].iter().filter(|e| in_range(e)) {
            let (i, j) = *e1;
            let (i2, j2) = *e2;
            if w.letter(i) == w.letter(i2)
                && w.letter(j) == w.letter(j2)
                && ((i < i2) != (j < j2) || (i2 < i) != (j2 < j))
            {
                push(AxiomKind::Monotonicity, vec![*e1, *e2]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    fn fig1() -> DataWord {
        let ab = Arc::new(Alphabet::new(["r", "a"], 1).unwrap());
        DataWord::parse_compact(ab, "(r,8)(r,5)(r,3)(r,4)(a,3)(a,4)(a,5)(a,4)").unwrap()
    }

    #[test]
    fn fig1_relations() {
        let rels = interpret(&Signature::succ_cls1(), &fig1()).unwrap();
        assert_eq!(rels[0], (1..=7).map(|i| (i, i + 1)).collect::<Vec<_>>());
        assert_eq!(rels[1], vec![(2, 7), (3, 5), (4, 6), (6, 8)]);
    }

    #[test]
    fn empty_word_has_empty_relations() {
        let ab = Arc::new(Alphabet::new(["f", "n", "!", "?"], 2).unwrap());
        let w = DataWord::empty(ab);
        for r in interpret(&Signature::dyn_msc(), &w).unwrap() {
            assert!(r.is_empty());
        }
        assert!(axiom_check(&Signature::dyn_msc(), &w).unwrap().is_empty());
    }

    #[test]
    fn arity_and_symbol_errors() {
        assert!(matches!(
            interpret(&Signature::dyn_msc(), &fig1()),
            Err(SignatureError::Arity {
                expected: 2,
                found: 1,
                ..
            })
        ));
        assert!(matches!(
            interpret_symbol(&Signature::succ_cls1(), "fork", &fig1()),
            Err(SignatureError::UnknownSymbol(_))
        ));
        assert!(Signature::builtin_by_name("nope").is_err());
        assert_eq!(
            Signature::builtin_by_name("cls3").unwrap().symbol_names(),
            ["cls3"]
        );
    }

    #[derive(Debug)]
    struct Broken;
    impl Interpretation for Broken {
        fn relation(&self, w: &DataWord) -> Relation {
            if w.len() >= 3 {
                vec![(1, 2), (1, 3)]
            } else {
                vec![]
            }
        }
    }

    #[test]
    fn broken_interpretation_reports_out_degree() {
        let sig = Signature::custom(
            "broken",
            vec![Symbol {
                name: "bad".into(),
                interp: Arc::new(Broken),
            }],
            None,
        );
        let v = axiom_check(&sig, &fig1()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, AxiomKind::OutDegree);
        assert_eq!(v[0].symbol, "bad");
        assert_eq!(v[0].edges, vec![(1, 2), (1, 3)]);
    }

    #[derive(Debug)]
    struct Crossing;
    impl Interpretation for Crossing {
        fn relation(&self, w: &DataWord) -> Relation {
            if w.len() >= 4 {
                vec![(1, 4), (2, 3)]
            } else {
                vec![]
            }
        }
    }

    #[test]
    fn crossing_edges_on_equal_letters_violate_monotonicity() {
        let ab = Arc::new(Alphabet::new(["r"], 1).unwrap());
        let w = DataWord::parse_compact(ab, "(r,1)(r,1)(r,1)(r,1)").unwrap();
        let sig = Signature::custom(
            "x",
            vec![Symbol {
                name: "x".into(),
                interp: Arc::new(Crossing),
            }],
            None,
        );
        let v = axiom_check(&sig, &w).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, AxiomKind::Monotonicity);
    }

    #[test]
    fn extended_signature_interprets_projection() {
        let base = Arc::new(Alphabet::new(["r", "a"], 1).unwrap());
        let ext = Arc::new(Alphabet::extend(&base, vec!["0".into(), "1".into()]).unwrap());
        let w = fig1();
        let annotated = w.annotate(&ext, &[0, 1, 1, 0, 1, 0, 0, 1]);
        let sig = Signature::succ_cls1();
        assert_eq!(
            interpret(&sig.extended(), &annotated).unwrap(),
            interpret(&sig, &w).unwrap()
        );
        assert_eq!(sig.extended().base().unwrap().name(), "succ-cls1");
    }
}
