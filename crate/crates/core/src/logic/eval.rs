//! Brute-force evaluation. Formulas are compiled to a slot-indexed form;
//! second-order variables range over subsets encoded as `u64` bitmasks.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::ast::{Formula, ORDER_REL};
use crate::signature::{interpret, Signature, SignatureError};
use crate::word::{DataWord, Label};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown relation symbol `{0}`")]
    UnknownRelation(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("data index {index} out of range 1..={m}")]
    DataIndex { index: usize, m: usize },
    #[error("word length {len} exceeds the evaluation cap {cap}")]
    TooLong { len: usize, cap: usize },
    #[error("valuation position {0} out of range")]
    BadValuation(usize),
    #[error("not a sentence")]
    NotSentence,
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// Caps on the word length, guarding the exponential enumeration.
#[derive(Clone, Copy, Debug)]
pub struct EvalLimits {
    pub max_len_so: usize,
    pub max_len_fo: usize,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits {
            max_len_so: 14,
            max_len_fo: 20,
        }
    }
}

/// Partial assignment of FO variables to positions and SO variables to
/// position sets, all 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    pub fo: BTreeMap<String, usize>,
    pub so: BTreeMap<String, BTreeSet<usize>>,
}

impl Valuation {
    pub fn with_fo(mut self, x: &str, i: usize) -> Self {
        self.fo.insert(x.to_string(), i);
        self
    }

    pub fn with_so(mut self, x: &str, set: impl IntoIterator<Item = usize>) -> Self {
        self.so.insert(x.to_string(), set.into_iter().collect());
        self
    }
}

enum C {
    True,
    False,
    Lab(usize, Label),
    Data(usize, usize, usize, usize),
    Rel(usize, usize, usize),
    Lt(usize, usize),
    PosEq(usize, usize),
    In(usize, usize),
    Not(Box<C>),
    Or(Vec<C>),
    And(Vec<C>),
    ExFo(usize, Box<C>),
    AllFo(usize, Box<C>),
    ExSo(usize, Box<C>),
    AllSo(usize, Box<C>),
}

struct Compiler<'a> {
    sig: &'a Signature,
    w: &'a DataWord,
    fo: Vec<String>,
    so: Vec<String>,
    fo_slots: usize,
    so_slots: usize,
}

impl Compiler<'_> {
    fn fo_slot(&self, v: &str) -> Result<usize, EvalError> {
        self.fo
            .iter()
            .rposition(|x| x == v)
            .ok_or_else(|| EvalError::Unbound(v.to_string()))
    }

    fn so_slot(&self, v: &str) -> Result<usize, EvalError> {
        self.so
            .iter()
            .rposition(|x| x == v)
            .ok_or_else(|| EvalError::Unbound(v.to_string()))
    }

    fn compile(&mut self, f: &Formula) -> Result<C, EvalError> {
        let m = self.w.m();
        Ok(match f {
            Formula::True => C::True,
            Formula::False => C::False,
            Formula::LabelIs(x, a) => {
                let label = self
                    .w
                    .alphabet()
                    .label(a)
                    .ok_or_else(|| EvalError::UnknownLabel(a.clone()))?;
                C::Lab(self.fo_slot(x)?, label)
            }
            Formula::DataEq { x, k, y, l } => {
                for &index in [k, l] {
                    if index == 0 || index > m {
                        return Err(EvalError::DataIndex { index, m });
                    }
                }
                C::Data(self.fo_slot(x)?, *k - 1, self.fo_slot(y)?, *l - 1)
            }
            Formula::Rel(x, r, y) if r == ORDER_REL => C::Lt(self.fo_slot(x)?, self.fo_slot(y)?),
            Formula::Rel(x, r, y) => {
                let s = self
                    .sig
                    .symbol_index(r)
                    .ok_or_else(|| EvalError::UnknownRelation(r.clone()))?;
                C::Rel(self.fo_slot(x)?, s, self.fo_slot(y)?)
            }
            Formula::PosEq(x, y) => C::PosEq(self.fo_slot(x)?, self.fo_slot(y)?),
            Formula::In(x, s) => C::In(self.fo_slot(x)?, self.so_slot(s)?),
            Formula::Not(g) => C::Not(Box::new(self.compile(g)?)),
            Formula::Or(gs) => C::Or(
                gs.iter()
                    .map(|g| self.compile(g))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::And(gs) => C::And(
                gs.iter()
                    .map(|g| self.compile(g))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::ExistsFO(v, g) | Formula::ForallFO(v, g) => {
                self.fo.push(v.clone());
                self.fo_slots = self.fo_slots.max(self.fo.len());
                let slot = self.fo.len() - 1;
                let body = Box::new(self.compile(g)?);
                self.fo.pop();
                if matches!(f, Formula::ExistsFO(..)) {
                    C::ExFo(slot, body)
                } else {
                    C::AllFo(slot, body)
                }
            }
            Formula::ExistsSO(v, g) | Formula::ForallSO(v, g) => {
                self.so.push(v.clone());
                self.so_slots = self.so_slots.max(self.so.len());
                let slot = self.so.len() - 1;
                let body = Box::new(self.compile(g)?);
                self.so.pop();
                if matches!(f, Formula::ExistsSO(..)) {
                    C::ExSo(slot, body)
                } else {
                    C::AllSo(slot, body)
                }
            }
        })
    }
}

struct Ctx<'a> {
    w: &'a DataWord,
    next: Vec<Vec<Option<usize>>>,
    fo: Vec<usize>,
    so: Vec<u64>,
}

impl Ctx<'_> {
    fn eval(&mut self, c: &C) -> bool {
        let n = self.w.len();
        match c {
            C::True => true,
            C::False => false,
            C::Lab(x, a) => self.w.label(self.fo[*x]) == *a,
            C::Data(x, k, y, l) => {
                self.w.letter(self.fo[*x]).data[*k] == self.w.letter(self.fo[*y]).data[*l]
            }
            C::Rel(x, s, y) => self.next[*s][self.fo[*x]] == Some(self.fo[*y]),
            C::Lt(x, y) => self.fo[*x] < self.fo[*y],
            C::PosEq(x, y) => self.fo[*x] == self.fo[*y],
            C::In(x, s) => self.so[*s] >> (self.fo[*x] - 1) & 1 == 1,
            C::Not(g) => !self.eval(g),
            C::Or(gs) => gs.iter().any(|g| self.eval(g)),
            C::And(gs) => gs.iter().all(|g| self.eval(g)),
            C::ExFo(slot, g) | C::AllFo(slot, g) => {
                let want = matches!(c, C::ExFo(..));
                let saved = self.fo[*slot];
                let mut result = !want;
                for i in 1..=n {
                    self.fo[*slot] = i;
                    if self.eval(g) == want {
                        result = want;
                        break;
                    }
                }
                self.fo[*slot] = saved;
                result
            }
            C::ExSo(slot, g) | C::AllSo(slot, g) => {
                let want = matches!(c, C::ExSo(..));
                let saved = self.so[*slot];
                let mut result = !want;
                for set in 0..(1u64 << n) {
                    self.so[*slot] = set;
                    if self.eval(g) == want {
                        result = want;
                        break;
                    }
                }
                self.so[*slot] = saved;
                result
            }
        }
    }
}

/// Evaluates `f` on `w` under `val`.
pub fn eval(
    sig: &Signature,
    w: &DataWord,
    f: &Formula,
    val: &Valuation,
) -> Result<bool, EvalError> {
    eval_with(sig, w, f, val, EvalLimits::default())
}

pub fn eval_with(
    sig: &Signature,
    w: &DataWord,
    f: &Formula,
    val: &Valuation,
    limits: EvalLimits,
) -> Result<bool, EvalError> {
    let n = w.len();
    let mut has_so = false;
    f.visit(&mut |g| {
        if matches!(g, Formula::ExistsSO(..) | Formula::ForallSO(..)) {
            has_so = true
        }
    });
    let cap = if has_so {
        limits.max_len_so.min(63)
    } else {
        limits.max_len_fo
    };
    if n > cap {
        return Err(EvalError::TooLong { len: n, cap });
    }
    let rels = interpret(sig, w)?;
    for (&i, _) in val.fo.iter().map(|(k, v)| (v, k)) {
        if i == 0 || i > n {
            return Err(EvalError::BadValuation(i));
        }
    }
    let mut comp = Compiler {
        sig,
        w,
        fo: val.fo.keys().cloned().collect(),
        so: val.so.keys().cloned().collect(),
        fo_slots: val.fo.len(),
        so_slots: val.so.len(),
    };
    let c = comp.compile(f)?;
    let mut fo = vec![0; comp.fo_slots];
    for (slot, i) in val.fo.values().enumerate() {
        fo[slot] = *i;
    }
    let mut so = vec![0u64; comp.so_slots];
    for (slot, set) in val.so.values().enumerate() {
        for &i in set {
            if i == 0 || i > n || i > 64 {
                return Err(EvalError::BadValuation(i));
            }
            so[slot] |= 1 << (i - 1);
        }
    }
    let mut next = vec![vec![None; n + 1]; rels.len()];
    for (s, rel) in rels.iter().enumerate() {
        for &(i, j) in rel {
            next[s][i] = Some(j);
        }
    }
    let mut ctx = Ctx { w, next, fo, so };
    Ok(ctx.eval(&c))
}

/// Evaluates a sentence under the empty valuation.
pub fn eval_sentence(sig: &Signature, w: &DataWord, f: &Formula) -> Result<bool, EvalError> {
    if !f.is_sentence() {
        return Err(EvalError::NotSentence);
    }
    eval(sig, w, f, &Valuation::default())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::parse::parse;
    use super::*;
    use crate::word::Alphabet;

    fn fig1() -> DataWord {
        let ab = Arc::new(Alphabet::new(["r", "a"], 1).unwrap());
        DataWord::parse_compact(ab, "(r,8)(r,5)(r,3)(r,4)(a,3)(a,4)(a,5)(a,4)").unwrap()
    }

    #[test]
    fn example_sentences_on_fig1() {
        let s = Signature::succ_cls1();
        let phi1 = parse("E x. E y. (lab(x)=r & lab(y)=a & x cls1 y)").unwrap();
        let phi2 = parse("A x. E y. (lab(x)=r -> (lab(y)=a & x cls1 y))").unwrap();
        assert!(eval_sentence(&s, &fig1(), &phi1).unwrap());
        assert!(!eval_sentence(&s, &fig1(), &phi2).unwrap());
    }

    #[test]
    fn open_formula_with_valuation() {
        let s = Signature::succ_cls1();
        let f = parse("lab(x)=r & lab(y)=a & x cls1 y").unwrap();
        let v = Valuation::default().with_fo("x", 3).with_fo("y", 5);
        assert!(eval(&s, &fig1(), &f, &v).unwrap());
        assert_eq!(
            eval(&s, &fig1(), &f, &Valuation::default()),
            Err(EvalError::Unbound("x".into()))
        );
        let g = parse("x in X").unwrap();
        let v = Valuation::default().with_fo("x", 2).with_so("X", [2, 4]);
        assert!(eval(&s, &fig1(), &g, &v).unwrap());
    }

    #[test]
    fn empty_word_quantifiers() {
        let s = Signature::succ_cls1();
        let w = DataWord::empty(fig1().alphabet().clone());
        assert!(!eval_sentence(&s, &w, &parse("E x. true").unwrap()).unwrap());
        assert!(eval_sentence(&s, &w, &parse("A x. lab(x)=r").unwrap()).unwrap());
    }

    #[test]
    fn second_order_parity() {
        // Some set contains every r-position and alternates along cls1 edges.
        let f = parse(
            "E2 X. (A x. (lab(x)=r -> x in X) & A x. A y. (x cls1 y -> (x in X <-> !(y in X))))",
        )
        .unwrap();
        assert!(eval_sentence(&Signature::succ_cls1(), &fig1(), &f).unwrap());
        let ab = fig1().alphabet().clone();
        let w = DataWord::parse_compact(ab, "(r,1)(r,1)").unwrap();
        assert!(!eval_sentence(&Signature::succ_cls1(), &w, &f).unwrap());
    }

    #[test]
    fn caps_and_errors() {
        let s = Signature::succ();
        let ab = Arc::new(Alphabet::new(["a"], 0).unwrap());
        let w = DataWord::new(
            ab,
            vec![
                crate::word::Letter {
                    label: Label(0),
                    data: vec![]
                };
                15
            ],
        )
        .unwrap();
        assert!(matches!(
            eval_sentence(&s, &w, &parse("E2 X. true").unwrap()),
            Err(EvalError::TooLong { len: 15, cap: 14 })
        ));
        assert!(matches!(
            eval_sentence(&s, &w, &parse("E x. lab(x)=b").unwrap()),
            Err(EvalError::UnknownLabel(_))
        ));
        assert!(matches!(
            eval_sentence(&s, &w, &parse("E x. x fork x").unwrap()),
            Err(EvalError::UnknownRelation(_))
        ));
    }
}
