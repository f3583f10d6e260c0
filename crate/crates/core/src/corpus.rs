//! Built-in fixtures, stored in the repository's text formats.

use std::sync::Arc;

use crate::automata::Cra;
use crate::logic::{parse, Formula};
use crate::signature::Signature;
use crate::word::{Alphabet, DataWord, Letter, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    Word,
    Formula,
    Automaton,
    WordFamily,
}

impl FixtureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FixtureKind::Word => "word",
            FixtureKind::Formula => "formula",
            FixtureKind::Automaton => "automaton",
            FixtureKind::WordFamily => "word_family",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub kind: FixtureKind,
    /// Signature the payload is meant for.
    pub signature: &'static str,
    /// Alphabet and data arity for formulas, which do not carry them.
    pub alphabet: &'static [&'static str],
    pub m: usize,
    pub payload: &'static str,
    pub note: &'static str,
}

const RA: &[&str] = &["r", "a"];
const DYN: &[&str] = &["f", "n", "!", "?"];

macro_rules! fixture {
    ($name:literal, $kind:ident, $sig:literal, $ab:expr, $m:literal, $file:literal, $note:literal) => {
        Fixture {
            name: $name,
            kind: FixtureKind::$kind,
            signature: $sig,
            alphabet: $ab,
            m: $m,
            payload: include_str!(concat!("../fixtures/", $file)),
            note: $note,
        }
    };
}

static FIXTURES: &[Fixture] = &[
    fixture!(
        "fig1-word",
        Word,
        "succ-cls1",
        RA,
        1,
        "fig1-word.dw",
        "eight requests and acknowledgments of four processes"
    ),
    fixture!(
        "fig2-word",
        Word,
        "dyn",
        DYN,
        2,
        "fig2-word.dw",
        "message sequence chart with forks and FIFO messages"
    ),
    fixture!(
        "fig3-word",
        Word,
        "succ-cls1",
        RA,
        1,
        "fig3-word.dw",
        "two requests acknowledged in order"
    ),
    fixture!(
        "fig3-automaton",
        Automaton,
        "succ-cls1",
        RA,
        1,
        "fig3-automaton.cra",
        "non-guessing automaton for in-order acknowledgment"
    ),
    fixture!(
        "empty-only",
        Automaton,
        "succ-cls1",
        RA,
        1,
        "empty-only.cra",
        "accepts only the empty word"
    ),
    fixture!(
        "fresh-requests",
        Automaton,
        "succ-cls1",
        RA,
        1,
        "fresh-requests.cra",
        "class memory automaton: every request opens a new class"
    ),
    fixture!(
        "mark",
        Automaton,
        "succ",
        RA,
        1,
        "mark.cra",
        "over the annotated alphabet: exactly one position is marked"
    ),
    fixture!(
        "phi1",
        Formula,
        "succ-cls1",
        RA,
        1,
        "phi1.fo",
        "some request is acknowledged"
    ),
    fixture!(
        "phi2",
        Formula,
        "succ-cls1",
        RA,
        1,
        "phi2.fo",
        "the next event of every requesting process is an acknowledgment"
    ),
    fixture!(
        "phi3",
        Formula,
        "succ-cls1",
        RA,
        1,
        "phi3.fo",
        "successive requests are acknowledged in order"
    ),
    fixture!(
        "msc",
        Formula,
        "dyn",
        DYN,
        2,
        "msc.fo",
        "well-formed message sequence charts: one root, forks matched, messages matched"
    ),
    fixture!(
        "fork-msg",
        Formula,
        "dyn",
        DYN,
        2,
        "fork-msg.fo",
        "a forked process answers its parent"
    ),
    fixture!(
        "pattern",
        Formula,
        "cls1-cls2",
        &["a"],
        2,
        "pattern.fo",
        "every position lies on a four-position class cycle"
    ),
    fixture!(
        "ack-has-request",
        Formula,
        "succ-cls1",
        RA,
        1,
        "ack-has-request.fo",
        "every acknowledgment has an earlier event of its process"
    ),
    fixture!(
        "ack-then-request",
        Formula,
        "succ-cls1",
        RA,
        1,
        "ack-then-request.fo",
        "some acknowledgment is immediately followed by a request"
    ),
    fixture!(
        "emso-marked-requests",
        Formula,
        "succ-cls1",
        RA,
        1,
        "emso-marked-requests.fo",
        "a set of requests covers the class predecessor of every acknowledgment"
    ),
    Fixture {
        name: "nested-patterns",
        kind: FixtureKind::WordFamily,
        signature: "cls1-cls2",
        alphabet: &["a"],
        m: 2,
        payload: "gen_nested_patterns(count)",
        note: "disjoint four-position patterns nested into each other",
    },
    Fixture {
        name: "merged-patterns",
        kind: FixtureKind::WordFamily,
        signature: "cls1-cls2",
        alphabet: &["a"],
        m: 2,
        payload: "gen_merged_patterns()",
        note: "two nested patterns with swapped second values, merging the cycles",
    },
];

/// Short names accepted in place of the catalog names.
const ALIASES: &[(&str, &str)] = &[("fig3", "fig3-automaton"), ("reqack", "fig3-automaton")];

pub fn fixtures() -> &'static [Fixture] {
    FIXTURES
}

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    let name = ALIASES
        .iter()
        .find(|(a, _)| *a == name)
        .map_or(name, |(_, n)| n);
    FIXTURES.iter().find(|f| f.name == name)
}

impl Fixture {
    pub fn signature(&self) -> Signature {
        Signature::builtin_by_name(self.signature).expect("built-in")
    }

    pub fn alphabet(&self) -> Arc<Alphabet> {
        Arc::new(Alphabet::new(self.alphabet.iter().copied(), self.m).expect("non-empty"))
    }

    pub fn word(&self) -> Option<DataWord> {
        match self.kind {
            FixtureKind::Word => Some(DataWord::parse(self.payload).expect("fixture parses")),
            FixtureKind::WordFamily => Some(match self.name {
                "nested-patterns" => gen_nested_patterns(2),
                _ => gen_merged_patterns(),
            }),
            _ => None,
        }
    }

    pub fn formula(&self) -> Option<Formula> {
        (self.kind == FixtureKind::Formula)
            .then(|| parse(self.payload.trim()).expect("fixture parses"))
    }

    pub fn automaton(&self) -> Option<Cra> {
        (self.kind == FixtureKind::Automaton)
            .then(|| Cra::parse(self.payload).expect("fixture parses"))
    }
}

/// The fixture word `name`; panics on unknown names.
pub fn word(name: &str) -> DataWord {
    fixture(name).and_then(Fixture::word).expect("word fixture")
}

pub fn formula(name: &str) -> Formula {
    fixture(name)
        .and_then(Fixture::formula)
        .expect("formula fixture")
}

pub fn automaton(name: &str) -> Cra {
    fixture(name)
        .and_then(Fixture::automaton)
        .expect("automaton fixture")
}

/// Values `(A, B)`, `(C, D)`, `(A, D)`, `(C, B)` of pattern `p` (1-based):
/// coordinate-1 and coordinate-2 values never meet.
fn pattern_data(p: usize) -> [[Value; 2]; 4] {
    let base = 4 * (p as Value - 1);
    let (a, c, b, d) = (base + 1, base + 2, base + 3, base + 4);
    [[a, b], [c, d], [a, d], [c, b]]
}

/// Order of `(pattern, slot)` pairs: each new pattern has its first two
/// positions immediately before those of the previous one and its last
/// two immediately after.
fn nested_layout(count: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(4 * count);
    out.extend((1..=count).rev().map(|p| (p, 0)));
    out.extend((1..=count).rev().map(|p| (p, 1)));
    out.extend((1..=count).map(|p| (p, 2)));
    out.extend((1..=count).map(|p| (p, 3)));
    out
}

fn pattern_word(rows: Vec<[Value; 2]>) -> DataWord {
    let ab = Arc::new(Alphabet::new(["a"], 2).expect("non-empty"));
    let a = ab.label("a").expect("label");
    let letters = rows
        .into_iter()
        .map(|d| Letter {
            label: a,
            data: d.to_vec(),
        })
        .collect();
    DataWord::new(ab, letters).expect("well-formed")
}

/// `count` disjoint patterns, nested; `4·count` positions.
pub fn gen_nested_patterns(count: usize) -> DataWord {
    assert!(count >= 1, "at least one pattern");
    let rows = nested_layout(count)
        .into_iter()
        .map(|(p, slot)| pattern_data(p)[slot])
        .collect();
    pattern_word(rows)
}

/// Two nested patterns where the first positions of the inner and the
/// outer pattern exchange their second values.
pub fn gen_merged_patterns() -> DataWord {
    let layout = nested_layout(2);
    let mut rows: Vec<[Value; 2]> = layout.iter().map(|&(p, s)| pattern_data(p)[s]).collect();
    let outer = layout.iter().position(|&x| x == (2, 0)).expect("present");
    let inner = layout.iter().position(|&x| x == (1, 0)).expect("present");
    let tmp = rows[outer][1];
    rows[outer][1] = rows[inner][1];
    rows[inner][1] = tmp;
    pattern_word(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{classify, eval_sentence};

    #[test]
    fn catalog_loads() {
        for f in fixtures() {
            let sig = f.signature();
            match f.kind {
                FixtureKind::Word | FixtureKind::WordFamily => {
                    let w = f.word().unwrap();
                    assert_eq!(w.alphabet().labels(), f.alphabet().labels(), "{}", f.name);
                    crate::graph::build_graph(&sig, &w).unwrap();
                }
                FixtureKind::Formula => {
                    let phi = f.formula().unwrap();
                    assert!(phi.is_sentence(), "{}", f.name);
                    assert_eq!(crate::logic::parse(&phi.to_string()).unwrap(), phi);
                }
                FixtureKind::Automaton => {
                    let a = f.automaton().unwrap();
                    a.validate().unwrap();
                }
            }
        }
        assert_eq!(word("fig1-word").len(), 8);
        let rep = automaton("fig3").validate().unwrap();
        assert!(rep.is_non_guessing && !rep.is_cma);
        assert!(automaton("fresh-requests").validate().unwrap().is_cma);
    }

    #[test]
    fn formula_fragments() {
        let r = classify(&formula("phi3"));
        assert!(r.is_rfo && r.is_sentence);
        assert_eq!(r.qrank, 4);
        for name in ["phi1", "phi2", "ack-has-request", "ack-then-request"] {
            let r = classify(&formula(name));
            assert!(r.is_rfo && r.qrank <= 2, "{name}");
        }
        let r = classify(&formula("emso-marked-requests"));
        assert!(r.is_remso && !r.is_fo);
        assert_eq!(r.qrank, 2);
        assert!(classify(&formula("msc")).is_rfo);
        assert!(classify(&formula("pattern")).is_rfo);
    }

    #[test]
    fn patterns() {
        let sig = Signature::cls2();
        let phi = formula("pattern");
        for k in 1..=3 {
            let w = gen_nested_patterns(k);
            assert_eq!(w.len(), 4 * k);
            assert!(eval_sentence(&sig, &w, &phi).unwrap(), "nested({k})");
        }
        assert!(!eval_sentence(&sig, &gen_merged_patterns(), &phi).unwrap());
        assert_eq!(
            gen_nested_patterns(2).compact(),
            "(a,5,7)(a,1,3)(a,6,8)(a,2,4)(a,1,4)(a,5,8)(a,2,3)(a,6,7)"
        );
    }

    #[test]
    fn msc_well_formedness() {
        let sig = Signature::dyn_msc();
        let w = word("fig2-word");
        let phi = formula("msc");
        assert!(eval_sentence(&sig, &w, &phi).unwrap());
        assert!(!eval_sentence(&sig, &w.remove(1).unwrap(), &phi).unwrap());
    }
}
