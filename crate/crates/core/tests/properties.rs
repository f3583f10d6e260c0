//! Property tests against brute-force oracles written independently of the
//! library's algorithms.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;

use cra_core::automata::{membership, run_check, Config, Cra, Run};
use cra_core::graph::{equivalent, normalize};
use cra_core::logic::{eval, eval_sentence, parse, Formula, Valuation};
use cra_core::spheres::{extract_sphere, hanf_type};
use cra_core::{build_graph, corpus, interpret, Alphabet, DataWord, Signature, Value};

fn alphabet(labels: &[&str], m: usize) -> Arc<Alphabet> {
    Arc::new(Alphabet::new(labels.iter().copied(), m).unwrap())
}

fn word(ab: &Arc<Alphabet>, letters: &[(usize, Vec<Value>)]) -> DataWord {
    let names: Vec<String> = ab.labels().to_vec();
    DataWord::from_named(
        ab.clone(),
        letters.iter().map(|(l, d)| (names[*l].as_str(), d.clone())),
    )
    .unwrap()
}

fn word_strategy(
    labels: usize,
    m: usize,
    max_len: usize,
    max_val: Value,
) -> impl Strategy<Value = Vec<(usize, Vec<Value>)>> {
    prop::collection::vec(
        (0..labels, prop::collection::vec(1..=max_val, m)),
        0..=max_len,
    )
}

// Relations -----------------------------------------------------------------

/// Direct successor and next-same-value relations by scanning.
fn oracle_relation(name: &str, w: &DataWord) -> Vec<(usize, usize)> {
    let n = w.len();
    if name == "succ" {
        return (1..n).map(|i| (i, i + 1)).collect();
    }
    let k: usize = name.strip_prefix("cls").unwrap().parse().unwrap();
    let mut out = Vec::new();
    for i in 1..=n {
        if let Some(j) = (i + 1..=n).find(|&j| w.datum(j, k) == w.datum(i, k)) {
            out.push((i, j));
        }
    }
    out
}

fn oracle_relations(sig: &Signature, w: &DataWord) -> Vec<BTreeSet<(usize, usize)>> {
    sig.symbol_names()
        .iter()
        .map(|s| oracle_relation(s, w).into_iter().collect())
        .collect()
}

// Isomorphism ---------------------------------------------------------------

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n);
            out.push(q);
        }
    }
    out
}

/// `G(u) ≅ G(v)` by trying every bijection of positions.
fn oracle_isomorphic(sig: &Signature, u: &DataWord, v: &DataWord) -> bool {
    if u.len() != v.len() {
        return false;
    }
    let (ru, rv) = (oracle_relations(sig, u), oracle_relations(sig, v));
    permutations(u.len()).into_iter().any(|p| {
        let f = |i: usize| p[i - 1];
        (1..=u.len())
            .all(|i| u.label_name(i) == v.label_name(f(i)) && u.partition(i) == v.partition(f(i)))
            && ru.iter().zip(&rv).all(|(a, b)| {
                a.len() == b.len() && a.iter().all(|&(i, j)| b.contains(&(f(i), f(j))))
            })
    })
}

// Formulas ------------------------------------------------------------------

struct Naive<'a> {
    sig: &'a Signature,
    w: &'a DataWord,
    rels: Vec<BTreeSet<(usize, usize)>>,
}

impl Naive<'_> {
    fn eval(
        &self,
        f: &Formula,
        fo: &BTreeMap<String, usize>,
        so: &BTreeMap<String, BTreeSet<usize>>,
    ) -> bool {
        let n = self.w.len();
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::LabelIs(x, a) => self.w.label_name(fo[x]) == a,
            Formula::DataEq { x, k, y, l } => self.w.datum(fo[x], *k) == self.w.datum(fo[y], *l),
            Formula::Rel(x, r, y) if r == "lt" => fo[x] < fo[y],
            Formula::Rel(x, r, y) => {
                let s = self.sig.symbol_index(r).unwrap();
                self.rels[s].contains(&(fo[x], fo[y]))
            }
            Formula::PosEq(x, y) => fo[x] == fo[y],
            Formula::In(x, s) => so[s].contains(&fo[x]),
            Formula::Not(g) => !self.eval(g, fo, so),
            Formula::Or(gs) => gs.iter().any(|g| self.eval(g, fo, so)),
            Formula::And(gs) => gs.iter().all(|g| self.eval(g, fo, so)),
            Formula::ExistsFO(x, g) | Formula::ForallFO(x, g) => {
                let mut each = (1..=n).map(|i| {
                    let mut fo = fo.clone();
                    fo.insert(x.clone(), i);
                    self.eval(g, &fo, so)
                });
                if matches!(f, Formula::ExistsFO(..)) {
                    each.any(|b| b)
                } else {
                    each.all(|b| b)
                }
            }
            Formula::ExistsSO(x, g) | Formula::ForallSO(x, g) => {
                let mut each = (0u32..1 << n).map(|mask| {
                    let set = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                    let mut so = so.clone();
                    so.insert(x.clone(), set);
                    self.eval(g, fo, &so)
                });
                if matches!(f, Formula::ExistsSO(..)) {
                    each.any(|b| b)
                } else {
                    each.all(|b| b)
                }
            }
        }
    }
}

fn naive_sentence(sig: &Signature, w: &DataWord, f: &Formula) -> bool {
    let naive = Naive {
        sig,
        w,
        rels: oracle_relations(sig, w),
    };
    naive.eval(f, &BTreeMap::new(), &BTreeMap::new())
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn atom_strategy() -> impl Strategy<Value = Formula> {
    let v = || prop::sample::select(&VARS[..]).prop_map(str::to_string);
    prop_oneof![
        (v(), prop::sample::select(vec!["r", "a"]))
            .prop_map(|(x, a)| Formula::LabelIs(x, a.into())),
        (v(), prop::sample::select(vec!["succ", "cls1", "lt"]), v())
            .prop_map(|(x, r, y)| Formula::Rel(x, r.into(), y)),
        (v(), v()).prop_map(|(x, y)| Formula::PosEq(x, y)),
        (v(), v()).prop_map(|(x, y)| Formula::DataEq { x, k: 1, y, l: 1 }),
        v().prop_map(|x| Formula::In(x, "X".into())),
        Just(Formula::True),
    ]
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    atom_strategy().prop_recursive(4, 24, 3, |inner| {
        let v = || prop::sample::select(&VARS[..]).prop_map(str::to_string);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            (v(), inner.clone()).prop_map(|(x, g)| Formula::ExistsFO(x, Box::new(g))),
            (v(), inner).prop_map(|(x, g)| Formula::ForallFO(x, Box::new(g))),
        ]
    })
}

/// Closes `f` with universal quantifiers in a fixed order and an outer
/// existential set quantifier.
fn close(f: Formula) -> Formula {
    let f = VARS.iter().rev().fold(f, |g, x| Formula::forall(x, g));
    Formula::ExistsSO("X".into(), Box::new(f))
}

// Automata ------------------------------------------------------------------

/// Whether some assignment of states and register values drawn from the
/// word's values passes `run_check`.
fn oracle_member(a: &Cra, w: &DataWord) -> bool {
    let vals: Vec<Option<Value>> = std::iter::once(None)
        .chain(w.values().into_iter().map(Some))
        .collect();
    let mut cfgs = Vec::new();
    for q in &a.states {
        let mut regs: Vec<BTreeMap<String, Value>> = vec![BTreeMap::new()];
        for r in &a.registers {
            regs = regs
                .into_iter()
                .flat_map(|m| {
                    vals.iter().map(move |v| {
                        let mut m = m.clone();
                        if let Some(v) = v {
                            m.insert(r.clone(), *v);
                        }
                        m
                    })
                })
                .collect();
        }
        cfgs.extend(regs.into_iter().map(|regs| Config {
            state: q.clone(),
            regs,
        }));
    }
    let n = w.len();
    let mut idx = vec![0usize; n];
    loop {
        let run = Run {
            configs: idx.iter().map(|&c| cfgs[c].clone()).collect(),
            transitions: None,
        };
        if run_check(a, w, &run).is_accepted() {
            return true;
        }
        let mut x = n;
        loop {
            if x == 0 {
                return false;
            }
            x -= 1;
            idx[x] += 1;
            if idx[x] < cfgs.len() {
                break;
            }
            idx[x] = 0;
        }
    }
}

#[test]
fn membership_matches_exhaustive_runs() {
    for name in ["fig3-automaton", "fresh-requests", "empty-only"] {
        let a = corpus::automaton(name);
        let ws = cra_core::hanf::enumerate_words(&a.signature, &a.alphabet, 3, 3).unwrap();
        for w in ws {
            let got = membership(&a, &w, 1_000_000).unwrap().is_some();
            assert_eq!(got, oracle_member(&a, &w), "{name} on {}", w.compact());
        }
    }
    let mark = corpus::automaton("mark");
    let ab = mark.alphabet.clone();
    for text in ["(r:0,1)(a:1,1)", "(r:1,1)(a:1,2)", "(r:0,1)(a:0,2)(r:1,1)"] {
        let w = DataWord::parse_compact(ab.clone(), text).unwrap();
        assert_eq!(
            membership(&mark, &w, 1_000_000).unwrap().is_some(),
            oracle_member(&mark, &w),
            "{text}"
        );
    }
}

#[test]
fn equivalence_matches_permutation_search() {
    let ab = alphabet(&["a", "b"], 2);
    for sig in [Signature::cls2(), Signature::succ(), Signature::succ_cls2()] {
        let ws: Vec<DataWord> = cra_core::hanf::enumerate_words(&sig, &ab, 3, 3)
            .unwrap()
            .collect();
        let short: Vec<&DataWord> = ws.iter().filter(|w| w.len() == 3).step_by(7).collect();
        for u in &short {
            for v in &short {
                assert_eq!(
                    equivalent(&sig, u, v).unwrap(),
                    oracle_isomorphic(&sig, u, v),
                    "{} vs {} over {}",
                    u.compact(),
                    v.compact(),
                    sig.name()
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn relations_match_scan(l in word_strategy(2, 2, 8, 4)) {
        let w = word(&alphabet(&["r", "a"], 2), &l);
        let sig = Signature::succ_cls2();
        let rels = interpret(&sig, &w).unwrap();
        let want = oracle_relations(&sig, &w);
        for (got, want) in rels.iter().zip(&want) {
            let got: BTreeSet<_> = got.iter().copied().collect();
            prop_assert_eq!(&got, want);
        }
    }

    #[test]
    fn evaluator_matches_naive(f in formula_strategy(), l in word_strategy(2, 1, 4, 3)) {
        let w = word(&alphabet(&["r", "a"], 1), &l);
        let sig = Signature::succ_cls1();
        let phi = close(f);
        prop_assert_eq!(eval_sentence(&sig, &w, &phi).unwrap(), naive_sentence(&sig, &w, &phi));
    }

    #[test]
    fn printed_formulas_reparse(f in formula_strategy(), l in word_strategy(2, 1, 4, 3)) {
        let phi = close(f);
        let back = parse(&phi.to_string()).unwrap();
        let w = word(&alphabet(&["r", "a"], 1), &l);
        let sig = Signature::succ_cls1();
        prop_assert_eq!(eval_sentence(&sig, &w, &back).unwrap(), eval_sentence(&sig, &w, &phi).unwrap());
    }

    #[test]
    fn implication_desugars(l in word_strategy(2, 1, 5, 3), i in 1usize..=5, j in 1usize..=5) {
        let w = word(&alphabet(&["r", "a"], 1), &l);
        prop_assume!(i <= w.len() && j <= w.len());
        let sig = Signature::succ_cls1();
        let val = Valuation::default().with_fo("x", i).with_fo("y", j);
        for (lhs, rhs) in [
            ("lab(x)=r -> x ~1 y", "!lab(x)=r | x ~1 y"),
            ("lab(x)=r <-> x succ y", "(lab(x)=r & x succ y) | (!lab(x)=r & !x succ y)"),
        ] {
            prop_assert_eq!(
                eval(&sig, &w, &parse(lhs).unwrap(), &val).unwrap(),
                eval(&sig, &w, &parse(rhs).unwrap(), &val).unwrap()
            );
        }
    }

    #[test]
    fn normalize_is_idempotent_and_equivalent(l in word_strategy(2, 2, 7, 9)) {
        let w = word(&alphabet(&["r", "a"], 2), &l);
        let sig = Signature::succ_cls2();
        let n = normalize(&sig, &w).unwrap();
        prop_assert_eq!(&normalize(&sig, &n).unwrap(), &n);
        prop_assert!(equivalent(&sig, &w, &n).unwrap());
        prop_assert!(n.values().iter().copied().eq(1..=n.values().len() as Value));
    }

    #[test]
    fn distance_is_a_metric(l in word_strategy(2, 1, 7, 3)) {
        let w = word(&alphabet(&["r", "a"], 1), &l);
        let g = build_graph(&Signature::succ_cls1(), &w).unwrap();
        let n = w.len();
        for i in 1..=n {
            prop_assert_eq!(g.dist(i, i).unwrap(), Some(0));
            for j in 1..=n {
                let dij = g.dist(i, j).unwrap();
                prop_assert_eq!(dij, g.dist(j, i).unwrap());
                prop_assert!(dij.unwrap() <= j.abs_diff(i));
                for k in 1..=n {
                    let (a, b) = (g.dist(i, k).unwrap().unwrap(), g.dist(k, j).unwrap().unwrap());
                    prop_assert!(dij.unwrap() <= a + b);
                }
            }
        }
    }

    #[test]
    fn sphere_keys_survive_renaming(l in word_strategy(2, 1, 7, 4), b in 0usize..=2) {
        let w = word(&alphabet(&["r", "a"], 1), &l);
        let v = w.map_values(|x| 100 - 7 * x);
        let sig = Signature::succ_cls1();
        let (gw, gv) = (build_graph(&sig, &w).unwrap(), build_graph(&sig, &v).unwrap());
        for i in 1..=w.len() {
            let (sw, sv) = (extract_sphere(&gw, i, b).unwrap(), extract_sphere(&gv, i, b).unwrap());
            prop_assert_eq!(sw.key(), sv.key());
        }
        prop_assert_eq!(
            hanf_type(&sig, &w, b, 2).unwrap().type_key(),
            hanf_type(&sig, &v, b, 2).unwrap().type_key()
        );
    }

    #[test]
    fn removal_shortens_by_one(l in word_strategy(2, 1, 6, 3), i in 1usize..=6) {
        let w = word(&alphabet(&["r", "a"], 1), &l);
        prop_assume!(i <= w.len());
        let cut = w.remove(i).unwrap();
        prop_assert_eq!(cut.len(), w.len() - 1);
        let mut letters = w.letters().to_vec();
        letters.remove(i - 1);
        prop_assert_eq!(cut.letters(), &letters[..]);
    }
}
