use std::collections::BTreeSet;
use std::sync::Arc;

use super::*;
use crate::automata::RunVerdict;
use crate::graph::build_graph;
use crate::spheres::extract_sphere;
use crate::word::{Alphabet, DataWord};

fn ra(s: &str) -> DataWord {
    let ab = Arc::new(Alphabet::new(["r", "a"], 1).unwrap());
    DataWord::parse_compact(ab, s).unwrap()
}

fn w1() -> DataWord {
    ra("(r,8)(r,5)(r,3)(r,4)(a,3)(a,4)(a,5)(a,4)")
}

fn w2() -> DataWord {
    let ab = Arc::new(Alphabet::new(["f", "n", "!", "?"], 2).unwrap());
    DataWord::parse_compact(
        ab,
        "(n,2,2)(f,2,3)(n,3,2)(f,2,1)(n,1,2)(!,2,3)(?,3,2)(!,1,3)(!,1,3)(?,3,1)(?,3,1)",
    )
    .unwrap()
}

fn automaton(sig: Signature, w: &DataWord, b: usize) -> SphereAutomaton {
    SphereAutomaton::new(sig, w.alphabet().clone(), b).unwrap()
}

fn assert_pi_matches(sa: &SphereAutomaton, w: &DataWord, run: &SphereRun) {
    let g = build_graph(&sa.signature, w).unwrap();
    for (idx, c) in run.configs.iter().enumerate() {
        let s = extract_sphere(&g, idx + 1, sa.radius).unwrap();
        assert_eq!(c.state.pi().key(), s.key(), "position {}", idx + 1);
    }
}

#[test]
fn state_conditions() {
    let w = w1();
    let sa = automaton(Signature::succ_cls1(), &w, 1);
    let c = sa.canonical_run(&w).unwrap();
    let s4 = &c.spheres[3];
    let centered = ExtendedSphere::new(s4.canon.clone(), s4.canon.center(), 1);
    let q = sa.state_check(BTreeSet::from([centered.clone()])).unwrap();
    assert_eq!(q.pi(), &s4.canon);

    let other = ExtendedSphere::new(s4.canon.clone(), s4.node_of(3).unwrap(), 1);
    assert!(matches!(
        sa.state_check(BTreeSet::from([centered.clone(), other.clone()])),
        Err(StateViolation::Active(..))
    ));
    assert_eq!(
        sa.state_check(BTreeSet::from([other])),
        Err(StateViolation::Centers(0))
    );
    assert_eq!(sa.state_check(BTreeSet::new()), Err(StateViolation::Empty));
    let bad = ExtendedSphere::new(s4.canon.clone(), s4.canon.center(), 0);
    assert!(matches!(
        sa.state_check(BTreeSet::from([bad])),
        Err(StateViolation::Color(..))
    ));
    let a_node = ExtendedSphere::new(s4.canon.clone(), s4.node_of(5).unwrap(), 2);
    assert!(matches!(
        sa.state_check(BTreeSet::from([centered, a_node])),
        Err(StateViolation::LabelOrData(..))
    ));
}

#[test]
fn transition_violations() {
    let w = w1();
    let sa = automaton(Signature::succ_cls1(), &w, 1);
    let c = sa.canonical_run(&w).unwrap();
    let q2 = &c.run.configs[1].state;
    let r = sa.alphabet.label("r").unwrap();
    assert!(matches!(
        sa.transition_check(&[None, None], r, q2),
        Err(TransitionViolation::T2 { .. })
    ));
    assert_eq!(
        sa.transition_check(&[None, None], sa.alphabet.label("a").unwrap(), q2)
            .unwrap_err(),
        TransitionViolation::T1
    );

    let w = ra("(r,1)(r,2)");
    let sa = automaton(Signature::succ_cls1(), &w, 1);
    let c = sa.canonical_run(&w).unwrap();
    let q1 = &c.run.configs[0].state;
    let s1 = &c.spheres[0].canon;
    let lone = ExtendedSphere::new(s1.clone(), s1.center(), 2);
    let q = sa.state_check(BTreeSet::from([lone])).unwrap();
    assert!(matches!(
        sa.transition_check(&[Some(q1), None], r, &q),
        Err(TransitionViolation::T5 { .. })
    ));
}

#[test]
fn canonical_run_on_fig1() {
    let w = w1();
    let sa = automaton(Signature::succ_cls1(), &w, 1);
    let c = sa.canonical_run(&w).unwrap();
    assert_eq!(c.run.configs.len(), 8);
    assert_eq!(c.spheres[3].node_set(), vec![3, 4, 5, 6]);
    assert_eq!(c.run.configs[3].state.pi().key(), c.spheres[3].key());
    assert_pi_matches(&sa, &w, &c.run);
    assert_eq!(sa.verify_run(&w, &c.run), RunVerdict::Accepted);
    assert!(register_invariance(&sa, &w, &c.run).unwrap() > 0);
    // Every transition of A_B updates registers when m ≥ 1.
    assert!(c.transitions.iter().all(|t| !t.update.is_empty()));
    let table = sphere_run_table(&w, &c.run);
    assert!(table.starts_with("pos  input  |q|"));
    assert_eq!(table.lines().count(), 9);
}

#[test]
fn single_position_radius_zero() {
    let w = ra("(r,7)");
    let sa = automaton(Signature::succ_cls1(), &w, 0);
    let c = sa.canonical_run(&w).unwrap();
    let q = &c.run.configs[0];
    assert_eq!(q.state.members().len(), 1);
    let e = q.state.centered();
    assert_eq!(q.regs.get(&e.register(1)), Some(&7));
    assert_eq!(q.regs.len(), 1);
    assert_eq!(sa.verify_run(&w, &c.run), RunVerdict::Accepted);
}

#[test]
fn canonical_run_on_fig2() {
    let w = w2();
    let sa = automaton(Signature::dyn_msc(), &w, 1);
    let c = sa.canonical_run(&w).unwrap();
    assert_pi_matches(&sa, &w, &c.run);
    assert_eq!(sa.verify_run(&w, &c.run), RunVerdict::Accepted);
    register_invariance(&sa, &w, &c.run).unwrap();
}

#[test]
fn perturbed_registers_are_rejected() {
    let w = w1();
    let sa = automaton(Signature::succ_cls1(), &w, 1);
    let c = sa.canonical_run(&w).unwrap();
    for pos in [0, 2, 5] {
        for v in [99, 3] {
            let mut run = c.run.clone();
            let (r, old) = run.configs[pos]
                .regs
                .iter()
                .find(|(_, &x)| x != v)
                .map(|(r, &x)| (r.clone(), x))
                .unwrap();
            assert_ne!(old, v);
            run.configs[pos].regs.insert(r, v);
            assert!(
                !sa.verify_run(&w, &run).is_accepted(),
                "pos {pos}, value {v}"
            );
        }
    }
    let mut run = c.run.clone();
    let r = run.configs[1].regs.keys().next().unwrap().clone();
    run.configs[1].regs.remove(&r);
    assert!(!sa.verify_run(&w, &run).is_accepted());
}

#[test]
fn empty_word() {
    let w = ra("ε");
    let sa = automaton(Signature::succ_cls1(), &w, 1);
    let c = sa.canonical_run(&w).unwrap();
    assert!(c.run.configs.is_empty());
    assert_eq!(sa.verify_run(&w, &c.run), RunVerdict::Accepted);
}

#[test]
fn search_finds_runs() {
    for (text, b, palette) in [
        ("(r,1)(a,1)", 0, 1),
        ("(r,1)(a,1)", 1, 1),
        ("(r,1)(r,2)", 1, 2),
    ] {
        let w = ra(text);
        let sa = automaton(Signature::succ_cls1(), &w, b);
        let run = sa.membership(&w, palette, 1_000_000).unwrap().unwrap();
        assert_eq!(sa.verify_run(&w, &run), RunVerdict::Accepted, "{text}");
        assert_pi_matches(&sa, &w, &run);
        register_invariance(&sa, &w, &run).unwrap();
    }
    let w = ra("(r,1)(r,2)(a,1)");
    let sa = automaton(Signature::succ_cls1(), &w, 1);
    assert_eq!(sa.membership(&w, 1, 1), Err(SearchError::Budget(1)));
    assert!(matches!(
        sa.membership(&w, 0, 10),
        Err(SearchError::Palette(..))
    ));
}
