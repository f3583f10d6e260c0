//! Class register automata over a signature: definition, text format,
//! run checking, membership search and closure constructions.

mod closure;
mod cra;
mod run;
mod text;

pub use closure::{exact_word_automaton, intersect, project, union, ClosureError};
pub use cra::{
    Cra, CraError, GlobalCondition, Guard, GuardAtom, StateLe, SubclassReport, Term, Transition,
    Update,
};
pub use run::{
    guard_eval, membership, run_check, run_table, Config, MembershipError, Run, RunVerdict,
    DEFAULT_BUDGET,
};
pub use text::CraFormatError;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;
    use crate::word::{Alphabet, DataWord};
    use std::sync::Arc;

    const REQACK: &str = "\
alphabet: r a
m: 1
signature: succ-cls1
states: q1 q2
registers: r1 r2
transitions:
[] true \"r\" -> q1 {r1 := d[1]@0}
[succ=q1] true \"r\" -> q1 {r1 := d[1]@0, r2 := succ.r1}
[cls1=q1, succ=q1] cls1.r2 = bot \"a\" -> q2 {r1 := d[1]@0}
[cls1=q1, succ=q2] cls1.r2 = succ.r1 \"a\" -> q2 {r1 := d[1]@0}
final[cls1]: q2
final[succ]: q2
global: !(q1<=0)
";

    fn reqack() -> Cra {
        Cra::parse(REQACK).unwrap()
    }

    fn word(s: &str) -> DataWord {
        let ab = Arc::new(Alphabet::new(["r", "a"], 1).unwrap());
        DataWord::parse_compact(ab, s).unwrap()
    }

    fn config(q: &str, regs: &[(&str, u64)]) -> Config {
        Config {
            state: q.into(),
            regs: regs.iter().map(|(r, v)| (r.to_string(), *v)).collect(),
        }
    }

    fn tabulated() -> Run {
        Run {
            configs: vec![
                config("q1", &[("r1", 8)]),
                config("q1", &[("r1", 5), ("r2", 8)]),
                config("q2", &[("r1", 8)]),
                config("q2", &[("r1", 5)]),
            ],
            transitions: Some(vec![0, 1, 2, 3]),
        }
    }

    #[test]
    fn text_round_trip() {
        let a = reqack();
        let again = Cra::parse(&a.to_string()).unwrap();
        assert_eq!(again.to_string(), a.to_string());
        assert_eq!(again.transitions, a.transitions);
        assert!(Cra::parse("alphabet: r\nsignature: nope\n").is_err());
        let e = Cra::parse("alphabet: r\nsignature: succ\nbogus line\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn subclasses() {
        let rep = reqack().validate().unwrap();
        assert!(rep.is_non_guessing && !rep.is_cma && !rep.is_register_automaton);
        let mut broken = reqack();
        broken.transitions[3].target = "q9".into();
        assert!(broken.validate().is_err());
        let mut guessing = reqack();
        guessing.transitions[0]
            .update
            .insert("r2".into(), Update::Guess { k: 1, radius: 1 });
        assert!(!guessing.subclasses().is_non_guessing);
    }

    #[test]
    fn tabulated_run_is_accepted() {
        let a = reqack();
        let w = word("(r,8)(r,5)(a,8)(a,5)");
        assert_eq!(run_check(&a, &w, &tabulated()), RunVerdict::Accepted);
        let mut no_witness = tabulated();
        no_witness.transitions = None;
        assert!(run_check(&a, &w, &no_witness).is_accepted());
        let mut bad = tabulated();
        bad.configs[1].regs.insert("r2".into(), 5);
        let RunVerdict::Rejected(reason) = run_check(&a, &w, &bad) else {
            panic!("perturbed run accepted");
        };
        assert!(reason.starts_with("position 2"), "{reason}");
    }

    #[test]
    fn membership_examples() {
        let a = reqack();
        let w = word("(r,8)(r,5)(a,8)(a,5)");
        let run = membership(&a, &w, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(run, tabulated());
        assert!(membership(&a, &word("(r,8)(a,5)"), DEFAULT_BUDGET)
            .unwrap()
            .is_none());
        assert!(
            membership(&a, &word("(r,8)(r,5)(a,5)(a,8)"), DEFAULT_BUDGET)
                .unwrap()
                .is_none()
        );
        // Φ = ¬(q1 ≤ 0) fails on the empty word.
        let empty = word("");
        assert!(membership(&a, &empty, DEFAULT_BUDGET).unwrap().is_none());
        let mut never = reqack();
        never.global = crate::boolexpr::Bool::False;
        assert!(membership(&never, &w, DEFAULT_BUDGET).unwrap().is_none());
        assert_eq!(membership(&a, &w, 2), Err(MembershipError::Budget(2)));
    }

    #[test]
    fn guard_semantics() {
        let bot = text::parse_guard("cls1.r2 = bot").unwrap();
        assert!(guard_eval(&bot, &mut |_| None));
        assert!(!guard_eval(&bot, &mut |_| Some(3)));
        let eq = text::parse_guard("d[1] = succ.r1").unwrap();
        assert!(!guard_eval(&eq, &mut |t| match t {
            Term::Data(_) => Some(1),
            Term::Reg(..) => None,
        }));
    }

    #[test]
    fn run_table_layout() {
        let a = reqack();
        let w = word("(r,8)(r,5)(a,8)(a,5)");
        let t = run_table(&a, &w, &tabulated());
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "pos  input  trans  state  r1  r2");
        assert_eq!(lines[1], "1    (r,8)  1      q1     8   ⊥");
        assert_eq!(lines[2], "2    (r,5)  2      q1     5   8");
    }

    #[test]
    fn closures_on_small_words() {
        let a = reqack();
        let sig = Signature::succ_cls1();
        let target = word("(r,1)(a,2)");
        let exact = exact_word_automaton(&sig, &target).unwrap();
        assert!(exact.validate().unwrap().is_cma);
        let member = |c: &Cra, s: &str| membership(c, &word(s), DEFAULT_BUDGET).unwrap().is_some();
        assert!(member(&exact, "(r,7)(a,3)"));
        assert!(!member(&exact, "(r,7)(a,7)"));
        assert!(!member(&exact, "(a,7)(r,3)"));
        let u = union(&a, &exact).unwrap();
        let i = intersect(&a, &a).unwrap();
        for s in [
            "(r,1)(a,2)",
            "(r,1)(a,1)",
            "(r,1)(r,2)(a,1)(a,2)",
            "",
            "(r,1)",
        ] {
            assert_eq!(member(&u, s), member(&a, s) || member(&exact, s), "{s}");
            assert_eq!(member(&i, s), member(&a, s), "{s}");
        }
    }

    #[test]
    fn projection_forgets_annotation() {
        let text = "\
alphabet: r a
gamma: x y
m: 1
signature: succ
states: s t
registers:
transitions:
[] true \"r:x\" -> s
[succ=s] true \"a:y\" -> t
final[succ]: t
global: true
";
        let a = Cra::parse(text).unwrap();
        assert!(a.validate().is_ok());
        let p = project(&a).unwrap();
        assert_eq!(p.signature.name(), "succ");
        let ab = Arc::new(Alphabet::new(["r", "a"], 1).unwrap());
        let w = DataWord::parse_compact(ab.clone(), "(r,1)(a,1)").unwrap();
        assert!(membership(&p, &w, DEFAULT_BUDGET).unwrap().is_some());
        let v = DataWord::parse_compact(ab, "(a,1)(a,1)").unwrap();
        assert!(membership(&p, &v, DEFAULT_BUDGET).unwrap().is_none());
        assert_eq!(project(&p).unwrap_err(), ClosureError::NotExtended);
    }
}
