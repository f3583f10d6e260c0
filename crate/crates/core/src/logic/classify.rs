use serde::Serialize;

use super::ast::{Formula, ORDER_REL};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FragmentReport {
    pub is_sentence: bool,
    /// No second-order quantifiers and no set membership.
    pub is_fo: bool,
    /// An existential second-order prefix over a first-order kernel.
    pub is_emso: bool,
    /// Data equalities only within a single position, and no `lt`.
    pub is_rmso: bool,
    pub is_rfo: bool,
    pub is_remso: bool,
    /// Nesting depth of first-order quantifiers.
    pub qrank: usize,
}

pub fn classify(f: &Formula) -> FragmentReport {
    let is_fo = !has_so(f, true);
    let is_emso = !has_so(emso_kernel(f).1, false);
    let mut is_rmso = true;
    f.visit(&mut |g| match g {
        Formula::DataEq { x, y, .. } if x != y => is_rmso = false,
        Formula::Rel(_, r, _) if r == ORDER_REL => is_rmso = false,
        _ => {}
    });
    FragmentReport {
        is_sentence: f.is_sentence(),
        is_fo,
        is_emso,
        is_rmso,
        is_rfo: is_fo && is_rmso,
        is_remso: is_emso && is_rmso,
        qrank: qrank(f),
    }
}

/// Splits a leading `E2 X1. … E2 Xn.` prefix from its body.
pub fn emso_kernel(f: &Formula) -> (Vec<String>, &Formula) {
    let mut vars = Vec::new();
    let mut cur = f;
    while let Formula::ExistsSO(v, body) = cur {
        vars.push(v.clone());
        cur = body;
    }
    (vars, cur)
}

fn has_so(f: &Formula, count_membership: bool) -> bool {
    let mut found = false;
    f.visit(&mut |g| match g {
        Formula::ExistsSO(..) | Formula::ForallSO(..) => found = true,
        Formula::In(..) if count_membership => found = true,
        _ => {}
    });
    found
}

pub fn qrank(f: &Formula) -> usize {
    match f {
        Formula::ExistsFO(_, g) | Formula::ForallFO(_, g) => 1 + qrank(g),
        Formula::ExistsSO(_, g) | Formula::ForallSO(_, g) | Formula::Not(g) => qrank(g),
        Formula::Or(gs) | Formula::And(gs) => gs.iter().map(qrank).max().unwrap_or(0),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;
    use super::*;

    #[test]
    fn fragments() {
        let r = classify(&parse("d[1](x)=d[1](y)").unwrap());
        assert!(!r.is_rmso && r.is_fo && !r.is_sentence);
        let r = classify(&parse("E2 X. x in X").unwrap());
        assert!(!r.is_fo && r.is_emso && r.is_rmso && r.is_remso);
        let r = classify(&parse("A2 X. E x. x in X").unwrap());
        assert!(!r.is_emso);
        let r = classify(&parse("E x. E y. x lt y").unwrap());
        assert!(r.is_fo && !r.is_rmso && !r.is_rfo);
        assert_eq!(r.qrank, 2);
        assert_eq!(
            classify(&parse("(E x. true) & A x. E y. true").unwrap()).qrank,
            2
        );
    }
}
