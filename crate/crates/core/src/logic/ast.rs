use std::collections::BTreeSet;

/// MSO formulas over a signature. FO variables start with a lowercase
/// letter, SO variables with an uppercase one.
///
/// `->` and `<->` are desugared by the parser; `And` and the universal
/// quantifiers are kept as constructors so that printing stays readable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// `lab(x)=a`
    LabelIs(String, String),
    /// `d[k](x)=d[l](y)`, 1-based coordinates.
    DataEq {
        x: String,
        k: usize,
        y: String,
        l: usize,
    },
    /// `x REL y`; `lt` is the positional order and not a signature symbol.
    Rel(String, String, String),
    PosEq(String, String),
    In(String, String),
    Not(Box<Formula>),
    Or(Vec<Formula>),
    And(Vec<Formula>),
    ExistsFO(String, Box<Formula>),
    ForallFO(String, Box<Formula>),
    ExistsSO(String, Box<Formula>),
    ForallSO(String, Box<Formula>),
}

/// Name of the evaluator-only order predicate.
pub const ORDER_REL: &str = "lt";

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Or(vec![Formula::not(a), b])
    }

    pub fn exists(x: &str, f: Formula) -> Formula {
        Formula::ExistsFO(x.to_string(), Box::new(f))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        Formula::ForallFO(x.to_string(), Box::new(f))
    }

    pub fn label(x: &str, a: &str) -> Formula {
        Formula::LabelIs(x.to_string(), a.to_string())
    }

    pub fn rel(x: &str, r: &str, y: &str) -> Formula {
        Formula::Rel(x.to_string(), r.to_string(), y.to_string())
    }

    /// Free FO and SO variables.
    pub fn free_vars(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut fo = BTreeSet::new();
        let mut so = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut fo, &mut so);
        (fo, so)
    }

    fn collect_free(
        &self,
        bound: &mut Vec<String>,
        fo: &mut BTreeSet<String>,
        so: &mut BTreeSet<String>,
    ) {
        let mut fo_use = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                fo.insert(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::LabelIs(x, _) => fo_use(x, bound),
            Formula::DataEq { x, y, .. } | Formula::Rel(x, _, y) | Formula::PosEq(x, y) => {
                fo_use(x, bound);
                fo_use(y, bound);
            }
            Formula::In(x, set) => {
                fo_use(x, bound);
                if !bound.contains(set) {
                    so.insert(set.clone());
                }
            }
            Formula::Not(f) => f.collect_free(bound, fo, so),
            Formula::Or(fs) | Formula::And(fs) => {
                for f in fs {
                    f.collect_free(bound, fo, so);
                }
            }
            Formula::ExistsFO(v, f)
            | Formula::ForallFO(v, f)
            | Formula::ExistsSO(v, f)
            | Formula::ForallSO(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, fo, so);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        let (fo, so) = self.free_vars();
        fo.is_empty() && so.is_empty()
    }

    /// Relation names used, including `lt`.
    pub fn relations(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Rel(_, r, _) = f {
                out.insert(r.clone());
            }
        });
        out
    }

    /// Label names used in `lab(x)=a` atoms.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::LabelIs(_, a) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g)
            | Formula::ExistsFO(_, g)
            | Formula::ForallFO(_, g)
            | Formula::ExistsSO(_, g)
            | Formula::ForallSO(_, g) => g.visit(f),
            Formula::Or(gs) | Formula::And(gs) => gs.iter().for_each(|g| g.visit(f)),
            _ => {}
        }
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Bottom-up rewrite of atoms.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Not(g) => Formula::Not(Box::new(g.map_atoms(f))),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::ExistsFO(v, g) => Formula::ExistsFO(v.clone(), Box::new(g.map_atoms(f))),
            Formula::ForallFO(v, g) => Formula::ForallFO(v.clone(), Box::new(g.map_atoms(f))),
            Formula::ExistsSO(v, g) => Formula::ExistsSO(v.clone(), Box::new(g.map_atoms(f))),
            Formula::ForallSO(v, g) => Formula::ForallSO(v.clone(), Box::new(g.map_atoms(f))),
            atom => f(atom),
        }
    }
}
