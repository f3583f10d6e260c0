//! MSO over data words: syntax, fragments, and brute-force evaluation.

mod ast;
mod classify;
mod eval;
mod parse;
mod print;

pub use ast::{Formula, ORDER_REL};
pub use classify::{classify, emso_kernel, qrank, FragmentReport};
pub use eval::{eval, eval_sentence, eval_with, EvalError, EvalLimits, Valuation};
pub use parse::{check_against, parse, ParseError};
