//! One-shot expressions over literal arguments, the `eval` language.
//!
//! ```text
//! prob E                  norm s x            gauge S x
//! contains S x            glue seq part       leq x y
//! leq_on A x y            eq x y              in_m x
//! classify x              abs x               recip x
//! indicator A             add|sub|mul|min|max x y
//! separation x            epslambda Q eps lambda x
//! ```
//!
//! Every evidence step in a report is re-checkable through these alone.

use std::fmt;

use crate::concat;
use crate::error::{Error, ParseError, Result};
use crate::gauge::gauge_closed_form;
use crate::measure::DiscreteSpace;
use crate::rv::{CombineOp, EcRv};
use crate::scalar::Scalar;
use crate::syntax::Parser;
use crate::topology;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Scalar(Scalar),
    Rv(EcRv),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(v) => write!(f, "{v}"),
            Value::Rv(x) => write!(f, "{x}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(t) => f.write_str(t),
        }
    }
}

pub const OPERATORS: [&str; 20] = [
    "prob", "norm", "gauge", "contains", "glue", "leq", "leq_on", "eq", "in_m", "classify", "abs",
    "recip", "indicator", "add", "sub", "mul", "min", "max", "separation", "epslambda",
];

/// Parses and evaluates one expression. Syntax errors come back as
/// [`Error::Parse`]; domain errors (e.g. a non-invertible `recip`) as the
/// corresponding variant.
pub fn eval(space: &DiscreteSpace, src: &str) -> Result<Value> {
    let mut p = Parser::new(src);
    p.skip_ws();
    let start = p.position();
    let op = p
        .ident()
        .ok_or_else(|| p.error_at(start, "expected an operator name"))?;
    let value = match op {
        "prob" => {
            let e = p.event()?;
            Value::Scalar(space.probability(&e))
        }
        "norm" => {
            let s = p.seminorm()?;
            let x = p.rv()?;
            Value::Rv(s.evaluate(&x))
        }
        "gauge" => {
            let s = p.set()?;
            let x = p.rv()?;
            p.finish()?;
            Value::Rv(gauge_closed_form(&s, &x)?)
        }
        "contains" => {
            let s = p.set()?;
            let x = p.rv()?;
            p.finish()?;
            Value::Bool(s.contains(&x)?)
        }
        "glue" => {
            let seq = p.sequence()?;
            let part = p.partition()?;
            p.finish()?;
            match concat::glue(&seq, &part)? {
                concat::GlueResult::Representable(x) => Value::Rv(x),
                concat::GlueResult::NotRepresentable(why) => Value::Text(format!("not representable: {why}")),
            }
        }
        "leq" | "eq" => {
            let x = p.rv()?;
            let y = p.rv()?;
            Value::Bool(if op == "leq" { x.le(&y) } else { x == y })
        }
        "leq_on" => {
            let a = p.event()?;
            let x = p.rv()?;
            let y = p.rv()?;
            Value::Bool(x.le_on(&y, &a))
        }
        "in_m" => Value::Bool(p.rv()?.in_m()),
        "classify" => {
            let c = p.rv()?.classify();
            Value::Text(format!(
                "in_l0_plus={} in_l0_plusplus={} in_m={}",
                c.in_l0_plus, c.in_l0_plusplus, c.in_m
            ))
        }
        "abs" => Value::Rv(p.rv()?.abs()),
        "recip" => {
            let x = p.rv()?;
            p.finish()?;
            Value::Rv(x.reciprocal()?)
        }
        "indicator" => Value::Rv(EcRv::indicator(&p.event()?)),
        "separation" => {
            let x = p.rv()?;
            p.finish()?;
            Value::Rv(topology::separation_witness(&x)?)
        }
        "epslambda" => {
            let family = p.seminorm_family()?;
            let eps = p.scalar()?;
            let lambda = p.scalar()?;
            let x = p.rv()?;
            p.finish()?;
            Value::Bool(topology::epslambda_membership(space, &family, &eps, &lambda, &x)?)
        }
        other => match CombineOp::ALL.iter().find(|o| o.name() == other) {
            Some(&o) => {
                let x = p.rv()?;
                let y = p.rv()?;
                Value::Rv(EcRv::combine(o, &x, &y))
            }
            None => return Err(unknown(&p, start, other)),
        },
    };
    p.finish()?;
    Ok(value)
}

fn unknown(p: &Parser, start: usize, op: &str) -> Error {
    let e: ParseError = p.error_at(
        start,
        format!("unknown operator '{op}' (expected one of: {})", OPERATORS.join(", ")),
    );
    e.into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(src: &str) -> String {
        eval(&DiscreteSpace::canonical(), src).unwrap().to_string()
    }

    #[test]
    fn examples() {
        assert_eq!(run("gauge m_plus_ball({|1}) {|5}"), "{0}");
        assert_eq!(run("prob {1,3}"), "5/8");
        assert_eq!(run("contains ball(weighted({|1}); {|1}) {|1}"), "true");
        assert_eq!(run("gauge ball(weighted({|1}); {|2}) {|3}"), "{3/2}");
        assert_eq!(run("norm localized({2}) {2:-3 | 1}"), "{2:3 | 0}");
        assert_eq!(run("glue ec[{3}, {5} | {5}] finite[{1}, co{1}]"), "{1:3 | 5}");
        assert_eq!(run("glue diag({2}) singletons_from(1)"), "{2}");
        assert_eq!(run("add {1:1 | 2} {3}"), "{1:4 | 5}");
        assert_eq!(run("separation {4}"), "{2}");
        assert_eq!(run("epslambda weighted({1}) 1 3/5 {1:5 | 0}"), "true");
        assert_eq!(run("epslambda [weighted({1})] 1 2/5 {1:5 | 0}"), "false");
        assert_eq!(run("leq_on {1} {1:0 | 9} {1}"), "true");
        assert_eq!(run("classify {1:1 | 0}"), "in_l0_plus=true in_l0_plusplus=false in_m=true");
        assert_eq!(run("prob omega"), "1");
    }

    #[test]
    fn errors() {
        let space = DiscreteSpace::canonical();
        assert!(matches!(eval(&space, "frob {1}"), Err(Error::Parse(_))));
        assert!(matches!(eval(&space, "prob {1} extra"), Err(Error::Parse(_))));
        assert!(matches!(eval(&space, "recip {1:0 | 1}"), Err(Error::NotInvertible(_))));
        assert!(matches!(eval(&space, "separation {1:2 | 0}"), Err(Error::PointInM)));
        assert!(matches!(
            eval(&space, "gauge translate({1}; m_plus_ball({1})) {1}"),
            Err(Error::UnsupportedShape(_))
        ));
    }
}
