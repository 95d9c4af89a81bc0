//! Feature expressions: propositional formulas over feature names.
//!
//! The concrete syntax is
//!
//! ```text
//! expr   := term ('||' term)*
//! term   := factor ('&&' factor)*
//! factor := '!' factor | '(' expr ')' | TRUE | FALSE | identifier
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{FeatureModelError, Product};

/// Abstract syntax tree of a feature expression.
///
/// `And(vec![])` is true and `Or(vec![])` is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeatureExpr {
    True,
    False,
    Var(String),
    Not(Box<FeatureExpr>),
    And(Vec<FeatureExpr>),
    Or(Vec<FeatureExpr>),
}

impl FeatureExpr {
    pub fn var(name: impl Into<String>) -> Self {
        FeatureExpr::Var(name.into())
    }

    pub fn negate(self) -> Self {
        FeatureExpr::Not(Box::new(self))
    }

    pub fn and(parts: impl IntoIterator<Item = FeatureExpr>) -> Self {
        FeatureExpr::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = FeatureExpr>) -> Self {
        FeatureExpr::Or(parts.into_iter().collect())
    }

    /// `premise -> conclusion`, encoded as `!premise || conclusion`.
    pub fn implies(premise: FeatureExpr, conclusion: FeatureExpr) -> Self {
        FeatureExpr::Or(vec![premise.negate(), conclusion])
    }

    /// Evaluates the expression under the assignment "feature is true iff selected".
    pub fn evaluate(&self, product: &Product) -> bool {
        self.evaluate_with(&|name| product.contains(name))
    }

    pub fn evaluate_with(&self, assignment: &dyn Fn(&str) -> bool) -> bool {
        match self {
            FeatureExpr::True => true,
            FeatureExpr::False => false,
            FeatureExpr::Var(name) => assignment(name),
            FeatureExpr::Not(inner) => !inner.evaluate_with(assignment),
            FeatureExpr::And(parts) => parts.iter().all(|p| p.evaluate_with(assignment)),
            FeatureExpr::Or(parts) => parts.iter().any(|p| p.evaluate_with(assignment)),
        }
    }

    /// Names of all variables occurring in the expression.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            FeatureExpr::True | FeatureExpr::False => {}
            FeatureExpr::Var(name) => {
                out.insert(name.as_str());
            }
            FeatureExpr::Not(inner) => inner.collect_variables(out),
            FeatureExpr::And(parts) | FeatureExpr::Or(parts) => {
                for p in parts {
                    p.collect_variables(out);
                }
            }
        }
    }

    /// Logically equivalent expression with nested connectives flattened,
    /// constants folded, double negations removed and repeated operands
    /// dropped (first occurrence kept).
    pub fn simplify(&self) -> FeatureExpr {
        match self {
            FeatureExpr::True | FeatureExpr::False | FeatureExpr::Var(_) => self.clone(),
            FeatureExpr::Not(inner) => match inner.simplify() {
                FeatureExpr::True => FeatureExpr::False,
                FeatureExpr::False => FeatureExpr::True,
                FeatureExpr::Not(x) => *x,
                other => other.negate(),
            },
            FeatureExpr::And(parts) => simplify_nary(parts, true),
            FeatureExpr::Or(parts) => simplify_nary(parts, false),
        }
    }
}

fn simplify_nary(parts: &[FeatureExpr], conjunction: bool) -> FeatureExpr {
    let (unit, absorbing) = if conjunction {
        (FeatureExpr::True, FeatureExpr::False)
    } else {
        (FeatureExpr::False, FeatureExpr::True)
    };
    let mut out: Vec<FeatureExpr> = Vec::new();
    let push = |e: FeatureExpr, out: &mut Vec<FeatureExpr>| {
        if !out.contains(&e) {
            out.push(e);
        }
    };
    for part in parts {
        let s = part.simplify();
        if s == absorbing {
            return absorbing;
        }
        if s == unit {
            continue;
        }
        match s {
            FeatureExpr::And(inner) if conjunction => inner.into_iter().for_each(|e| push(e, &mut out)),
            FeatureExpr::Or(inner) if !conjunction => inner.into_iter().for_each(|e| push(e, &mut out)),
            other => push(other, &mut out),
        }
    }
    match out.len() {
        0 => unit,
        1 => out.pop().unwrap(),
        _ if conjunction => FeatureExpr::And(out),
        _ => FeatureExpr::Or(out),
    }
}

/// Top-level connective as printed, looking through single-operand wrappers.
fn printed_connective(e: &FeatureExpr) -> Option<bool> {
    match e {
        FeatureExpr::And(p) | FeatureExpr::Or(p) if p.len() == 1 => printed_connective(&p[0]),
        FeatureExpr::And(p) if p.len() > 1 => Some(true),
        FeatureExpr::Or(p) if p.len() > 1 => Some(false),
        _ => None,
    }
}

impl fmt::Display for FeatureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureExpr::True => f.write_str("TRUE"),
            FeatureExpr::False => f.write_str("FALSE"),
            FeatureExpr::Var(name) => f.write_str(name),
            FeatureExpr::Not(inner) => match printed_connective(inner) {
                Some(_) => write!(f, "!({inner})"),
                None => write!(f, "!{inner}"),
            },
            FeatureExpr::And(parts) if parts.is_empty() => f.write_str("TRUE"),
            FeatureExpr::Or(parts) if parts.is_empty() => f.write_str("FALSE"),
            FeatureExpr::And(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" && ")?;
                    }
                    if printed_connective(p) == Some(false) {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
            FeatureExpr::Or(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Or,
    And,
    Not,
    LParen,
    RParen,
    Ident(String),
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, FeatureModelError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            b'!' => {
                tokens.push((i, Token::Not));
                i += 1;
            }
            b'&' | b'|' => {
                if bytes.get(i + 1) != Some(&c) {
                    return Err(syntax(input, i, "expected '&&' or '||'"));
                }
                tokens.push((i, if c == b'&' { Token::And } else { Token::Or }));
                i += 2;
            }
            c if c == b'_' || c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i] == b'_' || bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                tokens.push((start, Token::Ident(input[start..i].to_string())));
            }
            _ => return Err(syntax(input, i, "unexpected character")),
        }
    }
    Ok(tokens)
}

fn syntax(input: &str, pos: usize, what: &str) -> FeatureModelError {
    FeatureModelError::Syntax(format!("{what} at offset {pos} in `{input}`"))
}

struct Parser<'a> {
    input: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.input.len(), |(o, _)| *o)
    }

    fn expr(&mut self) -> Result<FeatureExpr, FeatureModelError> {
        let mut parts = vec![self.term()?];
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FeatureExpr::Or(parts) })
    }

    fn term(&mut self) -> Result<FeatureExpr, FeatureModelError> {
        let mut parts = vec![self.factor()?];
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            parts.push(self.factor()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FeatureExpr::And(parts) })
    }

    fn factor(&mut self) -> Result<FeatureExpr, FeatureModelError> {
        let at = self.offset();
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(self.factor()?.negate())
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(syntax(self.input, self.offset(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "TRUE" => FeatureExpr::True,
                    "FALSE" => FeatureExpr::False,
                    _ => FeatureExpr::Var(name),
                })
            }
            Some(_) => Err(syntax(self.input, at, "unexpected token")),
            None => Err(syntax(self.input, at, "unexpected end of expression")),
        }
    }
}

impl FromStr for FeatureExpr {
    type Err = FeatureModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser { input: s, tokens: tokenize(s)?, pos: 0 };
        let expr = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(syntax(s, parser.offset(), "trailing input"));
        }
        Ok(expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> FeatureExpr {
        s.parse().unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(
            p("a || b && !c"),
            FeatureExpr::or([FeatureExpr::var("a"), FeatureExpr::and([FeatureExpr::var("b"), FeatureExpr::var("c").negate()])])
        );
        assert_eq!(p("(a || b) && c").to_string(), "(a || b) && c");
        assert_eq!(p("!!TRUE"), FeatureExpr::True.negate().negate());
        assert_eq!(p("!(a && b)").to_string(), "!(a && b)");
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "a &", "a & b", "(a", "a)", "a b", "1a", "a || || b", "a -> b"] {
            assert!(matches!(bad.parse::<FeatureExpr>(), Err(FeatureModelError::Syntax(_))), "{bad}");
        }
    }

    #[test]
    fn simplify_collapses_repeated_guards() {
        let e = p("!f && !f && t && t && TRUE && !f");
        assert_eq!(e.simplify().to_string(), "!f && t");
        assert_eq!(p("a && FALSE").simplify(), FeatureExpr::False);
        assert_eq!(p("a || TRUE").simplify(), FeatureExpr::True);
        assert_eq!(p("!!a").simplify(), p("a"));
        assert_eq!(FeatureExpr::And(vec![]).to_string(), "TRUE");
        assert_eq!(FeatureExpr::Or(vec![]).to_string(), "FALSE");
    }

    fn arb_expr() -> impl Strategy<Value = FeatureExpr> {
        let leaf = prop_oneof![
            Just(FeatureExpr::True),
            Just(FeatureExpr::False),
            prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(FeatureExpr::var),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(FeatureExpr::negate),
                prop::collection::vec(inner.clone(), 0..4).prop_map(FeatureExpr::And),
                prop::collection::vec(inner, 0..4).prop_map(FeatureExpr::Or),
            ]
        })
    }

    fn all_assignments() -> impl Iterator<Item = [bool; 4]> {
        (0u8..16).map(|m| [m & 1 != 0, m & 2 != 0, m & 4 != 0, m & 8 != 0])
    }

    fn eval(e: &FeatureExpr, bits: [bool; 4]) -> bool {
        e.evaluate_with(&|n| bits[(n.as_bytes()[0] - b'a') as usize])
    }

    proptest! {
        #[test]
        fn display_parse_preserves_meaning(e in arb_expr()) {
            let reparsed: FeatureExpr = e.to_string().parse().unwrap();
            for bits in all_assignments() {
                prop_assert_eq!(eval(&e, bits), eval(&reparsed, bits));
            }
        }

        #[test]
        fn simplify_preserves_meaning(e in arb_expr()) {
            let s = e.simplify();
            for bits in all_assignments() {
                prop_assert_eq!(eval(&e, bits), eval(&s, bits));
            }
        }
    }
}
