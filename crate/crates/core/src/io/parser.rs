//! Expression language for ring elements, module elements and tensors.
//!
//! ```text
//! expr   := tensor (('+' | '-') tensor)*
//! tensor := term ('@' term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Every value is a tensor element: ring elements have length 0 and module
//! generators length 1. `@` concatenates words, `*` needs at least one factor of
//! length 0, and `/` only divides by nonzero constants.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{Polynomial, Rational};
use crate::error::{Error, Result};
use crate::tensor::{SpaceTag, TensorElement};

/// Declared names, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Names {
    pub vars: Vec<String>,
    pub gens: Vec<String>,
}

impl Names {
    pub fn new(vars: Vec<String>, gens: Vec<String>) -> Self {
        Names { vars, gens }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

struct Lexer;

impl Lexer {
    fn tokens(text: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = col0 + i;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Num(s.parse().expect("digits")), col));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            } else if "+-*/^@()".contains(c) {
                out.push((Tok::Sym(c), col));
                i += 1;
            } else {
                return Err(Error::Parse { line, col, msg: format!("unexpected character `{c}`") });
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    names: &'a Names,
}

impl<'a> Parser<'a> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn err<T>(&self, col: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, col, msg: msg.into() })
    }

    fn peek_sym(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((Tok::Sym(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn nvars(&self) -> usize {
        self.names.vars.len()
    }

    fn expr(&mut self) -> Result<TensorElement> {
        let mut acc = self.tensor()?;
        while let Some(op @ ('+' | '-')) = self.peek_sym() {
            let col = self.col();
            self.pos += 1;
            let rhs = self.tensor()?;
            acc = self.combine(acc, rhs, op == '-', col)?;
        }
        Ok(acc)
    }

    fn combine(&self, a: TensorElement, b: TensorElement, minus: bool, col: usize) -> Result<TensorElement> {
        let b = if minus { b.neg() } else { b };
        if a.length() != b.length() {
            // a bare zero adapts to the other side
            if a.is_trivially_zero() && a.length() == 0 {
                return Ok(b);
            }
            if b.is_trivially_zero() && b.length() == 0 {
                return Ok(a);
            }
            return self.err(
                col,
                format!("tensor length mismatch: {} and {}", a.length(), b.length()),
            );
        }
        Ok(a.add(&b.retag(a.tag())))
    }

    fn tensor(&mut self) -> Result<TensorElement> {
        let mut acc = self.term()?;
        while self.peek_sym() == Some('@') {
            self.pos += 1;
            let rhs = self.term()?;
            let tag = SpaceTag::t(acc.length() + rhs.length());
            acc = acc.concat(&rhs, tag);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<TensorElement> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_sym() {
            let col = self.col();
            self.pos += 1;
            let rhs = self.unary()?;
            if op == '/' {
                let c = constant_of(&rhs);
                match c {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::from_integer(1.into()) / c)),
                    Some(_) => return self.err(col, "division by zero"),
                    None => return self.err(col, "division only by nonzero constants"),
                }
            } else if acc.length() == 0 {
                acc = rhs.mul_poly(&acc.as_scalar());
            } else if rhs.length() == 0 {
                acc = acc.mul_poly(&rhs.as_scalar());
            } else {
                return self.err(col, "product of two module elements; use `@` for tensors");
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<TensorElement> {
        if self.peek_sym() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<TensorElement> {
        let base = self.atom()?;
        if self.peek_sym() != Some('^') {
            return Ok(base);
        }
        let col = self.col();
        self.pos += 1;
        let e = match self.toks.get(self.pos) {
            Some((Tok::Num(n), _)) => n.to_u32(),
            _ => return self.err(self.col(), "expected a non-negative integer exponent"),
        };
        self.pos += 1;
        let Some(e) = e else { return self.err(col, "exponent too large") };
        if base.length() != 0 {
            return self.err(col, "only ring elements can be raised to a power");
        }
        Ok(TensorElement::scalar(base.as_scalar().pow(e, self.nvars())))
    }

    fn atom(&mut self) -> Result<TensorElement> {
        let col = self.col();
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return self.err(col, "unexpected end of expression");
        };
        self.pos += 1;
        let nvars = self.nvars();
        match tok {
            Tok::Num(n) => Ok(TensorElement::scalar(Polynomial::constant(nvars, Rational::from_integer(n)))),
            Tok::Ident(name) => {
                if let Some(v) = self.names.vars.iter().position(|x| *x == name) {
                    Ok(TensorElement::scalar(Polynomial::var(nvars, v)))
                } else if let Some(g) = self.names.gens.iter().position(|x| *x == name) {
                    Ok(TensorElement::generator(g, nvars))
                } else {
                    Err(Error::UnknownIdentifier(name))
                }
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                if self.peek_sym() != Some(')') {
                    return self.err(self.col(), "expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Sym(c) => self.err(col, format!("unexpected `{c}`")),
        }
    }
}

fn constant_of(t: &TensorElement) -> Option<Rational> {
    if t.length() != 0 {
        return None;
    }
    t.as_scalar().as_constant()
}

/// Parses `text` found on line `line` starting at column `col` (both 1-based).
pub fn parse_expression_at(text: &str, names: &Names, line: usize, col: usize) -> Result<TensorElement> {
    let toks = Lexer::tokens(text, line, col)?;
    let end_col = col + text.chars().count();
    let mut p = Parser { toks, pos: 0, line, end_col, names };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err(p.col(), "unexpected trailing input");
    }
    Ok(e)
}

/// Parses a single-line expression.
pub fn parse_expression(text: &str, names: &Names) -> Result<TensorElement> {
    parse_expression_at(text, names, 1, 1)
}

/// Parses an expression that must be a ring element.
pub fn parse_polynomial(text: &str, names: &Names) -> Result<Polynomial> {
    let t = parse_expression(text, names)?;
    if t.length() != 0 {
        return Err(Error::LengthMismatch(format!("expected a ring element, found length {}", t.length())));
    }
    Ok(t.as_scalar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, ratio};
    use crate::algebra::Monomial;

    fn curve_names() -> Names {
        Names::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec!["n1".into(), "n2".into()],
        )
    }

    #[test]
    fn zero_parses_to_zero() {
        let t = parse_expression("0", &curve_names()).unwrap();
        assert_eq!(t.length(), 0);
        assert!(t.is_trivially_zero());
    }

    #[test]
    fn module_element() {
        let t = parse_expression("3*y*n1", &curve_names()).unwrap();
        assert_eq!(t.length(), 1);
        let y = Polynomial::var(3, 1).scale(&int(3));
        assert_eq!(t.coefficient(&[0]), y);
    }

    #[test]
    fn tensor_shape() {
        let t = parse_expression("n1@n1 + 2*(n2@n1)", &curve_names()).unwrap();
        assert_eq!(t.length(), 2);
        assert_eq!(t.coefficient(&[1, 0]), Polynomial::constant(3, int(2)));
        assert_eq!(t.coefficient(&[0, 0]), Polynomial::one(3));
    }

    #[test]
    fn rational_coefficients_and_powers() {
        let names = Names::new(vec!["x1".into(), "x2".into()], vec!["e1".into(), "e2".into()]);
        let t = parse_expression("1/2*x1^2*(e1@e2)", &names).unwrap();
        let m = Monomial::from_exponents(vec![2, 0]);
        assert_eq!(t.coefficient(&[0, 1]), Polynomial::term(m, ratio(1, 2)));
        let p = parse_polynomial("-(x1 - x2)^2", &names).unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn errors_carry_positions() {
        let names = curve_names();
        match parse_expression("x + * y", &names) {
            Err(Error::Parse { line: 1, col: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_expression("x + w", &names), Err(Error::UnknownIdentifier("w".into())));
        assert!(matches!(parse_expression("n1 + n1@n2", &names), Err(Error::Parse { .. })));
        assert!(matches!(parse_expression("n1*n2", &names), Err(Error::Parse { .. })));
        assert!(matches!(parse_expression("x/y", &names), Err(Error::Parse { .. })));
        assert!(matches!(parse_expression("(x", &names), Err(Error::Parse { .. })));
        assert!(matches!(parse_expression("x $", &names), Err(Error::Parse { col: 3, .. })));
    }
}
