//! Canonical text for ring elements and tensors; the output re-parses to an equal value.

use std::cmp::Reverse;

use num_traits::{One, Signed};

use super::parser::Names;
use crate::algebra::{Monomial, Polynomial, Rational};
use crate::tensor::TensorElement;

fn render_monomial(m: &Monomial, names: &Names) -> String {
    let parts: Vec<String> = m
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { names.vars[v].clone() } else { format!("{}^{e}", names.vars[v]) })
        .collect();
    parts.join("*")
}

/// `c*m` for a positive coefficient; `None` for `m = 1, c = 1` handled by the caller.
fn render_positive_term(c: &Rational, m: &Monomial, names: &Names) -> String {
    if m.is_one() {
        return c.to_string();
    }
    let mono = render_monomial(m, names);
    if c.is_one() {
        mono
    } else {
        format!("{c}*{mono}")
    }
}

/// Terms sorted by weight, then with the earlier variables first.
fn ordered_terms<'p>(p: &'p Polynomial, weights: &[i64]) -> Vec<(&'p Monomial, &'p Rational)> {
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by_key(|(m, _)| (m.weight(weights), Reverse((*m).clone())));
    terms
}

pub fn render_polynomial(p: &Polynomial, names: &Names, weights: &[i64]) -> String {
    let terms = ordered_terms(p, weights);
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let body = render_positive_term(&c.abs(), m, names);
        match (k, c.is_negative()) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

fn render_word(word: &[usize], names: &Names) -> String {
    let letters: Vec<&str> = word.iter().map(|&g| names.gens[g].as_str()).collect();
    if letters.len() == 1 {
        letters[0].to_string()
    } else {
        format!("({})", letters.join("@"))
    }
}

/// Renders a tensor as a sum over words in lexicographic order.
pub fn render_tensor(t: &TensorElement, names: &Names, weights: &[i64]) -> String {
    if t.length() == 0 {
        return render_polynomial(&t.as_scalar(), names, weights);
    }
    let mut out = String::new();
    for (k, (word, p)) in t.terms().enumerate() {
        let w = render_word(word, names);
        let (negative, body) = if p.len() == 1 {
            let (m, c) = p.terms().next().unwrap();
            let body = if m.is_one() && c.abs().is_one() {
                w
            } else {
                format!("{}*{w}", render_positive_term(&c.abs(), m, names))
            };
            (c.is_negative(), body)
        } else {
            (false, format!("({})*{w}", render_polynomial(p, names, weights)))
        };
        let sep = match (k, negative) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => " + ",
            (_, true) => " - ",
        };
        out.push_str(sep);
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, ratio};
    use crate::io::parser::parse_expression;
    use crate::tensor::SpaceTag;
    use proptest::prelude::*;

    fn names() -> Names {
        Names::new(vec!["x".into(), "y".into()], vec!["n1".into(), "n2".into()])
    }

    #[test]
    fn zero_renders_as_zero() {
        assert_eq!(render_polynomial(&Polynomial::zero(), &names(), &[3, 4]), "0");
        assert_eq!(render_tensor(&TensorElement::zero(SpaceTag::t(2)), &names(), &[3, 4]), "0");
    }

    #[test]
    fn canonical_shapes() {
        let n = names();
        let w = [3, 4];
        let t = parse_expression("4*x*(n2@n2) - n1@n1 + (y + 2*x)*(n1@n2)", &n).unwrap();
        assert_eq!(render_tensor(&t, &n, &w), "-(n1@n1) + (2*x + y)*(n1@n2) + 4*x*(n2@n2)");
        let t = parse_expression("3*y*n1 - 1/2*n2", &n).unwrap();
        assert_eq!(render_tensor(&t, &n, &w), "3*y*n1 - 1/2*n2");
        let p = parse_expression("y^2 - x + 7", &n).unwrap();
        assert_eq!(render_tensor(&p, &n, &w), "7 - x + y^2");
    }

    fn arb_tensor(len: usize) -> impl Strategy<Value = TensorElement> {
        let term = (
            proptest::collection::vec(0usize..2, len),
            0u32..3,
            0u32..3,
            -5i64..6,
            1i64..4,
        );
        proptest::collection::vec(term, 0..5).prop_map(move |terms| {
            let mut t = TensorElement::zero(SpaceTag::t(len));
            for (w, a, b, p, q) in terms {
                let m = Monomial::from_exponents(vec![a, b]);
                t.add_term(w, &Polynomial::term(m, ratio(p, q)));
            }
            t
        })
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(t in (0usize..4).prop_flat_map(arb_tensor)) {
            let n = names();
            let s = render_tensor(&t, &n, &[3, 4]);
            let back = parse_expression(&s, &n).unwrap();
            if t.is_trivially_zero() {
                prop_assert!(back.is_trivially_zero());
            } else {
                prop_assert_eq!(back.retag(t.tag()), t);
            }
        }
    }

    #[test]
    fn integer_display() {
        assert_eq!(render_positive_term(&int(3), &Monomial::one(2), &names()), "3");
    }
}
