//! Sectioned scenario files.
//!
//! ```text
//! # comment
//! [ring]
//! vars = x:3, y:4, z:5
//! ideal = y^2 - x*z, x^3 - y*z
//! [module]
//! gens = n1:-2, n2:-3
//! rels = x*n1 - y*n2
//! [derivation]
//! degree = -1
//! D(x) = 3*y*n1
//! [connection]
//! degree = -1
//! G(n1) = 4*x*(n2@n2)
//! [options]
//! order = 5
//! ```
//!
//! `[ring]` and `[module]` are mandatory, a section may appear once, and list
//! keys may be repeated to continue a list. Missing `D(..)` and `G(..)` values
//! are zero.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::parser::{parse_expression_at, Names};
use super::render::{render_polynomial, render_tensor};
use crate::algebra::{
    Generator, ModulePresentation, Polynomial, Presentation, RingPresentation, Variable,
};
use crate::connection::{Connection, Derivation};
use crate::error::{Error, Result};
use crate::tensor::{SpaceTag, TensorElement};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub order: Option<usize>,
    pub degree: Option<i64>,
    pub flat: Option<bool>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivationSpec {
    pub degree: i64,
    /// one module element per variable
    pub values: Vec<TensorElement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionSpec {
    pub degree: Option<i64>,
    /// one element of length 2 per generator
    pub values: Vec<TensorElement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub ring: RingPresentation,
    pub module: ModulePresentation,
    pub derivation: Option<DerivationSpec>,
    pub connection: Option<ConnectionSpec>,
    pub options: Options,
}

const SECTIONS: [&str; 5] = ["ring", "module", "derivation", "connection", "options"];

/// `(line number, key, value, column of the value)`
type Entry = (usize, String, String, usize);

fn perr<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, col, msg: msg.into() })
}

/// Splits at top-level commas, returning each piece with its column offset.
fn split_list(s: &str, col0: usize) -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let chars: Vec<char> = s.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push((chars[start..i].iter().collect(), col0 + start));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((chars[start..].iter().collect(), col0 + start));
    out.into_iter()
        .map(|(p, c)| {
            let lead = p.len() - p.trim_start().len();
            (p.trim().to_string(), c + lead)
        })
        .filter(|(p, _)| !p.is_empty())
        .collect()
}

fn parse_named_weights(entries: &[&Entry]) -> Result<Vec<(String, i64)>> {
    let mut out = Vec::new();
    for (line, _, value, col) in entries {
        for (item, c) in split_list(value, *col) {
            let Some((name, w)) = item.split_once(':') else {
                return perr(*line, c, format!("expected `name:weight`, found `{item}`"));
            };
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|ch| ch.is_alphanumeric() || ch == '_' || ch == '\'')
                || name.chars().next().unwrap().is_ascii_digit()
            {
                return perr(*line, c, format!("invalid name `{name}`"));
            }
            let w: i64 = match w.trim().parse() {
                Ok(w) => w,
                Err(_) => return perr(*line, c, format!("invalid weight `{}`", w.trim())),
            };
            out.push((name.to_string(), w));
        }
    }
    Ok(out)
}

fn key_arg<'k>(key: &'k str, head: &str) -> Option<&'k str> {
    key.strip_prefix(head)?.strip_prefix('(')?.strip_suffix(')').map(str::trim)
}

impl Scenario {
    pub fn names(&self) -> Names {
        Names::new(
            self.ring.variables.iter().map(|v| v.name.clone()).collect(),
            self.module.generators.iter().map(|g| g.name.clone()).collect(),
        )
    }

    pub fn parse(text: &str) -> Result<Scenario> {
        let mut sections: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let content = raw.split('#').next().unwrap();
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let lead = content.len() - content.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return perr(line, lead + 1, "unterminated section header");
                };
                let name = name.trim().to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    return perr(line, lead + 1, format!("unknown section [{name}]"));
                }
                if sections.contains_key(&name) {
                    return perr(line, lead + 1, format!("duplicate section [{name}]"));
                }
                sections.insert(name.clone(), Vec::new());
                current = Some(name);
                continue;
            }
            let Some(sec) = &current else {
                return perr(line, lead + 1, "entry outside of any section");
            };
            let Some(eq) = content.find('=') else {
                return perr(line, lead + 1, "expected `key = value`");
            };
            let key = content[..eq].trim().to_string();
            let value = &content[eq + 1..];
            let vlead = value.len() - value.trim_start().len();
            let col = content[..eq + 1 + vlead].chars().count() + 1;
            sections
                .get_mut(sec)
                .unwrap()
                .push((line, key, value.trim().to_string(), col));
        }

        let ring_entries = sections.remove("ring").ok_or_else(|| Error::Input("missing [ring]".into()))?;
        let module_entries =
            sections.remove("module").ok_or_else(|| Error::Input("missing [module]".into()))?;

        // ring
        let mut var_lines = Vec::new();
        let mut ideal_lines = Vec::new();
        for e in &ring_entries {
            match e.1.as_str() {
                "vars" => var_lines.push(e),
                "ideal" => ideal_lines.push(e),
                k => return perr(e.0, 1, format!("unknown key `{k}` in [ring]")),
            }
        }
        let variables: Vec<Variable> = parse_named_weights(&var_lines)?
            .into_iter()
            .map(|(name, weight)| Variable { name, weight })
            .collect();
        let mut names = Names::new(variables.iter().map(|v| v.name.clone()).collect(), Vec::new());
        let expr = |names: &Names, text: &str, line: usize, col: usize, len: usize| -> Result<TensorElement> {
            let t = parse_expression_at(text, names, line, col)?;
            if t.length() != len {
                if t.is_trivially_zero() {
                    return Ok(TensorElement::zero(SpaceTag::t(len)));
                }
                return perr(line, col, format!("tensor length mismatch: expected {len}, found {}", t.length()));
            }
            Ok(t.retag(SpaceTag::t(len)))
        };
        let mut ideal = Vec::new();
        for (line, _, value, col) in ideal_lines {
            for (item, c) in split_list(value, *col) {
                ideal.push(expr(&names, &item, *line, c, 0)?.as_scalar());
            }
        }

        // module
        let mut gen_lines = Vec::new();
        let mut rel_lines = Vec::new();
        for e in &module_entries {
            match e.1.as_str() {
                "gens" => gen_lines.push(e),
                "rels" => rel_lines.push(e),
                k => return perr(e.0, 1, format!("unknown key `{k}` in [module]")),
            }
        }
        let generators: Vec<Generator> = parse_named_weights(&gen_lines)?
            .into_iter()
            .map(|(name, weight)| Generator { name, weight })
            .collect();
        names.gens = generators.iter().map(|g| g.name.clone()).collect();
        let mut all_names: Vec<&String> = names.vars.iter().chain(&names.gens).collect();
        all_names.sort();
        if let Some(w) = all_names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Input(format!("name `{}` declared twice", w[0])));
        }
        let rank = generators.len();
        let mut relations = Vec::new();
        for (line, _, value, col) in rel_lines {
            for (item, c) in split_list(value, *col) {
                let t = expr(&names, &item, *line, c, 1)?;
                relations.push(t.module_coeffs(rank));
            }
        }

        // derivation
        let derivation = match sections.remove("derivation") {
            None => None,
            Some(entries) => {
                let mut degree = None;
                let mut values = vec![None; names.vars.len()];
                for (line, key, value, col) in &entries {
                    if key == "degree" {
                        degree = Some(parse_int(value, *line, *col)?);
                    } else if let Some(v) = key_arg(key, "D") {
                        let Some(i) = names.vars.iter().position(|x| x == v) else {
                            return Err(Error::UnknownIdentifier(v.to_string()));
                        };
                        if values[i].is_some() {
                            return perr(*line, 1, format!("D({v}) given twice"));
                        }
                        values[i] = Some(expr(&names, value, *line, *col, 1)?);
                    } else {
                        return perr(*line, 1, format!("unknown key `{key}` in [derivation]"));
                    }
                }
                let Some(degree) = degree else {
                    return Err(Error::Input("[derivation] needs `degree`".into()));
                };
                let values = values
                    .into_iter()
                    .map(|v| v.unwrap_or_else(|| TensorElement::zero(SpaceTag::t(1))))
                    .collect();
                Some(DerivationSpec { degree, values })
            }
        };

        // connection
        let connection = match sections.remove("connection") {
            None => None,
            Some(entries) => {
                let mut degree = None;
                let mut values = vec![None; rank];
                for (line, key, value, col) in &entries {
                    if key == "degree" {
                        degree = Some(parse_int(value, *line, *col)?);
                    } else if let Some(g) = key_arg(key, "G") {
                        let Some(i) = names.gens.iter().position(|x| x == g) else {
                            return Err(Error::UnknownIdentifier(g.to_string()));
                        };
                        if values[i].is_some() {
                            return perr(*line, 1, format!("G({g}) given twice"));
                        }
                        values[i] = Some(expr(&names, value, *line, *col, 2)?);
                    } else {
                        return perr(*line, 1, format!("unknown key `{key}` in [connection]"));
                    }
                }
                let values = values
                    .into_iter()
                    .map(|v| v.unwrap_or_else(|| TensorElement::zero(SpaceTag::t(2))))
                    .collect();
                Some(ConnectionSpec { degree, values })
            }
        };

        // options
        let mut options = Options::default();
        if let Some(entries) = sections.remove("options") {
            for (line, key, value, col) in &entries {
                match key.as_str() {
                    "order" => options.order = Some(parse_int(value, *line, *col)? as usize),
                    "degree" => options.degree = Some(parse_int(value, *line, *col)?),
                    "seed" => options.seed = Some(parse_int(value, *line, *col)? as u64),
                    "flat" => {
                        options.flat = Some(match value.as_str() {
                            "true" => true,
                            "false" => false,
                            _ => return perr(*line, *col, "expected `true` or `false`"),
                        })
                    }
                    k => return perr(*line, 1, format!("unknown key `{k}` in [options]")),
                }
            }
        }

        Ok(Scenario {
            ring: RingPresentation { variables, ideal },
            module: ModulePresentation { generators, relations },
            derivation,
            connection,
            options,
        })
    }

    /// Canonical text; parsing it gives back an equal scenario.
    pub fn render(&self) -> String {
        let names = self.names();
        let w = self.ring.weights();
        let named = |items: Vec<(String, i64)>| -> String {
            items.iter().map(|(n, w)| format!("{n}:{w}")).collect::<Vec<_>>().join(", ")
        };
        let mut out = String::new();
        out.push_str("[ring]\n");
        out.push_str(&format!(
            "vars = {}\n",
            named(self.ring.variables.iter().map(|v| (v.name.clone(), v.weight)).collect())
        ));
        if !self.ring.ideal.is_empty() {
            let items: Vec<String> = self.ring.ideal.iter().map(|p| render_polynomial(p, &names, &w)).collect();
            out.push_str(&format!("ideal = {}\n", items.join(", ")));
        }
        out.push_str("\n[module]\n");
        out.push_str(&format!(
            "gens = {}\n",
            named(self.module.generators.iter().map(|g| (g.name.clone(), g.weight)).collect())
        ));
        if !self.module.relations.is_empty() {
            let items: Vec<String> = self
                .module
                .relations
                .iter()
                .map(|r| render_tensor(&TensorElement::from_module_coeffs(r), &names, &w))
                .collect();
            out.push_str(&format!("rels = {}\n", items.join(", ")));
        }
        if let Some(d) = &self.derivation {
            out.push_str("\n[derivation]\n");
            out.push_str(&format!("degree = {}\n", d.degree));
            for (v, val) in d.values.iter().enumerate() {
                out.push_str(&format!("D({}) = {}\n", names.vars[v], render_tensor(val, &names, &w)));
            }
        }
        if let Some(c) = &self.connection {
            out.push_str("\n[connection]\n");
            if let Some(d) = c.degree {
                out.push_str(&format!("degree = {d}\n"));
            }
            for (g, val) in c.values.iter().enumerate() {
                out.push_str(&format!("G({}) = {}\n", names.gens[g], render_tensor(val, &names, &w)));
            }
        }
        let o = &self.options;
        if *o != Options::default() {
            out.push_str("\n[options]\n");
            if let Some(x) = o.order {
                out.push_str(&format!("order = {x}\n"));
            }
            if let Some(x) = o.degree {
                out.push_str(&format!("degree = {x}\n"));
            }
            if let Some(x) = o.flat {
                out.push_str(&format!("flat = {x}\n"));
            }
            if let Some(x) = o.seed {
                out.push_str(&format!("seed = {x}\n"));
            }
        }
        out
    }

    pub fn presentation(&self) -> Result<Arc<Presentation>> {
        Ok(Arc::new(Presentation::new(self.ring.clone(), self.module.clone())?))
    }

    pub fn derivation(&self, pres: &Arc<Presentation>) -> Result<Derivation> {
        let Some(d) = &self.derivation else {
            return Err(Error::Input("missing [derivation]".into()));
        };
        Derivation::new(pres.clone(), d.degree, d.values.clone())
    }

    pub fn connection(&self, d: &Derivation) -> Result<Option<Connection>> {
        match &self.connection {
            None => Ok(None),
            Some(c) => Ok(Some(Connection::new(d.clone(), c.degree, c.values.clone())?)),
        }
    }

    /// Presentation, derivation and connection in one go.
    pub fn build(&self) -> Result<(Arc<Presentation>, Derivation, Option<Connection>)> {
        let pres = self.presentation()?;
        let d = self.derivation(&pres)?;
        let c = self.connection(&d)?;
        Ok((pres, d, c))
    }
}

fn parse_int(s: &str, line: usize, col: usize) -> Result<i64> {
    s.trim()
        .parse()
        .or_else(|_| perr(line, col, format!("expected an integer, found `{s}`")))
}

/// Shorthand for `Scenario::parse`.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    Scenario::parse(text)
}

/// The polynomial ring elements of a scenario as text, used in reports.
pub fn render_value(s: &Scenario, t: &TensorElement) -> String {
    render_tensor(t, &s.names(), &s.ring.weights())
}

pub fn render_poly(s: &Scenario, p: &Polynomial) -> String {
    render_polynomial(p, &s.names(), &s.ring.weights())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_misses_ring() {
        assert_eq!(Scenario::parse(""), Err(Error::Input("missing [ring]".into())));
    }

    #[test]
    fn duplicate_section_is_rejected() {
        let text = "[ring]\nvars = x:1\n[module]\ngens = e:0\n[ring]\n";
        assert!(matches!(Scenario::parse(text), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn expression_errors_report_file_positions() {
        let text = "[ring]\nvars = x:1\n[module]\ngens = e:0\nrels = x*e + * e\n";
        match Scenario::parse(text) {
            Err(Error::Parse { line: 5, col: 14, .. }) => {}
            other => panic!("{other:?}"),
        }
        let text = "[ring]\nvars = x:1\n[module]\ngens = e:0\n[connection]\nG(e) = e\n";
        assert!(matches!(Scenario::parse(text), Err(Error::Parse { line: 6, .. })));
        let text = "[ring]\nvars = x:1\n[module]\ngens = e:0\nrels = w*e\n";
        assert_eq!(Scenario::parse(text), Err(Error::UnknownIdentifier("w".into())));
    }

    #[test]
    fn repeated_list_keys_append() {
        let text = "[ring]\nvars = x:1\nvars = y:2\n[module]\ngens = e:0\n";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.ring.variables.len(), 2);
        assert_eq!(Scenario::parse(&s.render()).unwrap(), s);
    }
}
