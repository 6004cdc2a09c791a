//! The `jetcalc` command line: every subcommand writes a plain-text report ending in
//! `VERDICT <command> <status>` lines.
//!
//! Exit codes: 0 when every check passes or a search is feasible, 1 for a
//! mathematical negative, 2 for unreadable or malformed input.

use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use super::fixtures;
use super::scenario::{render_poly, render_value, Scenario};
use crate::algebra::{Monomial, Polynomial};
use crate::connection::{
    check_ti, compare_extended, extend_flat, flat_extended_failure, iterate_connection, solve_connection,
    validate_extended, Certificate, Connection, ConnectionSearch, Derivation,
};
use crate::error::{Error, Result};
use crate::hasse::{
    check_hasse_axioms, cocycle_check, hasse_from_extended, phi_between, taylor_formula, verify_equivalence,
    HasseDerivation, HasseMap,
};

const DEFAULT_ORDER: usize = 5;
const DEFAULT_SEED: u64 = 1;
const SAMPLE_BUDGET: usize = 50;

#[derive(Parser, Debug)]
#[command(name = "jetcalc", about = "Connections, flat extensions and Hasse derivations on graded presentations")]
struct Cli {
    /// Seed for randomized property checks
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Truncation order (default 5, or the scenario's `order`)
    #[arg(long, global = true)]
    order: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a scenario and validate everything it declares
    Validate { file: String },
    /// Homogeneity of D and its vanishing on the ideal
    CheckDerivation { file: String },
    /// Vanishing of the connection on the module relations
    CheckConnection { file: String },
    /// Flatness of the connection on the ring variables
    CheckFlat { file: String },
    /// Search for a connection of the given degree
    SolveConnection {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
        #[arg(long)]
        flat: bool,
    },
    /// Flat extended connection up to the order
    Extend { file: String },
    /// Hasse derivation of the flat extension and its axioms
    Hasse {
        file: String,
        #[arg(long)]
        var: Option<String>,
    },
    /// Comparison map between the flat extension of A and the iteration of B
    Compare { a: String, b: String },
    /// Equivalences and the cocycle condition for three scenarios
    Cocycle { a: String, b: String, c: String },
    /// Built-in examples
    Demo { example: Example },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Example {
    Nodal,
    Nongorenstein,
    Taylor,
}

/// Outcome of one run, before it becomes an exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Pass,
    Fail,
}

struct Out {
    text: String,
    status: Status,
}

impl Out {
    fn new() -> Self {
        Out { text: String::new(), status: Status::Pass }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn verdict(&mut self, name: &str, ok: bool) {
        self.verdict_word(name, if ok { "PASS" } else { "FAIL" }, ok);
    }

    fn verdict_word(&mut self, name: &str, word: &str, ok: bool) {
        let _ = writeln!(self.text, "VERDICT {name} {word}");
        if !ok {
            self.status = Status::Fail;
        }
    }
}

struct Loaded {
    scenario: Scenario,
    d: Derivation,
    gamma: Option<Connection>,
}

impl Loaded {
    fn from_text(text: &str) -> Result<Self> {
        let scenario = Scenario::parse(text)?;
        let (_, d, gamma) = scenario.build()?;
        Ok(Loaded { scenario, d, gamma })
    }

    fn gamma(&self) -> Result<&Connection> {
        self.gamma.as_ref().ok_or_else(|| Error::Input("the scenario has no [connection]".into()))
    }

    fn show(&self, t: &crate::tensor::TensorElement) -> String {
        render_value(&self.scenario, t)
    }

    fn gen_name(&self, g: usize) -> &str {
        &self.scenario.module.generators[g].name
    }

    fn var_name(&self, v: usize) -> &str {
        &self.scenario.ring.variables[v].name
    }
}

fn load(path: &str) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))?;
    Loaded::from_text(&text)
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidPresentation(_)
            | Error::Parse { .. }
            | Error::UnknownIdentifier(_)
            | Error::Input(_)
            | Error::LengthMismatch(_)
            | Error::SpaceMismatch { .. }
            | Error::PresentationMismatch
            | Error::OrderExceeded { .. }
    )
}

/// Runs the command line on `argv` (including the program name) and returns the
/// exit code with everything that would go to standard output.
pub fn run_cli<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let mut out = Out::new();
    match dispatch(&cli, &mut out) {
        Ok(()) => {
            let code = if out.status == Status::Pass { 0 } else { 1 };
            (code, out.text)
        }
        Err(e) => {
            let code = if is_input_error(&e) { 2 } else { 1 };
            out.line(format!("error: {e}"));
            (code, out.text)
        }
    }
}

fn order_for(cli: &Cli, l: &Loaded) -> usize {
    cli.order.or(l.scenario.options.order).unwrap_or(DEFAULT_ORDER)
}

fn seed_for(cli: &Cli, l: &Loaded) -> u64 {
    cli.seed.or(l.scenario.options.seed).unwrap_or(DEFAULT_SEED)
}

fn dispatch(cli: &Cli, out: &mut Out) -> Result<()> {
    match &cli.command {
        Command::Validate { file } => validate(&load(file)?, out),
        Command::CheckDerivation { file } => check_derivation(&load(file)?, out),
        Command::CheckConnection { file } => check_connection(&load(file)?, out),
        Command::CheckFlat { file } => check_flat(&load(file)?, out),
        Command::SolveConnection { file, degree, flat } => {
            let l = load(file)?;
            let degree = degree
                .or(l.scenario.options.degree)
                .ok_or_else(|| Error::Input("solve-connection needs --degree".into()))?;
            let flat = *flat || l.scenario.options.flat.unwrap_or(false);
            solve(&l, degree, flat, out)
        }
        Command::Extend { file } => {
            let l = load(file)?;
            extend(&l, order_for(cli, &l), out)
        }
        Command::Hasse { file, var } => {
            let l = load(file)?;
            hasse(&l, order_for(cli, &l), var.as_deref(), seed_for(cli, &l), out)
        }
        Command::Compare { a, b } => {
            let (a, b) = (load(a)?, load(b)?);
            compare(&a, &b, cli.order.unwrap_or(DEFAULT_ORDER), out)
        }
        Command::Cocycle { a, b, c } => {
            let ls = [load(a)?, load(b)?, load(c)?];
            cocycle(&ls, cli.order.unwrap_or(DEFAULT_ORDER), out)
        }
        Command::Demo { example } => demo(*example, cli, out),
    }
}

fn report_failures(l: &Loaded, r: &crate::connection::Report, out: &mut Out) {
    for f in &r.failures {
        match &f.residual {
            Some(t) => out.line(format!("  {}: {}", f.what, l.show(t))),
            None => out.line(format!("  {}", f.what)),
        }
    }
}

fn validate(l: &Loaded, out: &mut Out) -> Result<()> {
    out.line(format!(
        "presentation: {} variables, {} generators, {} module relations",
        l.scenario.ring.variables.len(),
        l.scenario.module.generators.len(),
        l.scenario.module.relations.len()
    ));
    let rd = l.d.validate();
    out.line(format!("derivation: {rd}"));
    report_failures(l, &rd, out);
    let mut ok = rd.is_ok();
    if let Some(g) = &l.gamma {
        let rc = g.validate();
        out.line(format!("connection: {rc}"));
        report_failures(l, &rc, out);
        ok &= rc.is_ok();
    }
    out.verdict("validate", ok);
    Ok(())
}

fn check_derivation(l: &Loaded, out: &mut Out) -> Result<()> {
    for v in 0..l.scenario.ring.variables.len() {
        out.line(format!("D({}) = {}", l.var_name(v), l.show(l.d.value(v))));
    }
    let r = l.d.validate();
    report_failures(l, &r, out);
    out.verdict("check-derivation", r.is_ok());
    Ok(())
}

fn check_connection(l: &Loaded, out: &mut Out) -> Result<()> {
    let g = l.gamma()?;
    for k in 0..g.values().len() {
        out.line(format!("G({}) = {}", l.gen_name(k), l.show(g.value(k))));
    }
    let r = g.validate();
    report_failures(l, &r, out);
    out.verdict("check-connection", r.is_ok());
    Ok(())
}

fn check_flat(l: &Loaded, out: &mut Out) -> Result<()> {
    let g = l.gamma()?;
    let pres = l.d.presentation();
    for v in 0..pres.nvars() {
        let w = pres.normal_form(&g.apply(l.d.value(v)));
        out.line(format!("G(D({})) = {}", l.var_name(v), l.show(&w)));
    }
    match g.flatness_failure() {
        None => out.verdict("check-flat", true),
        Some(v) => {
            out.line(format!("  not symmetric at {}", l.var_name(v)));
            out.verdict("check-flat", false);
        }
    }
    Ok(())
}

fn solve(l: &Loaded, degree: i64, flat: bool, out: &mut Out) -> Result<()> {
    let kind = if flat { "flat connection" } else { "connection" };
    out.line(format!("searching for a {kind} of degree {degree}"));
    match solve_connection(&l.d, degree, flat)? {
        ConnectionSearch::Feasible(c) => {
            for k in 0..c.values().len() {
                out.line(format!("G({}) = {}", l.gen_name(k), l.show(c.value(k))));
            }
            out.verdict_word("solve-connection", "FEASIBLE", true);
        }
        ConnectionSearch::Infeasible { obstruction, certificate, labels } => {
            let (c, w, t) = obstruction.minimal();
            out.line(format!("obstruction in {} at weight {w}: {}", labels[*c], l.show(t)));
            for (c, w, t) in &obstruction.components {
                out.line(format!("  component {} weight {w}: {}", labels[*c], l.show(t)));
            }
            let cert = match certificate {
                Certificate::Absolute => "no connection of any degree",
                Certificate::PerDegree => "no connection of this degree",
            };
            out.line(format!("certificate: {cert}"));
            out.verdict_word("solve-connection", "INFEASIBLE", false);
        }
    }
    Ok(())
}

fn flat_extension(l: &Loaded, order: usize, out: &mut Out) -> Result<Option<crate::connection::ExtendedConnection>> {
    let g = l.gamma()?;
    match extend_flat(g, order) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NotFlat { variable, order }) => {
            out.line(format!("G is not flat at {variable} (order {order})"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn extend(l: &Loaded, order: usize, out: &mut Out) -> Result<()> {
    let Some(t) = flat_extension(l, order, out)? else {
        out.verdict("extend", false);
        return Ok(());
    };
    for i in 1..=order {
        for g in 0..l.d.presentation().rank() {
            out.line(format!("T_{i}({}) = {}", l.gen_name(g), l.show(t.value(i, g))));
        }
    }
    let flat = flat_extended_failure(&t)?;
    if let Some((v, i)) = flat {
        out.line(format!("  T_{i} D({}) is not in K", l.var_name(v)));
    }
    let mut ok = flat.is_none();
    let valid = validate_extended(&t);
    report_failures(l, &valid, out);
    ok &= valid.is_ok();
    for i in 1..=order {
        let r = check_ti(&t, i);
        report_failures(l, &r, out);
        ok &= r.is_ok();
    }
    out.line(format!("flat: {}", if flat.is_none() { "yes" } else { "no" }));
    out.verdict("extend", ok);
    Ok(())
}

fn hasse_of(l: &Loaded, order: usize, out: &mut Out) -> Result<Option<HasseDerivation>> {
    let Some(t) = flat_extension(l, order.saturating_sub(1), out)? else {
        return Ok(None);
    };
    Ok(Some(hasse_from_extended(Arc::new(t), order)?))
}

fn hasse(l: &Loaded, order: usize, var: Option<&str>, seed: u64, out: &mut Out) -> Result<()> {
    let Some(h) = hasse_of(l, order, out)? else {
        out.verdict("hasse", false);
        return Ok(());
    };
    let nvars = l.d.presentation().nvars();
    let vars: Vec<usize> = match var {
        None => (0..nvars).collect(),
        Some(name) => vec![(0..nvars)
            .find(|&v| l.var_name(v) == name)
            .ok_or_else(|| Error::UnknownIdentifier(name.into()))?],
    };
    for &v in &vars {
        for i in 1..=order {
            out.line(format!("h_{i}({}) = {}", l.var_name(v), l.show(h.value(i, v))));
        }
    }
    let r = check_hasse_axioms(&h, SAMPLE_BUDGET, seed)?;
    match &r.failure {
        None => out.line(format!("products checked: {} pairs, seed {seed}", r.pairs)),
        Some(f) => out.line(format!(
            "h_{} fails on a = {}, b = {}: {}",
            f.order,
            render_poly(&l.scenario, &f.a),
            render_poly(&l.scenario, &f.b),
            l.show(&f.residual)
        )),
    }
    out.verdict("hasse", r.is_ok());
    Ok(())
}

fn compare(a: &Loaded, b: &Loaded, order: usize, out: &mut Out) -> Result<()> {
    let Some(t) = flat_extension(a, order, out)? else {
        out.verdict("compare", false);
        return Ok(());
    };
    let s = iterate_connection(b.gamma()?, order);
    match compare_extended(&t, &s) {
        Ok(lambda) => {
            for i in 1..=order {
                for g in 0..a.d.presentation().rank() {
                    out.line(format!("lambda_{i}({}) = {}", a.gen_name(g), a.show(lambda.value(i, g))));
                }
            }
            out.verdict("compare", true);
        }
        Err(e @ (Error::NotLinear(_) | Error::NotFlat { .. })) => {
            out.line(format!("  {e}"));
            out.verdict("compare", false);
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn cocycle(ls: &[Loaded; 3], order: usize, out: &mut Out) -> Result<()> {
    let mut hs = Vec::new();
    for l in ls {
        match hasse_of(l, order, out)? {
            Some(h) => hs.push(h),
            None => {
                out.verdict("cocycle", false);
                return Ok(());
            }
        }
    }
    let mut ok = true;
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let phi = phi_between(&hs[i], &hs[j], order)?;
        let eq = verify_equivalence(&hs[i], &hs[j], &phi, order)?;
        out.line(format!("equivalence {} -> {}: {}", i + 1, j + 1, if eq { "ok" } else { "fails" }));
        ok &= eq;
    }
    let c = cocycle_check(&hs[0], &hs[1], &hs[2], order)?;
    out.line(format!("cocycle: {}", if c { "ok" } else { "fails" }));
    out.verdict("cocycle", ok && c);
    Ok(())
}

fn demo(example: Example, cli: &Cli, out: &mut Out) -> Result<()> {
    match example {
        Example::Nodal => {
            let l = Loaded::from_text(fixtures::NODAL)?;
            solve(&l, 0, false, out)
        }
        Example::Nongorenstein => {
            let l = Loaded::from_text(fixtures::NONGORENSTEIN)?;
            validate(&l, out)?;
            check_flat(&l, out)?;
            let g = l.gamma()?;
            let pres = l.d.presentation();
            let xn1 = pres.normal_form(&g.apply(&super::parse_expression("x*n1", &l.scenario.names())?));
            let yn2 = pres.normal_form(&g.apply(&super::parse_expression("y*n2", &l.scenario.names())?));
            out.line(format!("G(x*n1) = {}", l.show(&xn1)));
            out.line(format!("G(y*n2) = {}", l.show(&yn2)));
            out.verdict("relation", pres.equal(&xn1, &yn2));
            extend(&l, cli.order.unwrap_or(DEFAULT_ORDER), out)
        }
        Example::Taylor => {
            let l = Loaded::from_text(fixtures::TAYLOR)?;
            let order = cli.order.unwrap_or(DEFAULT_ORDER);
            let Some(h) = hasse_of(&l, order, out)? else {
                out.verdict("taylor", false);
                return Ok(());
            };
            let pres = l.d.presentation();
            let mut ok = true;
            for deg in 1..=3u32 {
                for a in 0..=deg {
                    let m = Polynomial::term(Monomial::from_exponents(vec![deg - a, a]), crate::algebra::rational::int(1));
                    for q in 1..=order {
                        let got = h.apply(q, &m)?;
                        let want = taylor_formula(&m, q, 2);
                        ok &= pres.equal(&got, &want);
                        if q as u32 <= deg {
                            out.line(format!("h_{q}({}) = {}", render_poly(&l.scenario, &m), l.show(&got)));
                        }
                    }
                }
            }
            out.verdict("taylor", ok);
            Ok(())
        }
    }
}
