//! Acceptance run: one PASS/FAIL line per criterion, then a single assertion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jetcalc::algebra::rational::{int, ratio};
use jetcalc::algebra::{relation_space_basis, Monomial, Polynomial, Presentation};
use jetcalc::connection::*;
use jetcalc::hasse::*;
use jetcalc::io::{fixtures, parse_expression, run_cli, Scenario};
use jetcalc::tensor::{in_k, k_dimension, k_minus_sigma, sigma, sigma_star, SpaceTag, TensorElement};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Fx {
    scenario: Scenario,
    pres: Arc<Presentation>,
    d: Derivation,
    gamma: Option<Connection>,
}

impl Fx {
    fn load(src: &str) -> Fx {
        let scenario = Scenario::parse(src).unwrap();
        let (pres, d, gamma) = scenario.build().unwrap();
        Fx { scenario, pres, d, gamma }
    }

    fn gamma(&self) -> &Connection {
        self.gamma.as_ref().unwrap()
    }

    fn el(&self, text: &str) -> TensorElement {
        parse_expression(text, &self.scenario.names()).unwrap()
    }
}

fn c1_nodal_obstruction() -> Outcome {
    let f = Fx::load(fixtures::NODAL);
    let ConnectionSearch::Infeasible { obstruction, .. } = solve_connection(&f.d, 0, false).unwrap() else {
        return Err("nodal search was feasible".into());
    };
    let (_, _, t) = obstruction.minimal();
    let want = f.el("(dy@dx) + (dx@dy)").retag(t.tag());
    ensure!(f.pres.equal(t, &want) || f.pres.equal(t, &want.neg()), "unexpected obstruction");
    ensure!(!f.pres.is_zero(t), "obstruction is zero");
    Ok(())
}

fn c2_curve_connection() -> Outcome {
    let f = Fx::load(fixtures::NONGORENSTEIN);
    let g = f.gamma();
    ensure!(f.pres.module().relations.len() == 3, "expected three relations");
    let r = g.validate();
    ensure!(r.is_ok(), "validate: {r}");
    let target = f.el("7*y*(n1@n1)");
    let a = g.apply(&f.el("x*n1"));
    let b = g.apply(&f.el("y*n2"));
    ensure!(f.pres.is_zero(&a.sub(&target)), "G(x n1) != 7 y n1 n1");
    ensure!(f.pres.is_zero(&b.sub(&target)), "G(y n2) != 7 y n1 n1");
    ensure!(is_flat_connection(g), "not flat");
    Ok(())
}

fn c3_flat_extension() -> Outcome {
    let f = Fx::load(fixtures::NONGORENSTEIN);
    let t = extend_flat(f.gamma(), 4).map_err(|e| e.to_string())?;
    for i in 0..=4 {
        for v in 0..3 {
            let w = t.apply(i, f.d.value(v)).unwrap();
            ensure!(in_k(&f.pres, &w).unwrap(), "T_{i} D(x_{v}) not in K");
        }
    }
    for i in 1..=4 {
        let r = check_ti(&t, i);
        ensure!(r.is_ok(), "identity for T_{i}: {r}");
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j + 1) as i64)
}

/// `x1^a x2^b` at `x + t`, degree `q` part in `t`, as an element of `S^q`.
fn substitution(a: u32, b: u32, q: usize) -> TensorElement {
    let mut out = TensorElement::zero(SpaceTag::s(q));
    for i in 0..=a.min(q as u32) {
        let j = q as u32 - i;
        if j > b {
            continue;
        }
        let c = binomial(a, i) * binomial(b, j);
        let mut word = vec![0; i as usize];
        word.extend(vec![1; j as usize]);
        out.add_term(word, &Polynomial::term(Monomial::from_exponents(vec![a - i, b - j]), int(c)));
    }
    out
}

fn c4_taylor() -> Outcome {
    let f = Fx::load(fixtures::TAYLOR);
    let h = hasse_from_extended(Arc::new(iterate_connection(f.gamma(), 5)), 5).unwrap();
    for deg in 0..=4u32 {
        for a in 0..=deg {
            let m = Polynomial::term(Monomial::from_exponents(vec![a, deg - a]), int(1));
            for q in 0..=5 {
                let got = h.apply(q, &m).unwrap();
                let want = substitution(a, deg - a, q);
                ensure!(f.pres.equal(&got, &want), "h_{q}(x1^{a} x2^{}) differs", deg - a);
            }
        }
    }
    Ok(())
}

fn flat_hasse(src: &str, order: usize) -> HasseDerivation {
    let f = Fx::load(src);
    hasse_from_extended(Arc::new(extend_flat(f.gamma(), order - 1).unwrap()), order).unwrap()
}

fn c5_hasse_axioms() -> Outcome {
    for src in [fixtures::NONGORENSTEIN, fixtures::TAYLOR] {
        let h = flat_hasse(src, 5);
        let r = check_hasse_axioms(&h, 50, 2024).unwrap();
        ensure!(r.pairs >= 50, "only {} pairs", r.pairs);
        if let Some(f) = r.failure {
            return Err(format!("h_{} fails", f.order));
        }
    }
    Ok(())
}

fn c6_sigma_and_k() -> Outcome {
    for src in [fixtures::NODAL, fixtures::NONGORENSTEIN, fixtures::TAYLOR] {
        let f = Fx::load(src);
        let low = *f.pres.gen_weights().iter().min().unwrap();
        for n in 2..=3usize {
            for w in low * n as i64..=12 {
                for b in f.pres.basis(SpaceTag::r(n), w) {
                    let once = sigma_star(&b).unwrap();
                    let twice = sigma_star(&once).unwrap();
                    ensure!(f.pres.is_zero(&twice.sub(&once.scale(&int(n as i64)))), "sigma_star^2 at n={n}, w={w}");
                }
            }
        }
        for w in 2 * low..=12 {
            let t2 = f.pres.dimension(SpaceTag::t(2), w);
            let a2 = f.pres.dimension(SpaceTag::a(2), w);
            let k2 = k_dimension(&f.pres, 2, w);
            ensure!(k2 == t2 - a2, "dim K^2 = {k2}, dim T^2 - dim A^2 = {} at weight {w}", t2 - a2);
        }
        for n in 2..=4usize {
            for w in low * n as i64..=low * n as i64 + 3 {
                for rel in relation_space_basis(&f.pres, SpaceTag::r(n), w) {
                    ensure!(f.pres.is_zero(&sigma(&rel.retag(SpaceTag::r(n))).unwrap()), "sigma on a relation, n={n}");
                }
                for b in f.pres.basis(SpaceTag::t(n), w) {
                    for k in 0..n.saturating_sub(2) {
                        let swapped = b.map_words(SpaceTag::r(n), |word| {
                            let mut v = word.to_vec();
                            v.swap(k, k + 1);
                            vec![(int(1), v)]
                        });
                        let diff = b.clone().retag(SpaceTag::r(n)).sub(&swapped);
                        ensure!(f.pres.is_zero(&sigma(&diff).unwrap()), "sigma after a transposition, n={n}");
                    }
                }
            }
        }
    }
    Ok(())
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..rng.gen_range(1..3) {
        let e: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..2)).collect();
        p.add_term(Monomial::from_exponents(e), int(rng.gen_range(-3..4)));
    }
    p
}

fn random_k(rng: &mut ChaCha8Rng, p: usize) -> TensorElement {
    let mut t = TensorElement::zero(SpaceTag::r(p));
    for _ in 0..rng.gen_range(1..4) {
        let word = (0..p).map(|_| rng.gen_range(0..2)).collect();
        t.add_term(word, &random_poly(rng, 2));
    }
    sigma_star(&t).unwrap()
}

fn c7_iterated_round_trip() -> Outcome {
    let f = Fx::load(fixtures::TAYLOR);
    let t = extend_flat(f.gamma(), 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut swts_checked = 0;
    for src in [fixtures::TAYLOR_NU1, fixtures::TAYLOR_NU2, fixtures::TAYLOR_NU3] {
        let nu = Fx::load(src);
        for g in 0..2 {
            let v = nu.gamma().value(g);
            ensure!(f.pres.is_zero(&k_minus_sigma(1, v).unwrap()), "nu is not symmetric");
        }
        let s = iterate_connection(nu.gamma(), 4);
        let lambda = compare_extended(&t, &s).map_err(|e| e.to_string())?;
        ensure!(lambda.starts_with_identity(), "lambda_0 != id");
        ensure!(!lambda.is_trivial(), "lambda is trivial");
        for i in 1..=4 {
            for g in 0..2 {
                for v in 0..2 {
                    let x = Polynomial::var(2, v);
                    let m = TensorElement::generator(g, 2).mul_poly(&x);
                    let mut r = s.apply(i, &m).unwrap().sub(&t.apply(i, &m).unwrap());
                    for l in 1..i {
                        r = r.sub(&s_map(&lambda, i - l, &t.apply(l, &m).unwrap()).unwrap());
                    }
                    let direct = r.scale(&ratio(1, i as i64 + 1));
                    let linear = lambda.value(i, g).mul_poly(&x);
                    ensure!(f.pres.equal(&direct, &linear), "lambda_{i} not linear");
                }
            }
        }
        let eq = EquiviterMap { t: &t, lambda: &lambda };
        for i in 0..=4 {
            for m in ["e1", "e2", "x1*e2", "x2^2*e1 - x1*e2"] {
                let m = f.el(m);
                ensure!(f.pres.equal(&eq.apply(i, &m).unwrap(), &s.apply(i, &m).unwrap()), "S_{i} not recovered");
            }
        }
        for _ in 0..8 {
            let p = rng.gen_range(1..5usize);
            let q = rng.gen_range(0..=(5 - p).min(4));
            let omega = random_k(&mut rng, p);
            ensure!(in_k(&f.pres, &omega).unwrap(), "sample outside K");
            let lhs = s_map(&lambda, q, &omega).unwrap().project(SpaceTag::s(p + q)).unwrap();
            let rhs = s_tilde(&lambda, q, &omega).unwrap().scale(&ratio((p + q) as i64, p as i64));
            ensure!(f.pres.equal(&lhs, &rhs), "s_q and s~_q disagree at p={p}, q={q}");
            swts_checked += 1;
        }
    }
    ensure!(swts_checked >= 20, "only {swts_checked} samples");
    Ok(())
}

fn c8_equivalence_and_cocycle() -> Outcome {
    let hs: Vec<HasseDerivation> =
        [fixtures::TAYLOR_NU1, fixtures::TAYLOR_NU2, fixtures::TAYLOR_NU3].iter().map(|s| flat_hasse(s, 5)).collect();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let phi = phi_between(&hs[i], &hs[j], 5).unwrap();
                ensure!(verify_equivalence(&hs[i], &hs[j], &phi, 5).unwrap(), "pair {i}, {j}");
            }
        }
    }
    ensure!(cocycle_check(&hs[0], &hs[1], &hs[2], 5).unwrap(), "cocycle fails");
    let p01 = phi_between(&hs[0], &hs[1], 5).unwrap();
    let p10 = phi_between(&hs[1], &hs[0], 5).unwrap();
    ensure!(p01.order() == 4, "phi has order {}", p01.order());
    let id = identity_automorphism(Arc::clone(p01.presentation()), 4);
    ensure!(composition_equals(&p01, &p10, &id).unwrap(), "reversed pair is not the identity");
    ensure!(!p01.lambda().is_trivial(), "phi_01 is the identity");
    Ok(())
}

fn c9_jets() -> Outcome {
    for src in [fixtures::NONGORENSTEIN, fixtures::TAYLOR] {
        let h = flat_hasse(src, 5);
        let pres = h.presentation();
        let cap = default_cap(pres);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let a = random_homogeneous(pres, &mut rng, cap);
            let b = random_homogeneous(pres, &mut rng, cap);
            let ta = tau(&h, &a, 5).unwrap();
            let tb = tau(&h, &b, 5).unwrap();
            ensure!(jet_product(&ta, &tb).equal(&tau(&h, &(&a * &b), 5).unwrap(), pres), "tau not multiplicative");
            ensure!(ta.truncate(4).equal(&tau(&h, &a, 4).unwrap(), pres), "truncation of tau");
            // u lies in the kernel of truncation exactly when it is concentrated in degree 5
            let u = ta.sub(&tb);
            let lower_zero = (0..5).all(|i| pres.is_zero(u.component(i)));
            ensure!(u.truncate(4).is_zero(pres) == lower_zero, "kernel test");
            let mut top = vec![TensorElement::scalar(Polynomial::zero())];
            top.extend((1..5).map(|i| TensorElement::zero(SpaceTag::s(i))));
            top.push(u.component(5).clone());
            let top = JetElement::new(top).unwrap();
            ensure!(top.truncate(4).is_zero(pres), "top slot survives truncation");
            ensure!(jet_product(&top, &top).is_zero(pres), "top squared is nonzero");
            let prod = jet_product(&top, &ta);
            ensure!(prod.truncate(4).is_zero(pres), "kernel is not an ideal");
            ensure!(pres.equal(prod.component(5), &top.component(5).mul_poly(&a)), "top times tau(a)");
        }
        let one = tau(&h, &Polynomial::one(pres.nvars()), 5).unwrap();
        ensure!(one.equal(&JetElement::one(5, pres.nvars()), pres), "tau(1) != 1");
    }
    Ok(())
}

fn c10_io() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("jet") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let s = Scenario::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let back = Scenario::parse(&s.render()).map_err(|e| e.to_string())?;
        ensure!(back == s, "{} does not round-trip", path.display());
        seen += 1;
    }
    ensure!(seen == fixtures::ALL.len(), "found {seen} fixture files");
    let expect = [
        ("nodal", 1, vec!["VERDICT solve-connection INFEASIBLE"]),
        ("nongorenstein", 0, vec!["VERDICT validate PASS", "VERDICT check-flat PASS", "VERDICT extend PASS"]),
        ("taylor", 0, vec!["VERDICT taylor PASS"]),
    ];
    for (name, code, verdicts) in expect {
        let (got, out) = run_cli(["jetcalc", "demo", name]);
        ensure!(got == code, "demo {name} exited {got}");
        for v in verdicts {
            ensure!(out.contains(v), "demo {name} lacks `{v}`");
        }
        ensure!(!out.contains(" FAIL\n") || code != 0, "demo {name} reports a failure");
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("nodal obstruction", c1_nodal_obstruction),
        ("non-Gorenstein flat connection", c2_curve_connection),
        ("flat extension to order 4", c3_flat_extension),
        ("Taylor reproduction", c4_taylor),
        ("Hasse axioms", c5_hasse_axioms),
        ("sigma and K identities", c6_sigma_and_k),
        ("comparison round trip", c7_iterated_round_trip),
        ("equivalence and cocycle", c8_equivalence_and_cocycle),
        ("jet algebra exactness", c9_jets),
        ("I/O contract", c10_io),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("criterion {}: PASS {name}", k + 1),
            Err(msg) => {
                println!("criterion {}: FAIL {name}: {msg}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
