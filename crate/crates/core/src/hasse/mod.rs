//! Hasse derivations, the automorphisms comparing them, and truncated jet algebras.

mod equivalence;
mod jets;

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::rational::{int, recip};
use crate::algebra::{Monomial, Polynomial, Presentation};
use crate::connection::{Derivation, ExtendedMap};
use crate::error::{Error, Result};
use crate::tensor::{mul_symmetric, SpaceTag, TensorElement};

pub use equivalence::{
    cocycle_check, composition_equals, identity_automorphism, phi_between, phi_from_lambda, verify_equivalence,
    AlgebraAutomorphism,
};
pub use jets::{jet_product, tau, JetElement};

/// A sequence `h_0, ..., h_N` with `h_i` mapping the ring to `S^i(F)`.
pub trait HasseMap {
    fn presentation(&self) -> &Presentation;

    fn order(&self) -> usize;

    fn apply(&self, i: usize, a: &Polynomial) -> Result<TensorElement>;
}

/// The Hasse derivation `h_i = (1/i) T_(i-1) D` of an extended connection.
pub struct HasseDerivation {
    ext: Arc<dyn ExtendedMap>,
    order: usize,
    /// `cache[i][v] = h_i(x_v)`
    cache: Vec<Vec<TensorElement>>,
}

impl std::fmt::Debug for HasseDerivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HasseDerivation").field("order", &self.order).field("cache", &self.cache).finish()
    }
}

/// Builds `h` of order `order <= T.order + 1` and evaluates it on the ring variables.
pub fn hasse_from_extended(ext: Arc<dyn ExtendedMap>, order: usize) -> Result<HasseDerivation> {
    if order > ext.order() + 1 {
        return Err(Error::OrderExceeded { requested: order, order: ext.order() + 1 });
    }
    let mut h = HasseDerivation { ext, order, cache: Vec::new() };
    let nvars = h.presentation().nvars();
    let mut cache = Vec::with_capacity(order + 1);
    for i in 0..=order {
        let row = (0..nvars)
            .map(|v| h.evaluate(i, &Polynomial::var(nvars, v)))
            .collect::<Result<Vec<_>>>()?;
        cache.push(row);
    }
    h.cache = cache;
    Ok(h)
}

impl HasseDerivation {
    pub fn extended(&self) -> &Arc<dyn ExtendedMap> {
        &self.ext
    }

    pub fn derivation(&self) -> &Derivation {
        self.ext.derivation()
    }

    /// `h_i(x_v)`.
    pub fn value(&self, i: usize, v: usize) -> &TensorElement {
        &self.cache[i][v]
    }

    fn evaluate(&self, i: usize, a: &Polynomial) -> Result<TensorElement> {
        let pres = self.presentation();
        if i == 0 {
            return Ok(TensorElement::scalar(a.clone()).retag(SpaceTag::s(0)));
        }
        let da = self.ext.derivation().apply(a);
        let t = self.ext.apply(i - 1, &da)?.scale(&recip(i as i64));
        Ok(pres.normal_form(&t.retag(SpaceTag::s(i))))
    }
}

impl HasseMap for HasseDerivation {
    fn presentation(&self) -> &Presentation {
        self.ext.presentation()
    }

    fn order(&self) -> usize {
        self.order
    }

    fn apply(&self, i: usize, a: &Polynomial) -> Result<TensorElement> {
        if i > self.order {
            return Err(Error::OrderExceeded { requested: i, order: self.order });
        }
        self.evaluate(i, a)
    }
}

/// `h_i(a)`.
pub fn hasse_apply(h: &dyn HasseMap, a: &Polynomial, i: usize) -> Result<TensorElement> {
    h.apply(i, a)
}

/// A product `h_i(ab) != sum_j h_j(a) h_(i-j)(b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HasseFailure {
    pub order: usize,
    pub a: Polynomial,
    pub b: Polynomial,
    pub residual: TensorElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HasseReport {
    pub pairs: usize,
    pub failure: Option<HasseFailure>,
}

impl HasseReport {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// A random weighted-homogeneous polynomial of weight at most `cap`, never zero.
pub fn random_homogeneous(pres: &Presentation, rng: &mut ChaCha8Rng, cap: i64) -> Polynomial {
    let weights: Vec<i64> = (1..=cap).filter(|&w| !pres.monomials(w).is_empty()).collect();
    let w = *weights.choose(rng).expect("some monomial of positive weight");
    let monos: Vec<Monomial> = pres.monomials(w);
    let nterms = rng.gen_range(1..=3.min(monos.len()));
    let mut p = Polynomial::zero();
    for m in monos.choose_multiple(rng, nterms) {
        let mut c = rng.gen_range(-3i64..=3);
        if c == 0 {
            c = 1;
        }
        p.add_term(m.clone(), int(c));
    }
    p
}

/// Degree cap for random test polynomials: three times the largest variable weight.
pub fn default_cap(pres: &Presentation) -> i64 {
    3 * pres.var_weights().iter().copied().max().unwrap_or(1)
}

/// Multiplicativity of `h` on `budget` seeded random homogeneous pairs, for all orders.
pub fn check_hasse_axioms(h: &dyn HasseMap, budget: usize, seed: u64) -> Result<HasseReport> {
    let pres = h.presentation();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = default_cap(pres);
    for k in 0..budget {
        let a = random_homogeneous(pres, &mut rng, cap);
        let b = random_homogeneous(pres, &mut rng, cap);
        let ab = &a * &b;
        for i in 0..=h.order() {
            let lhs = h.apply(i, &ab)?;
            let mut rhs = TensorElement::zero(SpaceTag::s(i));
            for j in 0..=i {
                rhs.add_assign(&mul_symmetric(&h.apply(j, &a)?, &h.apply(i - j, &b)?));
            }
            let diff = lhs.retag(SpaceTag::s(i)).sub(&rhs);
            if !pres.is_zero(&diff) {
                return Ok(HasseReport {
                    pairs: k + 1,
                    failure: Some(HasseFailure { order: i, a, b, residual: pres.normal_form(&diff) }),
                });
            }
        }
    }
    Ok(HasseReport { pairs: budget, failure: None })
}

/// `sum D_(j_1) ... D_(j_q)(a) / q! * e_(j_1) ... e_(j_q)` in `S^q`, for the free module
/// whose generator `e_j` is `D(x_j)`.
pub fn taylor_formula(a: &Polynomial, q: usize, nvars: usize) -> TensorElement {
    let mut fact = int(1);
    for k in 2..=q as i64 {
        fact *= int(k);
    }
    let scale = int(1) / fact;
    let mut out = TensorElement::zero(SpaceTag::s(q));
    for word in crate::algebra::quotient::all_words(nvars, q) {
        let mut p = a.clone();
        for &j in &word {
            p = p.partial(j);
        }
        if !p.is_zero() {
            let mut sorted = word.clone();
            sorted.sort_unstable();
            out.add_term(sorted, &p.scale(&scale));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::ratio;
    use crate::algebra::Rational;
    use crate::connection::{compare_extended, extend_flat, iterate_connection, ComparisonMap, Connection};
    use crate::io::{fixtures, Scenario};

    fn connection(src: &str) -> Connection {
        Scenario::parse(src).unwrap().build().unwrap().2.unwrap()
    }

    fn hasse(src: &str, order: usize) -> HasseDerivation {
        let g = connection(src);
        hasse_from_extended(Arc::new(extend_flat(&g, order - 1).unwrap()), order).unwrap()
    }

    fn mono(e: &[u32], c: Rational) -> Polynomial {
        Polynomial::term(Monomial::from_exponents(e.to_vec()), c)
    }

    #[test]
    fn low_orders() {
        let h = hasse(fixtures::NONGORENSTEIN, 2);
        let pres = h.presentation();
        let x = Polynomial::var(3, 0);
        assert_eq!(h.apply(0, &x).unwrap().as_scalar(), x);
        let d = h.derivation().value(0).clone().retag(SpaceTag::s(1));
        assert!(pres.is_zero(&h.apply(1, &x).unwrap().sub(&d)));
        let one = Polynomial::one(3);
        for i in 1..=2 {
            assert!(pres.is_zero(&h.apply(i, &one).unwrap()));
        }
        assert!(matches!(h.apply(3, &x), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn order_cannot_exceed_source() {
        let g = connection(fixtures::TAYLOR);
        let t = Arc::new(iterate_connection(&g, 2));
        assert!(hasse_from_extended(t.clone(), 3).is_ok());
        assert!(matches!(hasse_from_extended(t, 4), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn taylor_example() {
        let h = hasse(fixtures::TAYLOR, 3);
        let a = mono(&[2, 1], int(1));
        let h2 = h.apply(2, &a).unwrap();
        let mut want = TensorElement::zero(SpaceTag::s(2));
        want.add_term(vec![0, 0], &Polynomial::var(2, 1));
        want.add_term(vec![0, 1], &mono(&[1, 0], int(2)));
        assert!(h.presentation().is_zero(&h2.sub(&want)));
        assert_eq!(taylor_formula(&a, 2, 2), want);
    }

    #[test]
    fn curve_h2_is_multiplicative_on_x_squared() {
        let h = hasse(fixtures::NONGORENSTEIN, 2);
        let pres = h.presentation();
        let x = Polynomial::var(3, 0);
        let xx = &x * &x;
        let mut rhs = mul_symmetric(&h.apply(1, &x).unwrap(), &h.apply(1, &x).unwrap());
        rhs.add_assign(&h.apply(2, &x).unwrap().mul_poly(&x).scale(&int(2)));
        assert!(pres.is_zero(&h.apply(2, &xx).unwrap().sub(&rhs)));
        // x z = y^2 in the ring
        let xz = &x * &Polynomial::var(3, 2);
        let y = Polynomial::var(3, 1);
        let yy = &y * &y;
        for i in 0..=2 {
            assert!(pres.is_zero(&h.apply(i, &xz).unwrap().sub(&h.apply(i, &yy).unwrap())));
        }
    }

    #[test]
    fn axioms_hold_for_both_fixtures() {
        for src in [fixtures::NONGORENSTEIN, fixtures::TAYLOR_NU3] {
            let h = hasse(src, 4);
            let r = check_hasse_axioms(&h, 12, 3).unwrap();
            assert!(r.is_ok(), "{:?}", r.failure);
            assert_eq!(r.pairs, 12);
        }
        let h = hasse(fixtures::NONGORENSTEIN, 1);
        assert!(check_hasse_axioms(&h, 12, 3).unwrap().is_ok());
    }

    struct Scaled<'a> {
        h: &'a HasseDerivation,
        at: usize,
    }

    impl HasseMap for Scaled<'_> {
        fn presentation(&self) -> &Presentation {
            self.h.presentation()
        }

        fn order(&self) -> usize {
            self.h.order()
        }

        fn apply(&self, i: usize, a: &Polynomial) -> Result<TensorElement> {
            let v = self.h.apply(i, a)?;
            Ok(if i == self.at { v.scale(&int(2)) } else { v })
        }
    }

    #[test]
    fn corrupted_h2_is_caught() {
        let h = hasse(fixtures::TAYLOR, 3);
        let bad = Scaled { h: &h, at: 2 };
        let r = check_hasse_axioms(&bad, 20, 1).unwrap();
        let f = r.failure.expect("doubling h_2 breaks multiplicativity");
        assert_eq!(f.order, 2);
        assert!(!f.a.is_zero() && !f.b.is_zero());
        assert!(!h.presentation().is_zero(&f.residual));
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let h = hasse(fixtures::NONGORENSTEIN, 2);
        let pres = h.presentation();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5).map(|_| random_homogeneous(pres, &mut rng, 15)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert!(draw(9).iter().all(|p| p.is_homogeneous(pres.var_weights()) && !p.is_zero()));
    }

    fn free_pres() -> Arc<Presentation> {
        Scenario::parse(fixtures::TAYLOR).unwrap().presentation().unwrap()
    }

    fn gen_s(g: usize) -> TensorElement {
        TensorElement::generator(g, 2).retag(SpaceTag::s(1))
    }

    #[test]
    fn identity_lambda_gives_identity_phi() {
        let pres = free_pres();
        let phi = identity_automorphism(Arc::clone(&pres), 3);
        let w = mul_symmetric(&gen_s(0), &gen_s(1)).mul_poly(&Polynomial::var(2, 0));
        assert_eq!(phi.apply(0, &w).unwrap(), pres.normal_form(&w));
        for q in 1..=3 {
            assert!(pres.is_zero(&phi.apply(q, &w).unwrap()));
            assert!(pres.is_zero(&phi.apply(q, &TensorElement::scalar(Polynomial::one(2))).unwrap()));
        }
        assert!(phi_from_lambda(phi.lambda().clone()).is_ok());
    }

    #[test]
    fn lambda_zero_must_be_identity() {
        let pres = free_pres();
        let bad = vec![vec![gen_s(1).retag(SpaceTag::r(1)), gen_s(1).retag(SpaceTag::r(1))]];
        let lambda = ComparisonMap::new(pres, bad).unwrap();
        assert!(matches!(phi_from_lambda(lambda), Err(Error::Inconsistent(_))));
    }

    fn e2e2() -> TensorElement {
        mul_symmetric(&gen_s(1), &gen_s(1)).retag(SpaceTag::r(2))
    }

    #[test]
    fn phi_on_generators_and_products() {
        let pres = free_pres();
        let mut lambda = ComparisonMap::identity(Arc::clone(&pres));
        lambda.push(vec![e2e2(), TensorElement::zero(SpaceTag::r(2))]);
        lambda.push(vec![TensorElement::zero(SpaceTag::r(3)); 2]);
        let phi = phi_from_lambda(lambda).unwrap();
        let e1 = gen_s(0);
        assert_eq!(phi.apply(0, &e1).unwrap(), pres.normal_form(&e1));
        assert!(pres.is_zero(&phi.apply(1, &e1).unwrap().sub(&e2e2().retag(SpaceTag::s(2)))));
        assert!(pres.is_zero(&phi.apply(2, &e1).unwrap()));
        // phi(e1 e1) = phi(e1) phi(e1) up to order 2
        let e1e1 = mul_symmetric(&e1, &e1);
        let full = |w: &TensorElement| (0..=2).map(|q| phi.apply(q, w).unwrap()).collect::<Vec<_>>();
        let lhs = full(&e1e1);
        let f = full(&e1);
        for q in 0..=2 {
            let mut rhs = TensorElement::zero(SpaceTag::s(2 + q));
            for j in 0..=q {
                rhs.add_assign(&mul_symmetric(&f[j], &f[q - j]));
            }
            assert!(pres.is_zero(&lhs[q].sub(&rhs)), "degree {q}");
        }
    }

    #[test]
    fn equivalence_detects_tampering() {
        let h = hasse(fixtures::TAYLOR, 4);
        let h2 = hasse(fixtures::TAYLOR_NU2, 4);
        let phi = phi_between(&h, &h2, 4).unwrap();
        assert!(verify_equivalence(&h, &h2, &phi, 4).unwrap());
        assert!(verify_equivalence(&h, &h, &phi_between(&h, &h, 4).unwrap(), 4).unwrap());
        let mut values = phi.lambda().values().to_vec();
        values[2][0] = values[2][0].add(&e2e2().concat(&gen_s(0), SpaceTag::t(3)).retag(SpaceTag::r(3)));
        let bad = phi_from_lambda(ComparisonMap::new(Arc::clone(phi.presentation()), values).unwrap()).unwrap();
        assert!(verify_equivalence(&h, &h2, &bad, 2).unwrap());
        assert!(!verify_equivalence(&h, &h2, &bad, 3).unwrap());
    }

    #[test]
    fn equivalence_of_iterated_connection() {
        let g = connection(fixtures::TAYLOR);
        let nu = connection(fixtures::TAYLOR_NU1);
        let t = extend_flat(&g, 3).unwrap();
        let s = iterate_connection(&nu, 3);
        let lambda = compare_extended(&t, &s).unwrap();
        let phi = phi_from_lambda(lambda).unwrap();
        let h = hasse_from_extended(Arc::new(t), 4).unwrap();
        let h2 = hasse_from_extended(Arc::new(s), 4).unwrap();
        assert!(verify_equivalence(&h, &h2, &phi, 4).unwrap());
    }

    #[test]
    fn cocycle_and_reversal() {
        let hs: Vec<_> =
            [fixtures::TAYLOR_NU1, fixtures::TAYLOR_NU2, fixtures::TAYLOR_NU3].iter().map(|s| hasse(s, 4)).collect();
        assert!(cocycle_check(&hs[0], &hs[1], &hs[2], 4).unwrap());
        assert!(cocycle_check(&hs[0], &hs[0], &hs[0], 4).unwrap());
        let p01 = phi_between(&hs[0], &hs[1], 4).unwrap();
        let p10 = phi_between(&hs[1], &hs[0], 4).unwrap();
        let id = identity_automorphism(Arc::clone(p01.presentation()), 3);
        assert!(composition_equals(&p01, &p10, &id).unwrap());
        assert!(!composition_equals(&p01, &p01, &id).unwrap());
    }

    #[test]
    fn cocycle_rejects_mismatched_presentations() {
        let a = hasse(fixtures::TAYLOR, 2);
        let b = hasse(fixtures::NONGORENSTEIN, 2);
        assert_eq!(cocycle_check(&a, &a, &b, 2), Err(Error::PresentationMismatch));
    }

    #[test]
    fn jets() {
        let h = hasse(fixtures::NONGORENSTEIN, 3);
        let pres = h.presentation();
        let one = tau(&h, &Polynomial::one(3), 3).unwrap();
        assert!(one.equal(&JetElement::one(3, 3), pres));
        let x = Polynomial::var(3, 0);
        let y = Polynomial::var(3, 1);
        let lhs = jet_product(&tau(&h, &x, 3).unwrap(), &tau(&h, &y, 3).unwrap());
        assert!(lhs.equal(&tau(&h, &(&x * &y), 3).unwrap(), pres));
        assert!(tau(&h, &x, 3).unwrap().truncate(2).equal(&tau(&h, &x, 2).unwrap(), pres));
        let mut top = vec![TensorElement::zero(SpaceTag::s(0)); 1];
        top.extend((1..3).map(|i| TensorElement::zero(SpaceTag::s(i))));
        top.push(h.apply(3, &x).unwrap());
        let top = JetElement::new(top).unwrap();
        assert!(top.truncate(2).is_zero(pres));
        assert!(jet_product(&top, &top).is_zero(pres));
        let half = JetElement::new(vec![TensorElement::scalar(Polynomial::constant(3, ratio(1, 2)))]).unwrap();
        assert_eq!(half.order(), 0);
        assert!(JetElement::new(vec![TensorElement::zero(SpaceTag::s(1))]).is_err());
    }
}
