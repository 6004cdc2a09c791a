use std::sync::Arc;

use super::{HasseDerivation, HasseMap};
use crate::algebra::Presentation;
use crate::connection::{compare_extended, s_tilde, ComparisonMap, Truncated};
use crate::error::{Error, Result};
use crate::tensor::{SpaceTag, TensorElement};

/// The graded algebra map `phi` on `S(F)` with `phi_q: S^p -> S^(p+q)` given by
/// `s~_q(lambda)` for `p >= 1` and the identity in degree `(0, 0)`.
#[derive(Clone, Debug)]
pub struct AlgebraAutomorphism {
    lambda: ComparisonMap,
}

/// Wraps `lambda`, which must start with the identity.
pub fn phi_from_lambda(lambda: ComparisonMap) -> Result<AlgebraAutomorphism> {
    if !lambda.starts_with_identity() {
        return Err(Error::Inconsistent("lambda_0 is not the identity".into()));
    }
    Ok(AlgebraAutomorphism { lambda })
}

impl AlgebraAutomorphism {
    pub fn lambda(&self) -> &ComparisonMap {
        &self.lambda
    }

    pub fn order(&self) -> usize {
        self.lambda.order()
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        self.lambda.presentation()
    }

    /// `phi_q(omega)` for `omega` in `S^p`.
    pub fn apply(&self, q: usize, omega: &TensorElement) -> Result<TensorElement> {
        let p = omega.length();
        if p == 0 {
            return Ok(if q == 0 { omega.clone() } else { TensorElement::zero(SpaceTag::s(q)) });
        }
        let out = s_tilde(&self.lambda, q, &omega.clone().retag(SpaceTag::s(p)))?;
        Ok(self.presentation().normal_form(&out))
    }

    /// `(other o self)_q` on a generator, as an element of `S^(q+1)`.
    pub fn compose_on_generator(&self, other: &AlgebraAutomorphism, q: usize, g: usize) -> Result<TensorElement> {
        let pres = self.presentation();
        let e = TensorElement::generator(g, pres.nvars()).retag(SpaceTag::s(1));
        let mut out = TensorElement::zero(SpaceTag::s(q + 1));
        for s in 0..=q {
            let inner = self.apply(s, &e)?;
            out.add_assign(&other.apply(q - s, &inner)?);
        }
        Ok(pres.normal_form(&out))
    }
}

/// `h2_i(x) = sum_j phi_(i-j)(h_j(x))` on every ring variable for `i <= order`.
///
/// Both sides are multiplicative, so the variables suffice.
pub fn verify_equivalence(
    h: &dyn HasseMap,
    h2: &dyn HasseMap,
    phi: &AlgebraAutomorphism,
    order: usize,
) -> Result<bool> {
    let pres = h.presentation();
    if pres != h2.presentation() || pres != phi.presentation().as_ref() {
        return Err(Error::PresentationMismatch);
    }
    let top = h.order().min(h2.order()).min(phi.order() + 1);
    if order > top {
        return Err(Error::OrderExceeded { requested: order, order: top });
    }
    let nvars = pres.nvars();
    for v in 0..nvars {
        let x = crate::algebra::Polynomial::var(nvars, v);
        for i in 0..=order {
            let mut rhs = TensorElement::zero(SpaceTag::s(i));
            for j in 0..=i {
                rhs.add_assign(&phi.apply(i - j, &h.apply(j, &x)?)?);
            }
            let diff = h2.apply(i, &x)?.retag(SpaceTag::s(i)).sub(&rhs);
            if !pres.is_zero(&diff) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The automorphism carrying `h` to `h2` through order `order`, built from `lambda`
/// of the underlying extended maps truncated at `order - 1`.
pub fn phi_between(h: &HasseDerivation, h2: &HasseDerivation, order: usize) -> Result<AlgebraAutomorphism> {
    let top = h.order().min(h2.order());
    if order > top {
        return Err(Error::OrderExceeded { requested: order, order: top });
    }
    let n = order.saturating_sub(1);
    let t = Truncated { inner: h.extended().as_ref(), order: n };
    let s = Truncated { inner: h2.extended().as_ref(), order: n };
    phi_from_lambda(compare_extended(&t, &s)?)
}

/// `phi_23 o phi_12 = phi_13` on the module generators, in every degree that
/// affects Hasse derivations of order `order`.
pub fn cocycle_check(h1: &HasseDerivation, h2: &HasseDerivation, h3: &HasseDerivation, order: usize) -> Result<bool> {
    if h1.presentation() != h2.presentation() || h1.presentation() != h3.presentation() {
        return Err(Error::PresentationMismatch);
    }
    let p12 = phi_between(h1, h2, order)?;
    let p23 = phi_between(h2, h3, order)?;
    let p13 = phi_between(h1, h3, order)?;
    composition_equals(&p12, &p23, &p13)
}

/// `second o first = expected` on the module generators through the common order.
pub fn composition_equals(
    first: &AlgebraAutomorphism,
    second: &AlgebraAutomorphism,
    expected: &AlgebraAutomorphism,
) -> Result<bool> {
    let pres = first.presentation();
    let order = first.order().min(second.order()).min(expected.order());
    for g in 0..pres.rank() {
        let e = TensorElement::generator(g, pres.nvars()).retag(SpaceTag::s(1));
        for q in 0..=order {
            let lhs = first.compose_on_generator(second, q, g)?;
            let rhs = expected.apply(q, &e)?;
            if !pres.is_zero(&lhs.sub(&rhs)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The identity automorphism of order `order`.
pub fn identity_automorphism(pres: Arc<Presentation>, order: usize) -> AlgebraAutomorphism {
    let mut lambda = ComparisonMap::identity(Arc::clone(&pres));
    for i in 1..=order {
        lambda.push(vec![TensorElement::zero(SpaceTag::r(i + 1)); pres.rank()]);
    }
    AlgebraAutomorphism { lambda }
}
