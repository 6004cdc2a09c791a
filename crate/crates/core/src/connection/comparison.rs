use std::collections::BTreeMap;
use std::sync::Arc;

use super::extended::{check_order, identity_values, ExtendedMap};
use super::Derivation;
use crate::algebra::rational::{int, recip};
use crate::algebra::{Polynomial, Presentation};
use crate::error::{Error, Result};
use crate::tensor::{in_k, SpaceTag, TensorElement};

/// `lambda = (lambda_0, ..., lambda_N)`, `O_X`-linear with `lambda_i: F -> R^(i+1)(F)`.
#[derive(Clone, Debug)]
pub struct ComparisonMap {
    pres: Arc<Presentation>,
    values: Vec<Vec<TensorElement>>,
}

impl ComparisonMap {
    /// Order 0: just `lambda_0 = id`.
    pub fn identity(pres: Arc<Presentation>) -> Self {
        let ids = identity_values(&pres);
        ComparisonMap { pres, values: vec![ids] }
    }

    /// `values[i][g] = lambda_i(g)`.
    pub fn new(pres: Arc<Presentation>, values: Vec<Vec<TensorElement>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("a comparison map needs lambda_0".into()));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != pres.rank() || row.iter().any(|v| v.length() != i + 1) {
                return Err(Error::LengthMismatch(format!("lambda_{i} has the wrong shape")));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, row)| row.into_iter().map(|v| v.retag(SpaceTag::r(i + 1))).collect())
            .collect();
        Ok(ComparisonMap { pres, values })
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, i: usize, g: usize) -> &TensorElement {
        &self.values[i][g]
    }

    pub fn values(&self) -> &[Vec<TensorElement>] {
        &self.values
    }

    pub fn push(&mut self, row: Vec<TensorElement>) {
        let i = self.values.len();
        self.values.push(row.into_iter().map(|v| v.retag(SpaceTag::r(i + 1))).collect());
    }

    /// Whether `lambda_0` is the identity.
    pub fn starts_with_identity(&self) -> bool {
        self.values[0]
            .iter()
            .zip(identity_values(&self.pres))
            .all(|(a, b)| self.pres.equal(a, &b))
    }

    /// Whether every `lambda_i`, `i >= 1`, vanishes.
    pub fn is_trivial(&self) -> bool {
        self.values[1..].iter().flatten().all(|v| self.pres.is_zero(v))
    }

    /// `lambda_i(sum_j a_j g_j) = sum_j a_j lambda_i(g_j)`.
    pub fn apply(&self, i: usize, m: &TensorElement) -> Result<TensorElement> {
        check_order(i, self.order())?;
        let mut out = TensorElement::zero(SpaceTag::r(i + 1));
        for (word, a) in m.terms() {
            out.add_assign(&self.values[i][word[0]].mul_poly(a));
        }
        Ok(out)
    }
}

fn generating_map(lambda: &ComparisonMap, q: usize, omega: &TensorElement, weighted: bool) -> Result<TensorElement> {
    check_order(q, lambda.order())?;
    let p = omega.length();
    if p == 0 {
        return Err(Error::SpaceMismatch { expected: SpaceTag::r(1), found: omega.tag() });
    }
    let tag = if weighted { SpaceTag::r(p + q) } else { SpaceTag::s(p + q) };
    let mut out = TensorElement::zero(tag);
    for (word, c) in omega.terms() {
        // used order -> partial product over the slots seen so far
        let mut acc: BTreeMap<usize, TensorElement> = BTreeMap::new();
        acc.insert(0, TensorElement::scalar(c.clone()));
        for (k, &g) in word.iter().enumerate() {
            let last = k + 1 == p;
            let mut next: BTreeMap<usize, TensorElement> = BTreeMap::new();
            for (&used, t) in &acc {
                let range = if last { q - used..=q - used } else { 0..=q - used };
                for i in range {
                    let f = &lambda.values[i][g];
                    if f.is_trivially_zero() {
                        continue;
                    }
                    let len = t.length() + i + 1;
                    let mut prod = t.concat(f, SpaceTag::t(len));
                    if last && weighted {
                        prod = prod.scale(&int(i as i64 + 1));
                    }
                    next.entry(used + i)
                        .or_insert_with(|| TensorElement::zero(SpaceTag::t(len)))
                        .add_assign(&prod);
                }
            }
            acc = next;
        }
        if let Some(t) = acc.remove(&q) {
            out.add_assign(&t.retag(tag));
        }
    }
    Ok(out)
}

/// `s_q(lambda) = sum_{i_1 + ... + i_p = q} (i_p + 1) lambda_(i_1) ... lambda_(i_p)` on `R^p`.
pub fn s_map(lambda: &ComparisonMap, q: usize, omega: &TensorElement) -> Result<TensorElement> {
    generating_map(lambda, q, omega, true)
}

/// The same sum without the factor `(i_p + 1)`, on `S^p`.
pub fn s_tilde(lambda: &ComparisonMap, q: usize, omega: &TensorElement) -> Result<TensorElement> {
    generating_map(lambda, q, omega, false)
}

/// `(S_i - R_i - T_i)(m) / (i+1)` with `R_i = sum_{l=1}^{i-1} s_(i-l)(lambda) T_l`.
fn lambda_candidate(
    t: &dyn ExtendedMap,
    s: &dyn ExtendedMap,
    lambda: &ComparisonMap,
    i: usize,
    m: &TensorElement,
) -> Result<TensorElement> {
    let mut x = s.apply(i, m)?.sub(&t.apply(i, m)?);
    for l in 1..i {
        x = x.sub(&s_map(lambda, i - l, &t.apply(l, m)?)?);
    }
    Ok(x.scale(&recip(i as i64 + 1)).retag(SpaceTag::r(i + 1)))
}

/// Extends `lambda` up to `order` by the recursion, checking flatness of `T` below
/// the new order and linearity of each new `lambda_i`.
pub(crate) fn extend_lambda(
    t: &dyn ExtendedMap,
    s: &dyn ExtendedMap,
    mut lambda: ComparisonMap,
    order: usize,
) -> Result<ComparisonMap> {
    let pres = t.presentation();
    let nvars = pres.nvars();
    for i in lambda.order() + 1..=order {
        for v in 0..nvars {
            let w = t.apply(i - 1, t.derivation().value(v))?;
            if !in_k(pres, &w)? {
                return Err(Error::NotFlat {
                    variable: pres.ring().variables[v].name.clone(),
                    order: i - 1,
                });
            }
        }
        let mut row = Vec::with_capacity(pres.rank());
        for g in 0..pres.rank() {
            let e = TensorElement::generator(g, nvars);
            row.push(pres.normal_form(&lambda_candidate(t, s, &lambda, i, &e)?));
        }
        lambda.push(row);
        for (ri, rel) in pres.module().relations.iter().enumerate() {
            let r = lambda.apply(i, &TensorElement::from_module_coeffs(rel))?;
            if !pres.is_zero(&r) {
                return Err(Error::NotLinear(format!("lambda_{i} does not vanish on relation {}", ri + 1)));
            }
        }
        for g in 0..pres.rank() {
            for v in 0..nvars {
                let x = Polynomial::var(nvars, v);
                let m = TensorElement::generator(g, nvars).mul_poly(&x);
                let direct = lambda_candidate(t, s, &lambda, i, &m)?;
                if !pres.equal(&direct, &lambda.apply(i, &m)?) {
                    return Err(Error::NotLinear(format!(
                        "lambda_{i} is not linear over the ring on {} times {}",
                        pres.ring().variables[v].name,
                        pres.module().generators[g].name
                    )));
                }
            }
        }
    }
    Ok(lambda)
}

/// The comparison map `lambda` with `S_i = sum_{l=0}^i s_(i-l)(lambda) T_l`.
///
/// `T` must be flat below its order. Fails when some `lambda_i` is not linear
/// over the ring, which signals that `S` or `T` is not an extended connection.
pub fn compare_extended(t: &dyn ExtendedMap, s: &dyn ExtendedMap) -> Result<ComparisonMap> {
    if t.presentation() != s.presentation() {
        return Err(Error::PresentationMismatch);
    }
    if t.order() != s.order() {
        return Err(Error::Inconsistent(format!(
            "orders differ: {} and {}",
            t.order(),
            s.order()
        )));
    }
    let pres = Arc::clone(t.derivation().presentation());
    extend_lambda(t, s, ComparisonMap::identity(pres), t.order())
}

/// `S_i = sum_{l=0}^i s_(i-l)(lambda) T_l` as an extended map.
pub struct EquiviterMap<'a> {
    pub t: &'a dyn ExtendedMap,
    pub lambda: &'a ComparisonMap,
}

impl ExtendedMap for EquiviterMap<'_> {
    fn derivation(&self) -> &Derivation {
        self.t.derivation()
    }

    fn order(&self) -> usize {
        self.t.order().min(self.lambda.order())
    }

    fn apply(&self, i: usize, m: &TensorElement) -> Result<TensorElement> {
        check_order(i, self.order())?;
        let mut out = TensorElement::zero(SpaceTag::r(i + 1));
        for l in 0..=i {
            out.add_assign(&s_map(self.lambda, i - l, &self.t.apply(l, m)?)?);
        }
        Ok(self.presentation().normal_form(&out))
    }
}
