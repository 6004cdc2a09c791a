use std::collections::HashMap;
use std::sync::Mutex;

use super::comparison::{extend_lambda, s_map, ComparisonMap};
use super::{nabla, Connection, Derivation, Report};
use crate::algebra::rational::{int, recip};
use crate::algebra::{Monomial, Polynomial, Presentation};
use crate::error::{Error, Result};
use crate::tensor::{k_minus_sigma, mul_graded, SpaceTag, TensorElement};

/// A sequence `T_0, ..., T_N` with `T_i: F -> R^(i+1)(F)`.
pub trait ExtendedMap: Send + Sync {
    fn derivation(&self) -> &Derivation;

    fn order(&self) -> usize;

    /// `T_i(m)` for a module element `m`.
    fn apply(&self, i: usize, m: &TensorElement) -> Result<TensorElement>;

    fn presentation(&self) -> &Presentation {
        self.derivation().presentation()
    }
}

pub(crate) fn check_order(i: usize, order: usize) -> Result<()> {
    if i > order {
        Err(Error::OrderExceeded { requested: i, order })
    } else {
        Ok(())
    }
}

type MemoKey = (usize, Monomial, usize);

/// An extended connection stored by its values on the generators.
///
/// Values on other module elements follow from
/// `T_i(a m) = a T_i(m) + sum_{j=1}^i (1/j) T_(j-1)(D(a)) T_(i-j)(m)`,
/// applied one variable at a time.
pub struct ExtendedConnection {
    derivation: Derivation,
    values: Vec<Vec<TensorElement>>,
    memo: Mutex<HashMap<MemoKey, TensorElement>>,
}

impl std::fmt::Debug for ExtendedConnection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExtendedConnection").field("values", &self.values).finish()
    }
}

impl Clone for ExtendedConnection {
    fn clone(&self) -> Self {
        ExtendedConnection {
            derivation: self.derivation.clone(),
            values: self.values.clone(),
            memo: Mutex::new(self.memo.lock().unwrap().clone()),
        }
    }
}

impl ExtendedConnection {
    /// `values[i][g] = T_i(g)`; `values[0]` should be the generators themselves.
    pub fn new(derivation: Derivation, values: Vec<Vec<TensorElement>>) -> Result<Self> {
        let rank = derivation.presentation().rank();
        if values.is_empty() {
            return Err(Error::Input("an extended connection needs T_0".into()));
        }
        let mut out = Vec::with_capacity(values.len());
        for (i, row) in values.into_iter().enumerate() {
            if row.len() != rank {
                return Err(Error::Input(format!("T_{i} needs {rank} values, got {}", row.len())));
            }
            if let Some(v) = row.iter().find(|v| v.length() != i + 1) {
                return Err(Error::LengthMismatch(format!(
                    "T_{i} values must have length {}, found {}",
                    i + 1,
                    v.length()
                )));
            }
            out.push(row.into_iter().map(|v| v.retag(SpaceTag::r(i + 1))).collect());
        }
        Ok(ExtendedConnection { derivation, values: out, memo: Mutex::new(HashMap::new()) })
    }

    /// `(id, gamma)`.
    pub fn from_connection(gamma: &Connection) -> Self {
        let d = gamma.derivation().clone();
        let ids = identity_values(d.presentation());
        let t1 = gamma.values().to_vec();
        Self::new(d, vec![ids, t1]).expect("shapes match")
    }

    pub fn value(&self, i: usize, g: usize) -> &TensorElement {
        &self.values[i][g]
    }

    pub fn values(&self) -> &[Vec<TensorElement>] {
        &self.values
    }

    /// The first `order + 1` maps.
    pub fn truncate(&self, order: usize) -> Self {
        let memo = self
            .memo
            .lock()
            .unwrap()
            .iter()
            .filter(|(k, _)| k.0 <= order)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        ExtendedConnection {
            derivation: self.derivation.clone(),
            values: self.values[..=order.min(self.values.len() - 1)].to_vec(),
            memo: Mutex::new(memo),
        }
    }

    /// Appends `T_(N+1)` given on generators.
    pub fn push(&mut self, row: Vec<TensorElement>) {
        let i = self.values.len();
        self.values.push(row.into_iter().map(|v| v.retag(SpaceTag::r(i + 1))).collect());
    }

    fn apply_monomial(&self, i: usize, m: &Monomial, g: usize) -> Result<TensorElement> {
        let pres = self.derivation.presentation();
        let coeff = Polynomial::term(m.clone(), int(1));
        if i == 0 {
            return Ok(self.values[0][g].mul_poly(&coeff));
        }
        let Some(v) = m.first_var() else {
            return Ok(self.values[i][g].clone());
        };
        let key = (i, m.clone(), g);
        if let Some(t) = self.memo.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let rest = m.div_var(v).unwrap();
        let xv = Polynomial::var(pres.nvars(), v);
        let dv = self.derivation.value(v).clone();
        let mut out = self.apply_monomial(i, &rest, g)?.mul_poly(&xv);
        for j in 1..=i {
            let a = self.apply(j - 1, &dv)?;
            let b = self.apply_monomial(i - j, &rest, g)?;
            out.add_assign(&mul_graded(&a, &b)?.scale(&recip(j as i64)));
        }
        let out = pres.normal_form(&out.retag(SpaceTag::r(i + 1)));
        self.memo.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }
}

impl ExtendedMap for ExtendedConnection {
    fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    fn order(&self) -> usize {
        self.values.len() - 1
    }

    fn apply(&self, i: usize, m: &TensorElement) -> Result<TensorElement> {
        check_order(i, self.order())?;
        let mut out = TensorElement::zero(SpaceTag::r(i + 1));
        for (word, a) in m.terms() {
            for (mono, c) in a.terms() {
                out.add_assign(&self.apply_monomial(i, mono, word[0])?.scale(c));
            }
        }
        Ok(out)
    }
}

pub(crate) fn identity_values(pres: &Presentation) -> Vec<TensorElement> {
    (0..pres.rank())
        .map(|g| TensorElement::generator(g, pres.nvars()).retag(SpaceTag::r(1)))
        .collect()
}

/// `T_i = (1/i!) nabla^i`, evaluated on any module element by applying `nabla` directly.
#[derive(Clone, Debug)]
pub struct NablaIteration {
    gamma: Connection,
    order: usize,
}

impl NablaIteration {
    pub fn new(gamma: Connection, order: usize) -> Self {
        NablaIteration { gamma, order }
    }
}

impl ExtendedMap for NablaIteration {
    fn derivation(&self) -> &Derivation {
        self.gamma.derivation()
    }

    fn order(&self) -> usize {
        self.order
    }

    fn apply(&self, i: usize, m: &TensorElement) -> Result<TensorElement> {
        check_order(i, self.order)?;
        let pres = self.presentation();
        let mut w = m.clone().retag(SpaceTag::r(1));
        for k in 1..=i {
            w = pres.normal_form(&nabla(&self.gamma, &w)?.scale(&recip(k as i64)));
        }
        Ok(w)
    }
}

/// `T_n = (1/n!) nabla^n` on generators, as an extended connection.
pub fn iterate_connection(gamma: &Connection, order: usize) -> ExtendedConnection {
    let d = gamma.derivation().clone();
    let pres = d.presentation().clone();
    let mut rows = vec![identity_values(&pres)];
    for i in 1..=order {
        let prev = &rows[i - 1];
        let row = prev
            .iter()
            .map(|w| {
                let n = nabla(gamma, w).expect("length at least 1");
                pres.normal_form(&n.scale(&recip(i as i64)))
            })
            .collect();
        rows.push(row);
    }
    ExtendedConnection::new(d, rows).expect("shapes match")
}

/// `a T_i(m) + sum_{j=1}^i (1/j) T_(j-1)(D(a)) T_(i-j)(m)`.
pub(crate) fn formula_rhs(
    t: &dyn ExtendedMap,
    i: usize,
    a: &Polynomial,
    m: &TensorElement,
) -> Result<TensorElement> {
    let da = t.derivation().apply(a);
    let mut out = t.apply(i, m)?.mul_poly(a);
    for j in 1..=i {
        let p = mul_graded(&t.apply(j - 1, &da)?, &t.apply(i - j, m)?)?;
        out.add_assign(&p.scale(&recip(j as i64)));
    }
    Ok(out.retag(SpaceTag::r(i + 1)))
}

/// Checks `T_0 = id`, vanishing on relations, and the product formula on `x g` and `x y g`.
pub fn validate_extended(t: &dyn ExtendedMap) -> Report {
    let pres = t.presentation();
    let nvars = pres.nvars();
    let mut report = Report::default();
    let names = |g: usize| pres.module().generators[g].name.clone();
    for g in 0..pres.rank() {
        let e = TensorElement::generator(g, nvars);
        match t.apply(0, &e) {
            Ok(v) if pres.equal(&v, &e.clone().retag(SpaceTag::r(1))) => {}
            Ok(v) => report.fail(format!("T_0({}) is not the identity", names(g)), Some(v)),
            Err(e) => report.fail(e.to_string(), None),
        }
    }
    for i in 1..=t.order() {
        for (ri, rel) in pres.module().relations.iter().enumerate() {
            let m = TensorElement::from_module_coeffs(rel);
            match t.apply(i, &m) {
                Ok(v) if pres.is_zero(&v) => {}
                Ok(v) => report.fail(format!("T_{i} does not vanish on relation {}", ri + 1), Some(v)),
                Err(e) => report.fail(e.to_string(), None),
            }
        }
        let mut factors: Vec<Polynomial> = (0..nvars).map(|v| Polynomial::var(nvars, v)).collect();
        for u in 0..nvars {
            for v in u..nvars {
                factors.push(&Polynomial::var(nvars, u) * &Polynomial::var(nvars, v));
            }
        }
        for g in 0..pres.rank() {
            let e = TensorElement::generator(g, nvars);
            for a in &factors {
                let lhs = t.apply(i, &e.mul_poly(a));
                let rhs = formula_rhs(t, i, a, &e);
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) => {
                        let diff = l.sub(&r);
                        if !pres.is_zero(&diff) {
                            report.fail(
                                format!("product formula fails for T_{i} on a monomial times {}", names(g)),
                                Some(pres.normal_form(&diff)),
                            );
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => report.fail(e.to_string(), None),
                }
            }
        }
    }
    report
}

/// First `(variable, i)` with `T_i D(x_v)` outside `K^(i+1)`.
pub fn flat_extended_failure(t: &dyn ExtendedMap) -> Result<Option<(usize, usize)>> {
    let pres = t.presentation();
    for i in 0..=t.order() {
        for v in 0..pres.nvars() {
            let w = t.apply(i, t.derivation().value(v))?;
            if !crate::tensor::in_k(pres, &w)? {
                return Ok(Some((v, i)));
            }
        }
    }
    Ok(None)
}

/// Flatness on the ring variables, for every order.
pub fn is_flat_extended(t: &dyn ExtendedMap) -> Result<bool> {
    Ok(flat_extended_failure(t)?.is_none())
}

/// `T'_j(m_1 m_2) = sum_{i=0}^j T_i(m_1) T_(j-i)(m_2)`, with coefficients carried by `m_1`.
pub fn tprime(t: &dyn ExtendedMap, j: usize, omega: &TensorElement) -> Result<TensorElement> {
    check_order(j, t.order())?;
    if omega.length() != 2 {
        return Err(Error::SpaceMismatch { expected: SpaceTag::t(2), found: omega.tag() });
    }
    let nvars = t.presentation().nvars();
    let tag = SpaceTag::r(j + 2);
    let mut out = TensorElement::zero(tag);
    for (word, c) in omega.terms() {
        let m1 = TensorElement::from_word(SpaceTag::t(1), vec![word[0]], c.clone());
        let m2 = TensorElement::generator(word[1], nvars);
        for i in 0..=j {
            out.add_assign(&mul_graded(&t.apply(i, &m1)?, &t.apply(j - i, &m2)?)?);
        }
    }
    Ok(out)
}

/// `(i - sigma)((i+1) T_i(m) - T'_(i-1)(1 - sigma) T_1(m))`.
pub(crate) fn ti_residual(t: &dyn ExtendedMap, i: usize, m: &TensorElement) -> Result<TensorElement> {
    let t1 = t.apply(1, m)?;
    let inner = tprime(t, i - 1, &k_minus_sigma(1, &t1)?)?;
    let x = t.apply(i, m)?.scale(&int(i as i64 + 1)).sub(&inner);
    k_minus_sigma(i as i64, &x)
}

/// Zero-tests of the defining identity of the flat extension, on generators and on `x g`.
pub fn check_ti(t: &dyn ExtendedMap, i: usize) -> Report {
    let pres = t.presentation();
    let nvars = pres.nvars();
    let mut report = Report::default();
    for g in 0..pres.rank() {
        let e = TensorElement::generator(g, nvars);
        let mut samples = vec![e.clone()];
        samples.extend((0..nvars).map(|v| e.mul_poly(&Polynomial::var(nvars, v))));
        for m in samples {
            match ti_residual(t, i, &m) {
                Ok(r) if pres.is_zero(&r) => {}
                Ok(r) => report.fail(format!("identity for T_{i} fails"), Some(pres.normal_form(&r))),
                Err(e) => report.fail(e.to_string(), None),
            }
        }
    }
    report
}

/// Flat extended connection `(id, gamma, T_2, ..., T_N)` built order by order.
///
/// At step `n`, `U` is obtained from the plain iteration `S` of `gamma` by removing
/// the contributions of the comparison map between the partial flat extension and
/// `S`; `Tbar = T'_(n-1)(1 - sigma) gamma / (n+1)`; and `T_n = U - (n - sigma)(U - Tbar)/(n+1)`.
/// Vanishing on relations and the product formula on `x g` are re-checked at run time.
pub fn extend_flat(gamma: &Connection, order: usize) -> Result<ExtendedConnection> {
    let d = gamma.derivation();
    let pres = d.presentation().clone();
    if let Some(v) = gamma.flatness_failure() {
        return Err(Error::NotFlat { variable: pres.ring().variables[v].name.clone(), order: 1 });
    }
    let mut t = ExtendedConnection::from_connection(gamma);
    if order == 0 {
        return Ok(t.truncate(0));
    }
    let s = iterate_connection(gamma, order);
    let mut lambda = ComparisonMap::identity(pres.clone());
    let nvars = pres.nvars();
    for n in 2..=order {
        lambda = extend_lambda(&t, &s, lambda, n - 1)?;
        let direct = |m: &TensorElement| -> Result<TensorElement> {
            let mut u = s.apply(n, m)?;
            for l in 1..n {
                u = u.sub(&s_map(&lambda, n - l, &t.apply(l, m)?)?);
            }
            let g1 = k_minus_sigma(1, &t.apply(1, m)?)?;
            let tbar = tprime(&t, n - 1, &g1)?.scale(&recip(n as i64 + 1));
            let diff = u.sub(&tbar);
            let corr = k_minus_sigma(n as i64, &diff)?.scale(&recip(n as i64 + 1));
            Ok(u.sub(&corr).retag(SpaceTag::r(n + 1)))
        };
        let mut row = Vec::with_capacity(pres.rank());
        for g in 0..pres.rank() {
            row.push(pres.normal_form(&direct(&TensorElement::generator(g, nvars))?));
        }
        let mut next = t.clone();
        next.push(row);
        for (ri, rel) in pres.module().relations.iter().enumerate() {
            let v = next.apply(n, &TensorElement::from_module_coeffs(rel))?;
            if !pres.is_zero(&v) {
                return Err(Error::Inconsistent(format!(
                    "T_{n} of the flat extension does not vanish on relation {}",
                    ri + 1
                )));
            }
        }
        for g in 0..pres.rank() {
            for v in 0..nvars {
                let m = TensorElement::generator(g, nvars).mul_poly(&Polynomial::var(nvars, v));
                if !pres.equal(&next.apply(n, &m)?, &direct(&m)?) {
                    return Err(Error::Inconsistent(format!(
                        "T_{n} of the flat extension fails the product formula"
                    )));
                }
            }
        }
        t = next;
    }
    Ok(t)
}

/// The first `order + 1` maps of another extended map.
pub struct Truncated<'a> {
    pub inner: &'a dyn ExtendedMap,
    pub order: usize,
}

impl ExtendedMap for Truncated<'_> {
    fn derivation(&self) -> &Derivation {
        self.inner.derivation()
    }

    fn order(&self) -> usize {
        self.order.min(self.inner.order())
    }

    fn apply(&self, i: usize, m: &TensorElement) -> Result<TensorElement> {
        check_order(i, self.order())?;
        self.inner.apply(i, m)
    }
}
