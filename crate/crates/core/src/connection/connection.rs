use super::{Derivation, Report};
use crate::algebra::quotient::{solve_affine, AffineConstraint, AffineSolution, Obstruction, UnknownSlot};
use crate::algebra::Polynomial;
use crate::error::{Error, Result};
use crate::tensor::{k_minus_sigma, SpaceTag, TensorElement};

/// A `D`-connection `gamma: F -> T^2(F)`, given by its values on the generators.
///
/// `degree` is the common weight shift of the values when they are homogeneous.
#[derive(Clone, Debug)]
pub struct Connection {
    derivation: Derivation,
    degree: Option<i64>,
    values: Vec<TensorElement>,
}

impl Connection {
    pub fn new(derivation: Derivation, degree: Option<i64>, values: Vec<TensorElement>) -> Result<Self> {
        let rank = derivation.presentation().rank();
        if values.len() != rank {
            return Err(Error::Input(format!("connection needs {rank} values, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| v.length() != 2) {
            return Err(Error::LengthMismatch(format!(
                "connection values must have length 2, found length {}",
                v.length()
            )));
        }
        let values = values.into_iter().map(|v| v.retag(SpaceTag::t(2))).collect();
        Ok(Connection { derivation, degree, values })
    }

    /// The connection vanishing on every generator.
    pub fn zero(derivation: Derivation) -> Self {
        let rank = derivation.presentation().rank();
        let degree = Some(derivation.degree());
        Connection { derivation, degree, values: vec![TensorElement::zero(SpaceTag::t(2)); rank] }
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn degree(&self) -> Option<i64> {
        self.degree
    }

    pub fn value(&self, g: usize) -> &TensorElement {
        &self.values[g]
    }

    pub fn values(&self) -> &[TensorElement] {
        &self.values
    }

    /// `gamma + nu` for an `O_X`-linear `nu` given on generators.
    pub fn add_linear(&self, nu: &[TensorElement]) -> Connection {
        let values: Vec<TensorElement> = self
            .values
            .iter()
            .zip(nu)
            .map(|(a, b)| a.add(&b.clone().retag(SpaceTag::t(2))))
            .collect();
        let pres = self.derivation.presentation();
        let degree = self.degree.filter(|d| {
            values
                .iter()
                .enumerate()
                .all(|(g, v)| v.weights(pres).iter().all(|&w| w == pres.gen_weights()[g] + d))
        });
        Connection { derivation: self.derivation.clone(), degree, values }
    }

    /// `gamma(sum_j a_j g_j) = sum_j D(a_j) g_j + a_j gamma(g_j)`.
    pub fn apply(&self, m: &TensorElement) -> TensorElement {
        let nvars = self.derivation.presentation().nvars();
        let mut out = TensorElement::zero(SpaceTag::t(2));
        for (word, a) in m.terms() {
            let g = word[0];
            let da = self.derivation.apply(a);
            out.add_assign(&da.concat(&TensorElement::generator(g, nvars), SpaceTag::t(2)));
            out.add_assign(&self.values[g].mul_poly(a));
        }
        out
    }

    /// Homogeneity of the values and the vanishing of `gamma` on every module relation.
    pub fn validate(&self) -> Report {
        let pres = self.derivation.presentation();
        let mut report = Report::default();
        if let Some(d) = self.degree {
            for (g, v) in self.values.iter().enumerate() {
                let expected = pres.gen_weights()[g] + d;
                if v.weights(pres).iter().any(|&w| w != expected) {
                    report.fail(
                        format!(
                            "G({}) is not homogeneous of weight {expected}",
                            pres.module().generators[g].name
                        ),
                        Some(v.clone()),
                    );
                }
            }
        }
        for (i, rel) in pres.module().relations.iter().enumerate() {
            let m = TensorElement::from_module_coeffs(rel);
            let r = pres.normal_form(&self.apply(&m));
            if !r.is_trivially_zero() {
                report.fail(format!("relation {} is not respected", i + 1), Some(r));
            }
        }
        report
    }

    /// First ring variable `x_v` with `gamma(D(x_v))` outside `K^2`.
    pub fn flatness_failure(&self) -> Option<usize> {
        let pres = self.derivation.presentation();
        (0..pres.nvars()).find(|&v| {
            let w = self.apply(self.derivation.value(v));
            let r = k_minus_sigma(1, &w).expect("length 2");
            !pres.is_zero(&r)
        })
    }

    /// Flatness, tested on the ring variables only.
    ///
    /// If `gamma D(a)` and `gamma D(b)` lie in `K^2` then
    /// `gamma D(ab) = D(a) D(b) + D(b) D(a) + a gamma D(b) + b gamma D(a)`
    /// does too, so the variables suffice.
    pub fn is_flat(&self) -> bool {
        self.flatness_failure().is_none()
    }
}

pub fn is_flat_connection(gamma: &Connection) -> bool {
    gamma.is_flat()
}

/// `nabla(omega)`: `gamma` inserted slot by slot, with `nabla(a w) = D(a) w + a nabla(w)`.
pub fn nabla(gamma: &Connection, omega: &TensorElement) -> Result<TensorElement> {
    let n = omega.length();
    if n == 0 {
        return Err(Error::SpaceMismatch { expected: SpaceTag::r(1), found: omega.tag() });
    }
    let tag = SpaceTag::r(n + 1);
    let mut out = TensorElement::zero(tag);
    for (word, a) in omega.terms() {
        let plain = TensorElement::from_word(SpaceTag::t(n), word.clone(), Polynomial::one(a_nvars(gamma)));
        let da = gamma.derivation().apply(a);
        out.add_assign(&da.concat(&plain, tag));
        for (i, &g) in word.iter().enumerate() {
            for (u, c) in gamma.value(g).terms() {
                let mut w = word[..i].to_vec();
                w.extend_from_slice(u);
                w.extend_from_slice(&word[i + 1..]);
                out.add_term(w, &(c * a));
            }
        }
    }
    Ok(out)
}

fn a_nvars(gamma: &Connection) -> usize {
    gamma.derivation().presentation().nvars()
}

/// How far an infeasibility verdict reaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// no connection of the searched degree exists
    PerDegree,
    /// the lowest-weight obstruction cannot be reached by any choice of values, of any degree
    Absolute,
}

#[derive(Clone, Debug)]
pub enum ConnectionSearch {
    Feasible(Connection),
    Infeasible { obstruction: Obstruction, certificate: Certificate, labels: Vec<String> },
}

/// Searches for a connection of the given degree, flat if asked.
///
/// The unknowns are the values `gamma(g_j)` in the weight `wt(g_j) + degree` piece of
/// `T^2`; every module relation, and for flatness every `gamma D(x_v)`, gives an
/// affine constraint. On failure the certificate is absolute when the coefficients
/// multiplying the unknowns in the obstructed constraint have weight too high to
/// reach the obstruction, whatever the values are.
pub fn solve_connection(d: &Derivation, degree: i64, require_flat: bool) -> Result<ConnectionSearch> {
    let pres = d.presentation().clone();
    let report = d.validate();
    if !report.is_ok() {
        return Err(Error::Inconsistent(format!("derivation: {report}")));
    }
    let nvars = pres.nvars();
    let t2 = SpaceTag::t(2);
    let slots: Vec<UnknownSlot> = pres
        .gen_weights()
        .iter()
        .map(|w| UnknownSlot { tag: t2, weight: w + degree })
        .collect();

    // (coefficients multiplying gamma(g_j), constant part, whether 1 - sigma is applied, label)
    let mut specs: Vec<(Vec<Polynomial>, bool, String)> = Vec::new();
    for (i, rel) in pres.module().relations.iter().enumerate() {
        specs.push((rel.clone(), false, format!("relation {}", i + 1)));
    }
    if require_flat {
        for v in 0..nvars {
            let coeffs = d.value(v).module_coeffs(pres.rank());
            specs.push((coeffs, true, format!("flatness at {}", pres.ring().variables[v].name)));
        }
    }
    let one_minus_sigma = |t: TensorElement| k_minus_sigma(1, &t).expect("length 2").retag(t2);
    let mut constraints = Vec::new();
    for (coeffs, flat, _) in &specs {
        let mut constant = TensorElement::zero(t2);
        for (g, a) in coeffs.iter().enumerate() {
            constant.add_assign(&d.apply(a).concat(&TensorElement::generator(g, nvars), t2));
        }
        if *flat {
            constant = one_minus_sigma(constant);
        }
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(g, a)| {
                let a = a.clone();
                let flat = *flat;
                let op: Box<dyn Fn(&TensorElement) -> TensorElement> = Box::new(move |u| {
                    let t = u.mul_poly(&a);
                    if flat {
                        one_minus_sigma(t)
                    } else {
                        t
                    }
                });
                (g, op)
            })
            .collect();
        constraints.push(AffineConstraint { target: t2, constant, terms });
    }
    match solve_affine(&pres, &slots, &constraints) {
        AffineSolution::Feasible(values) => {
            let values = values.iter().map(|v| pres.normal_form(v)).collect();
            Ok(ConnectionSearch::Feasible(Connection::new(d.clone(), Some(degree), values)?))
        }
        AffineSolution::Infeasible(obstruction) => {
            let (ci, w_obs, _) = obstruction.minimal();
            let coeffs = &specs[*ci].0;
            let min_coeff = coeffs
                .iter()
                .flat_map(|a| a.weights(pres.var_weights()))
                .min();
            let min_t2 = min_nonzero_weight(&pres, 2);
            let certificate = match (min_coeff, min_t2) {
                (Some(a), Some(t)) if a + t > *w_obs => Certificate::Absolute,
                (None, _) | (_, None) => Certificate::Absolute,
                _ => Certificate::PerDegree,
            };
            let labels = specs.into_iter().map(|s| s.2).collect();
            Ok(ConnectionSearch::Infeasible { obstruction, certificate, labels })
        }
    }
}

/// Lower bound for the weights of nonzero elements of `T^n`.
fn min_nonzero_weight(pres: &crate::algebra::Presentation, n: usize) -> Option<i64> {
    pres.gen_weights().iter().min().map(|w| w * n as i64)
}
