use std::sync::Arc;

use super::Report;
use crate::algebra::{Polynomial, Presentation};
use crate::error::{Error, Result};
use crate::tensor::{SpaceTag, TensorElement};

/// A derivation `D` from the ring into the module, given by its values on the variables.
#[derive(Clone, Debug)]
pub struct Derivation {
    pres: Arc<Presentation>,
    degree: i64,
    values: Vec<TensorElement>,
}

impl Derivation {
    pub fn new(pres: Arc<Presentation>, degree: i64, values: Vec<TensorElement>) -> Result<Self> {
        if values.len() != pres.nvars() {
            return Err(Error::Input(format!(
                "derivation needs {} values, got {}",
                pres.nvars(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.length() != 1) {
            return Err(Error::LengthMismatch(format!(
                "derivation values must be module elements, found length {}",
                v.length()
            )));
        }
        let values = values.into_iter().map(|v| v.retag(SpaceTag::t(1))).collect();
        Ok(Derivation { pres, degree, values })
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// `D(x_v)`.
    pub fn value(&self, v: usize) -> &TensorElement {
        &self.values[v]
    }

    pub fn values(&self) -> &[TensorElement] {
        &self.values
    }

    /// `D(a) = sum_v (da/dx_v) D(x_v)`.
    pub fn apply(&self, a: &Polynomial) -> TensorElement {
        let mut out = TensorElement::zero(SpaceTag::t(1));
        for (v, dv) in self.values.iter().enumerate() {
            let p = a.partial(v);
            if !p.is_zero() {
                out.add_assign(&dv.mul_poly(&p));
            }
        }
        out
    }

    /// Homogeneity of the values and descent to the quotient ring.
    pub fn validate(&self) -> Report {
        let pres = &self.pres;
        let mut report = Report::default();
        for (v, val) in self.values.iter().enumerate() {
            let expected = pres.var_weights()[v] + self.degree;
            if val.weights(pres).iter().any(|&w| w != expected) {
                report.fail(
                    format!(
                        "D({}) is not homogeneous of weight {expected}",
                        pres.ring().variables[v].name
                    ),
                    Some(val.clone()),
                );
            }
        }
        for (i, f) in pres.ring().ideal.iter().enumerate() {
            let d = self.apply(f);
            if !pres.is_zero(&d) {
                report.fail(format!("D(ideal generator {}) is not zero", i + 1), Some(d));
            }
        }
        report
    }
}
