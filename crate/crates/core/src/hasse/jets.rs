use super::HasseMap;
use crate::algebra::{Polynomial, Presentation};
use crate::error::{Error, Result};
use crate::tensor::{mul_symmetric, SpaceTag, TensorElement};

/// An element `(c_0, ..., c_N)` of the truncated symmetric algebra, `c_i` in `S^i(F)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetElement {
    components: Vec<TensorElement>,
}

impl JetElement {
    pub fn new(components: Vec<TensorElement>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Input("a jet needs a degree-0 component".into()));
        }
        if let Some((i, c)) = components.iter().enumerate().find(|(i, c)| c.length() != *i) {
            return Err(Error::LengthMismatch(format!("jet component {i} has length {}", c.length())));
        }
        let components = components
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.retag(SpaceTag::s(i)))
            .collect();
        Ok(JetElement { components })
    }

    pub fn zero(order: usize) -> Self {
        JetElement { components: (0..=order).map(|i| TensorElement::zero(SpaceTag::s(i))).collect() }
    }

    pub fn one(order: usize, nvars: usize) -> Self {
        let mut j = Self::zero(order);
        j.components[0] = TensorElement::scalar(Polynomial::one(nvars));
        j
    }

    pub fn order(&self) -> usize {
        self.components.len() - 1
    }

    pub fn component(&self, i: usize) -> &TensorElement {
        &self.components[i]
    }

    pub fn components(&self) -> &[TensorElement] {
        &self.components
    }

    pub fn add(&self, other: &JetElement) -> JetElement {
        let n = self.order().min(other.order());
        JetElement { components: (0..=n).map(|i| self.components[i].add(&other.components[i])).collect() }
    }

    pub fn sub(&self, other: &JetElement) -> JetElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> JetElement {
        JetElement { components: self.components.iter().map(|c| c.neg()).collect() }
    }

    /// The image in the jet algebra of lower order.
    pub fn truncate(&self, order: usize) -> JetElement {
        JetElement { components: self.components[..=order.min(self.order())].to_vec() }
    }

    pub fn normal_form(&self, pres: &Presentation) -> JetElement {
        JetElement { components: self.components.iter().map(|c| pres.normal_form(c)).collect() }
    }

    pub fn is_zero(&self, pres: &Presentation) -> bool {
        self.components.iter().all(|c| pres.is_zero(c))
    }

    pub fn equal(&self, other: &JetElement, pres: &Presentation) -> bool {
        self.order() == other.order() && self.sub(other).is_zero(pres)
    }
}

/// Product in the truncated symmetric algebra of the smaller order.
pub fn jet_product(a: &JetElement, b: &JetElement) -> JetElement {
    let n = a.order().min(b.order());
    let components = (0..=n)
        .map(|i| {
            let mut c = TensorElement::zero(SpaceTag::s(i));
            for j in 0..=i {
                c.add_assign(&mul_symmetric(&a.components[j], &b.components[i - j]));
            }
            c
        })
        .collect();
    JetElement { components }
}

/// `tau(a) = (h_0(a), ..., h_N(a))`.
pub fn tau(h: &dyn HasseMap, a: &Polynomial, order: usize) -> Result<JetElement> {
    let components = (0..=order).map(|i| h.apply(i, a)).collect::<Result<Vec<_>>>()?;
    JetElement::new(components)
}
