//! Weighted-graded ring and module presentations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::poly::{Monomial, Polynomial};
use super::quotient::{Reducer, RingReducer};
use crate::error::{Error, Result};
use crate::tensor::SpaceTag;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub weight: i64,
}

/// `Q[variables] / (ideal)`; the base ring is the constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    pub variables: Vec<Variable>,
    pub ideal: Vec<Polynomial>,
}

impl RingPresentation {
    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn weights(&self) -> Vec<i64> {
        self.variables.iter().map(|v| v.weight).collect()
    }
}

/// Generators with weights and relations, one coefficient per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Vec<Polynomial>>,
}

impl ModulePresentation {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn weights(&self) -> Vec<i64> {
        self.generators.iter().map(|g| g.weight).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Issue {
    NonPositiveWeight { variable: String, weight: i64 },
    NonHomogeneousIdealGenerator { index: usize },
    WrongVariableCount { context: String },
    RelationLength { index: usize, expected: usize, found: usize },
    NonHomogeneousRelation { index: usize },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NonPositiveWeight { variable, weight } => {
                write!(f, "non-positive weight {weight} for variable {variable}")
            }
            Issue::NonHomogeneousIdealGenerator { index } => {
                write!(f, "ideal generator {} is not weighted-homogeneous", index + 1)
            }
            Issue::WrongVariableCount { context } => {
                write!(f, "{context}: polynomial over the wrong number of variables")
            }
            Issue::RelationLength { index, expected, found } => write!(
                f,
                "relation {} has {found} coefficients, expected {expected}",
                index + 1
            ),
            Issue::NonHomogeneousRelation { index } => {
                write!(f, "relation {} is not homogeneous", index + 1)
            }
        }
    }
}

/// List of violated invariants; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

fn has_nvars(p: &Polynomial, nvars: usize) -> bool {
    p.terms().all(|(m, _)| m.nvars() == nvars)
}

/// Checks weights and homogeneity of a ring/module pair. Never fails; it reports.
pub fn validate_presentation(ring: &RingPresentation, module: &ModulePresentation) -> ValidationReport {
    let mut issues = Vec::new();
    let nvars = ring.nvars();
    for v in &ring.variables {
        if v.weight < 1 {
            issues.push(Issue::NonPositiveWeight { variable: v.name.clone(), weight: v.weight });
        }
    }
    let vw = ring.weights();
    for (i, f) in ring.ideal.iter().enumerate() {
        if !has_nvars(f, nvars) {
            issues.push(Issue::WrongVariableCount { context: format!("ideal generator {}", i + 1) });
        } else if !f.is_homogeneous(&vw) {
            issues.push(Issue::NonHomogeneousIdealGenerator { index: i });
        }
    }
    let gw = module.weights();
    for (i, rel) in module.relations.iter().enumerate() {
        if rel.len() != module.rank() {
            issues.push(Issue::RelationLength { index: i, expected: module.rank(), found: rel.len() });
            continue;
        }
        if rel.iter().any(|p| !has_nvars(p, nvars)) {
            issues.push(Issue::WrongVariableCount { context: format!("relation {}", i + 1) });
            continue;
        }
        let mut ws: Vec<i64> = rel
            .iter()
            .zip(&gw)
            .flat_map(|(p, w)| p.weights(&vw).into_iter().map(move |x| x + w))
            .collect();
        ws.sort_unstable();
        ws.dedup();
        if ws.len() > 1 {
            issues.push(Issue::NonHomogeneousRelation { index: i });
        }
    }
    ValidationReport { issues }
}

/// All monomials of weight `w`, ordered lexicographically with the first variable most significant.
pub fn weighted_monomials(w: i64, weights: &[i64]) -> Vec<Monomial> {
    fn rec(w: i64, weights: &[i64], v: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if v == weights.len() {
            if w == 0 {
                out.push(Monomial::from_exponents(cur.clone()));
            }
            return;
        }
        let wv = weights[v];
        let max = w / wv;
        for e in (0..=max).rev() {
            cur[v] = e as u32;
            rec(w - e * wv, weights, v + 1, cur, out);
        }
        cur[v] = 0;
    }
    if w < 0 || weights.iter().any(|&x| x < 1) {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(w, weights, 0, &mut vec![0; weights.len()], &mut out);
    out.sort();
    out
}

/// Decomposition of `p` into weighted-homogeneous parts.
pub fn graded_split(p: &Polynomial, weights: &[i64]) -> BTreeMap<i64, Polynomial> {
    let mut out: BTreeMap<i64, Polynomial> = BTreeMap::new();
    for (m, c) in p.terms() {
        out.entry(m.weight(weights))
            .or_default()
            .add_term(m.clone(), c.clone());
    }
    out
}

/// A validated ring/module pair together with the memoised normal-form data
/// for every graded piece that has been touched.
pub struct Presentation {
    ring: RingPresentation,
    module: ModulePresentation,
    var_weights: Vec<i64>,
    gen_weights: Vec<i64>,
    ring_reducers: Mutex<HashMap<i64, Arc<RingReducer>>>,
    reducers: Mutex<HashMap<(SpaceTag, i64), Arc<Reducer>>>,
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation")
            .field("ring", &self.ring)
            .field("module", &self.module)
            .finish()
    }
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.module == other.module
    }
}

impl Presentation {
    pub fn new(ring: RingPresentation, module: ModulePresentation) -> Result<Self> {
        let report = validate_presentation(&ring, &module);
        if !report.is_valid() {
            return Err(Error::InvalidPresentation(
                report.issues.iter().map(|i| i.to_string()).collect(),
            ));
        }
        let var_weights = ring.weights();
        let gen_weights = module.weights();
        Ok(Presentation {
            ring,
            module,
            var_weights,
            gen_weights,
            ring_reducers: Mutex::new(HashMap::new()),
            reducers: Mutex::new(HashMap::new()),
        })
    }

    pub fn ring(&self) -> &RingPresentation {
        &self.ring
    }

    pub fn module(&self) -> &ModulePresentation {
        &self.module
    }

    pub fn nvars(&self) -> usize {
        self.var_weights.len()
    }

    pub fn rank(&self) -> usize {
        self.gen_weights.len()
    }

    pub fn var_weights(&self) -> &[i64] {
        &self.var_weights
    }

    pub fn gen_weights(&self) -> &[i64] {
        &self.gen_weights
    }

    pub fn word_weight(&self, word: &[usize]) -> i64 {
        word.iter().map(|&g| self.gen_weights[g]).sum()
    }

    /// Weight of each relation (coefficient weight plus generator weight).
    pub fn relation_weight(&self, index: usize) -> Option<i64> {
        self.module.relations[index]
            .iter()
            .zip(&self.gen_weights)
            .find_map(|(p, w)| p.homogeneous_weight(&self.var_weights).map(|x| x + w))
    }

    pub fn monomials(&self, w: i64) -> Vec<Monomial> {
        weighted_monomials(w, &self.var_weights)
    }

    pub fn ring_reducer(&self, w: i64) -> Arc<RingReducer> {
        if let Some(r) = self.ring_reducers.lock().unwrap().get(&w) {
            return r.clone();
        }
        let r = Arc::new(RingReducer::build(self, w));
        self.ring_reducers.lock().unwrap().entry(w).or_insert(r).clone()
    }

    pub fn reducer(&self, tag: SpaceTag, w: i64) -> Arc<Reducer> {
        let key = (tag.canonical(), w);
        if let Some(r) = self.reducers.lock().unwrap().get(&key) {
            return r.clone();
        }
        let r = Arc::new(Reducer::build(self, key.0, w));
        self.reducers.lock().unwrap().entry(key).or_insert(r).clone()
    }
}
