//! Sparse exact Gaussian elimination over the rationals.
//!
//! Coordinates are plain `usize` indices. The pivot of a row is always its
//! largest coordinate, so reduction eliminates the "largest" coordinates first
//! and normal forms keep the smallest ones.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::rational::Rational;

pub type SparseVec = BTreeMap<usize, Rational>;

pub fn axpy(target: &mut SparseVec, factor: &Rational, source: &SparseVec) {
    if factor.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    for (&i, v) in source {
        match target.entry(i) {
            Entry::Vacant(e) => {
                e.insert(factor * v);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += factor * v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

/// Row space kept in reduced row echelon form.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    /// pivot coordinate -> row normalised to 1 at the pivot, zero at every other pivot
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.rows.contains_key(&c)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseVec)> + '_ {
        self.rows.iter().map(|(&p, r)| (p, r))
    }

    /// Reduces `v` to its normal form: the result has no pivot coordinates.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        for (c, a) in v {
            if let Some(row) = self.rows.get(c) {
                let f = -a.clone();
                axpy(&mut out, &f, row);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds a row to the span. Returns the new pivot, or `None` when the row was dependent.
    pub fn insert(&mut self, v: &SparseVec) -> Option<usize> {
        let mut r = self.reduce(v);
        let (&p, lead) = r.iter().next_back()?;
        let inv = Rational::one() / lead;
        for x in r.values_mut() {
            *x *= &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(a) = row.get(&p).cloned() {
                axpy(row, &-a, &r);
            }
        }
        self.rows.insert(p, r);
        Some(p)
    }
}

/// Outcome of solving a linear system over the rationals.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    /// One solution; free unknowns are set to zero.
    Feasible(Vec<Rational>),
    Infeasible,
}

/// Solves `sum_j a[i][j] * u_j = b[i]` for every equation `(a[i], b[i])`.
///
/// Unknown `j` is stored at coordinate `j + 1` and the right-hand side at coordinate 0,
/// so an equation that reduces to a pure right-hand side signals inconsistency.
pub fn solve(n_unknowns: usize, equations: &[(SparseVec, Rational)]) -> Solution {
    let mut ech = Echelon::new();
    for (a, b) in equations {
        let mut row: SparseVec = a.iter().map(|(&j, v)| (j + 1, v.clone())).collect();
        if !b.is_zero() {
            row.insert(0, -b.clone());
        }
        if let Some(0) = ech.insert(&row) {
            return Solution::Infeasible;
        }
    }
    let mut u = vec![Rational::zero(); n_unknowns];
    for (p, row) in ech.rows() {
        // row: u_p + (free terms) + row[0] = 0 with free unknowns set to zero
        u[p - 1] = -row.get(&0).cloned().unwrap_or_else(Rational::zero);
    }
    Solution::Feasible(u)
}
