//! Normal forms in graded pieces of the ring, the module and its tensor spaces.
//!
//! Reduction is staged. A word is first brought to a canonical representative of
//! its orbit under the symmetries of the target space, its coefficient is reduced
//! modulo the ideal to a combination of standard monomials, and what remains is
//! reduced against the module relations inserted into the word slots. Each stage
//! is exact elimination over one graded piece, so every zero-test is a finite
//! computation.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use super::linalg::{axpy, solve, Echelon, Solution, SparseVec};
use super::poly::{Monomial, Polynomial};
use super::presentation::Presentation;
use super::rational::Rational;
use crate::tensor::{canonical_word, Space, SpaceTag, TensorElement, Word};

/// Normal forms of weight-`w` polynomials modulo the ideal.
#[derive(Debug)]
pub struct RingReducer {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    echelon: Echelon,
    standard: Vec<usize>,
    std_pos: HashMap<usize, usize>,
}

impl RingReducer {
    pub(crate) fn build(pres: &Presentation, w: i64) -> Self {
        let monomials = pres.monomials(w);
        let index: HashMap<Monomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut echelon = Echelon::new();
        let vw = pres.var_weights();
        for f in &pres.ring().ideal {
            let Some(wf) = f.homogeneous_weight(vw) else { continue };
            for m in pres.monomials(w - wf) {
                let row: SparseVec = f
                    .terms()
                    .map(|(n, c)| (index[&n.mul(&m)], c.clone()))
                    .collect();
                echelon.insert(&row);
            }
        }
        let standard: Vec<usize> = (0..monomials.len()).filter(|&i| !echelon.is_pivot(i)).collect();
        let std_pos = standard.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        RingReducer { monomials, index, echelon, standard, std_pos }
    }

    /// Dimension of the graded piece of the quotient ring.
    pub fn dim(&self) -> usize {
        self.standard.len()
    }

    pub fn standard_monomials(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.standard.iter().map(|&i| &self.monomials[i])
    }

    pub fn standard_monomial(&self, pos: usize) -> &Monomial {
        &self.monomials[self.standard[pos]]
    }

    /// Coordinates over the standard monomials. Terms of other weights must not occur.
    pub fn coords(&self, p: &Polynomial) -> SparseVec {
        let v: SparseVec = p.terms().map(|(m, c)| (self.index[m], c.clone())).collect();
        self.echelon
            .reduce(&v)
            .into_iter()
            .map(|(i, c)| (self.std_pos[&i], c))
            .collect()
    }

    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        Polynomial::from_terms(
            self.coords(p)
                .into_iter()
                .map(|(pos, c)| (self.standard_monomial(pos).clone(), c)),
        )
    }
}

/// All words of length `n` over `r` letters, lexicographically.
pub(crate) fn all_words(r: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..r).map(move |g| {
                    let mut v = w.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
    }
    out
}

/// Words of length `n` with letters in `start..r`, non-decreasing (or strictly increasing).
fn monotone_words(r: usize, n: usize, strict: bool) -> Vec<Word> {
    fn rec(r: usize, n: usize, start: usize, strict: bool, cur: &mut Word, out: &mut Vec<Word>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for g in start..r {
            cur.push(g);
            rec(r, n, if strict { g + 1 } else { g }, strict, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, n, 0, strict, &mut Vec::new(), &mut out);
    out
}

/// Canonical words of a (canonical) tag, in increasing order.
fn canonical_words(tag: SpaceTag, r: usize) -> Vec<Word> {
    let n = tag.length;
    let mut ws = match tag.space {
        Space::T => all_words(r, n),
        Space::S => monotone_words(r, n, false),
        Space::A => monotone_words(r, n, true),
        Space::R => {
            if n == 0 {
                vec![Vec::new()]
            } else {
                monotone_words(r, n - 1, false)
                    .into_iter()
                    .flat_map(|w| {
                        (0..r).map(move |g| {
                            let mut v = w.clone();
                            v.push(g);
                            v
                        })
                    })
                    .collect()
            }
        }
    };
    ws.sort();
    ws
}

/// Representatives `(slot, remaining letters)` of relation insertions, up to the word symmetries.
fn insertion_classes(tag: SpaceTag, r: usize) -> Vec<(usize, Word)> {
    let n = tag.length;
    if n == 0 {
        return Vec::new();
    }
    match tag.space {
        Space::T => (0..n).flat_map(|k| all_words(r, n - 1).into_iter().map(move |u| (k, u))).collect(),
        Space::S => monotone_words(r, n - 1, false).into_iter().map(|u| (0, u)).collect(),
        Space::A => monotone_words(r, n - 1, true).into_iter().map(|u| (0, u)).collect(),
        Space::R => {
            let mut out: Vec<(usize, Word)> =
                monotone_words(r, n - 1, false).into_iter().map(|u| (n - 1, u)).collect();
            if n >= 2 {
                for u in monotone_words(r, n - 2, false) {
                    for g in 0..r {
                        let mut v = u.clone();
                        v.push(g);
                        out.push((0, v));
                    }
                }
            }
            out
        }
    }
}

fn insert_letter(u: &[usize], slot: usize, g: usize) -> Word {
    let mut w = Vec::with_capacity(u.len() + 1);
    w.extend_from_slice(&u[..slot]);
    w.push(g);
    w.extend_from_slice(&u[slot..]);
    w
}

/// Normal forms in the weight-`w` piece of one tensor space.
///
/// Coordinates are pairs (canonical word, standard monomial), ordered by word
/// and then monomial; the relation rows are kept in reduced echelon form.
#[derive(Debug)]
pub struct Reducer {
    tag: SpaceTag,
    weight: i64,
    blocks: BTreeMap<Word, (usize, Arc<RingReducer>)>,
    coords: Vec<(Word, usize)>,
    echelon: Echelon,
}

impl Reducer {
    pub(crate) fn build(pres: &Presentation, tag: SpaceTag, w: i64) -> Self {
        let tag = tag.canonical();
        let r = pres.rank();
        let mut blocks = BTreeMap::new();
        let mut coords = Vec::new();
        for word in canonical_words(tag, r) {
            let rr = pres.ring_reducer(w - pres.word_weight(&word));
            if rr.dim() == 0 {
                continue;
            }
            blocks.insert(word.clone(), (coords.len(), rr.clone()));
            coords.extend((0..rr.dim()).map(|p| (word.clone(), p)));
        }
        let mut red = Reducer { tag, weight: w, blocks, coords, echelon: Echelon::new() };
        if red.coords.is_empty() {
            return red;
        }
        let classes = insertion_classes(tag, r);
        for (ri, rel) in pres.module().relations.iter().enumerate() {
            let Some(wr) = pres.relation_weight(ri) else { continue };
            for (slot, u) in &classes {
                let rr = pres.ring_reducer(w - wr - pres.word_weight(u));
                for m in rr.standard_monomials() {
                    let mut t = TensorElement::zero(tag);
                    for (g, c) in rel.iter().enumerate() {
                        t.add_term(insert_letter(u, *slot, g), &c.mul_monomial(m));
                    }
                    let v = red.coords_of(pres, &t);
                    red.echelon.insert(&v);
                }
            }
        }
        red
    }

    pub fn tag(&self) -> SpaceTag {
        self.tag
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// Dimension of the graded piece of the quotient space.
    pub fn dim(&self) -> usize {
        self.coords.len() - self.echelon.rank()
    }

    /// Number of (canonical word, standard monomial) coordinates before module relations.
    pub fn num_coords(&self) -> usize {
        self.coords.len()
    }

    /// Coordinates of the weight-`w` part of `t` (other weights are ignored).
    pub fn coords_of(&self, pres: &Presentation, t: &TensorElement) -> SparseVec {
        let vw = pres.var_weights();
        let mut out = SparseVec::new();
        for (word, p) in t.terms() {
            let Some((sign, cw)) = canonical_word(self.tag, word) else { continue };
            let Some((offset, rr)) = self.blocks.get(&cw) else { continue };
            let part = p.graded_part(self.weight - pres.word_weight(word), vw);
            if part.is_zero() {
                continue;
            }
            let local: SparseVec =
                rr.coords(&part).into_iter().map(|(i, c)| (offset + i, c)).collect();
            axpy(&mut out, &Rational::from_integer(sign.into()), &local);
        }
        out
    }

    /// Reduced coordinates: empty exactly when the weight-`w` part of `t` vanishes.
    pub fn reduce(&self, pres: &Presentation, t: &TensorElement) -> SparseVec {
        self.echelon.reduce(&self.coords_of(pres, t))
    }

    /// The element of coordinate `i`.
    pub fn coordinate_element(&self, i: usize) -> TensorElement {
        let (word, pos) = &self.coords[i];
        let (_, rr) = &self.blocks[word];
        let m = rr.standard_monomial(*pos).clone();
        TensorElement::from_word(self.tag, word.clone(), Polynomial::term(m, Rational::from_integer(1.into())))
    }

    pub fn element(&self, v: &SparseVec) -> TensorElement {
        let mut t = TensorElement::zero(self.tag);
        for (&i, c) in v {
            t.add_assign(&self.coordinate_element(i).scale(c));
        }
        t
    }

    /// Basis of the quotient piece: the coordinates that are not pivots.
    pub fn basis(&self) -> Vec<TensorElement> {
        (0..self.coords.len())
            .filter(|&i| !self.echelon.is_pivot(i))
            .map(|i| self.coordinate_element(i))
            .collect()
    }
}

impl Presentation {
    /// Zero-test modulo the relations of the tagged space, graded piece by graded piece.
    pub fn is_zero(&self, t: &TensorElement) -> bool {
        t.weights(self)
            .into_iter()
            .all(|w| self.reducer(t.tag(), w).reduce(self, t).is_empty())
    }

    /// Equality in the space of `a` (`b` is read in the same space).
    pub fn equal(&self, a: &TensorElement, b: &TensorElement) -> bool {
        self.is_zero(&a.sub(&b.clone().retag(a.tag())))
    }

    /// Canonical representative: equal inputs give identical outputs.
    pub fn normal_form(&self, t: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero(t.tag());
        for w in t.weights(self) {
            let red = self.reducer(t.tag(), w);
            out.add_assign(&red.element(&red.reduce(self, t)).retag(t.tag()));
        }
        out
    }

    pub fn is_zero_poly(&self, p: &Polynomial) -> bool {
        super::presentation::graded_split(p, self.var_weights())
            .iter()
            .all(|(&w, part)| self.ring_reducer(w).coords(part).is_empty())
    }

    pub fn normal_form_poly(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (w, part) in super::presentation::graded_split(p, self.var_weights()) {
            out += &self.ring_reducer(w).normal_form(&part);
        }
        out
    }

    /// Dimension over the rationals of the weight-`w` piece of the tagged space.
    pub fn dimension(&self, tag: SpaceTag, w: i64) -> usize {
        self.reducer(tag, w).dim()
    }

    pub fn basis(&self, tag: SpaceTag, w: i64) -> Vec<TensorElement> {
        self.reducer(tag, w).basis().into_iter().map(|t| t.retag(tag)).collect()
    }
}

/// Spanning set of the weight-`w` relations among length-`n` words, in plain
/// tensor-word coordinates (tag `T^n`): module relations inserted in every slot,
/// ideal multiples of words, and the symmetrisations that define the tag.
///
/// Exhaustive and unreduced; the staged reducers above are what production code uses.
pub fn relation_space_basis(pres: &Presentation, tag: SpaceTag, w: i64) -> Vec<TensorElement> {
    let n = tag.length;
    let r = pres.rank();
    let t_tag = SpaceTag::t(n);
    let vw = pres.var_weights();
    let mut out = Vec::new();
    for (ri, rel) in pres.module().relations.iter().enumerate() {
        let Some(wr) = pres.relation_weight(ri) else { continue };
        for slot in 0..n {
            for u in all_words(r, n - 1) {
                for m in pres.monomials(w - wr - pres.word_weight(&u)) {
                    let mut t = TensorElement::zero(t_tag);
                    for (g, c) in rel.iter().enumerate() {
                        t.add_term(insert_letter(&u, slot, g), &c.mul_monomial(&m));
                    }
                    out.push(t);
                }
            }
        }
    }
    let words = all_words(r, n);
    for f in &pres.ring().ideal {
        let Some(wf) = f.homogeneous_weight(vw) else { continue };
        for v in &words {
            for m in pres.monomials(w - pres.word_weight(v) - wf) {
                out.push(TensorElement::from_word(t_tag, v.clone(), f.mul_monomial(&m)));
            }
        }
    }
    let sym_slots = match tag.canonical().space {
        Space::T => 0,
        Space::S | Space::A => n,
        Space::R => n.saturating_sub(1),
    };
    let antisym = tag.canonical().space == Space::A;
    for v in &words {
        let ms = pres.monomials(w - pres.word_weight(v));
        if ms.is_empty() {
            continue;
        }
        let repeated = (0..n).any(|a| (a + 1..n).any(|b| v[a] == v[b]));
        for a in 0..sym_slots {
            for b in a + 1..sym_slots {
                let mut tv = v.clone();
                tv.swap(a, b);
                for m in &ms {
                    let p = Polynomial::term(m.clone(), Rational::from_integer(1.into()));
                    let mut t = TensorElement::from_word(t_tag, v.clone(), p.clone());
                    let other = TensorElement::from_word(t_tag, tv.clone(), p);
                    if antisym {
                        t.add_assign(&other);
                    } else {
                        t.add_assign(&other.neg());
                    }
                    if !t.is_trivially_zero() {
                        out.push(t);
                    }
                }
            }
        }
        if antisym && repeated {
            for m in &ms {
                out.push(TensorElement::from_word(
                    t_tag,
                    v.clone(),
                    Polynomial::term(m.clone(), Rational::from_integer(1.into())),
                ));
            }
        }
    }
    out
}

/// An unknown ranging over the weight-`weight` piece of `tag`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownSlot {
    pub tag: SpaceTag,
    pub weight: i64,
}

pub type LinearOp<'a> = Box<dyn Fn(&TensorElement) -> TensorElement + 'a>;

/// `constant + sum_k op_k(u_k) = 0` in the space `target`. Each operator must be
/// rational-linear and well defined on the quotient its unknown lives in.
pub struct AffineConstraint<'a> {
    pub target: SpaceTag,
    pub constant: TensorElement,
    pub terms: Vec<(usize, LinearOp<'a>)>,
}

/// Part of a constraint that no choice of unknowns can cancel.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    /// `(constraint, weight, residual)` sorted by weight then constraint; never empty
    pub components: Vec<(usize, i64, TensorElement)>,
}

impl Obstruction {
    pub fn minimal(&self) -> &(usize, i64, TensorElement) {
        &self.components[0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AffineSolution {
    Feasible(Vec<TensorElement>),
    Infeasible(Obstruction),
}

/// Solves a system of affine constraints with unknowns in graded pieces of tensor spaces.
///
/// Unknowns are expanded over the quotient bases, so free directions are set to zero
/// and the witness is deterministic. On failure the constant terms are reduced
/// modulo everything the unknowns can reach, eliminating low weights first, and the
/// surviving residual is returned.
pub fn solve_affine(
    pres: &Presentation,
    slots: &[UnknownSlot],
    constraints: &[AffineConstraint<'_>],
) -> AffineSolution {
    let bases: Vec<Vec<TensorElement>> = slots.iter().map(|s| pres.basis(s.tag, s.weight)).collect();
    let mut col_of = Vec::new();
    for (k, b) in bases.iter().enumerate() {
        for j in 0..b.len() {
            col_of.push((k, j));
        }
    }
    let ncols = col_of.len();

    // local vectors keyed by (constraint, weight)
    type Key = (Reverse<i64>, usize);
    let mut constant_parts: BTreeMap<Key, SparseVec> = BTreeMap::new();
    let mut column_parts: Vec<BTreeMap<Key, SparseVec>> = vec![BTreeMap::new(); ncols];
    let mut keys: BTreeMap<Key, usize> = BTreeMap::new();
    let mut add_parts = |target: SpaceTag, ci: usize, t: &TensorElement, into: &mut BTreeMap<Key, SparseVec>| {
        let t = t.clone().retag(target);
        for w in t.weights(pres) {
            let red = pres.reducer(target, w);
            let v = red.reduce(pres, &t);
            keys.insert((Reverse(w), ci), red.num_coords());
            if !v.is_empty() {
                into.insert((Reverse(w), ci), v);
            }
        }
    };
    for (ci, c) in constraints.iter().enumerate() {
        add_parts(c.target, ci, &c.constant, &mut constant_parts);
        for (k, op) in &c.terms {
            for (j, b) in bases[*k].iter().enumerate() {
                let col = col_of.iter().position(|&x| x == (*k, j)).unwrap();
                let image = op(b);
                let mut parts = std::mem::take(&mut column_parts[col]);
                let mut fresh = BTreeMap::new();
                add_parts(c.target, ci, &image, &mut fresh);
                for (key, v) in fresh {
                    axpy(parts.entry(key).or_default(), &Rational::from_integer(1.into()), &v);
                }
                column_parts[col] = parts;
            }
        }
    }
    // global row offsets: high weights first, so pivots fall on low weights
    let mut offsets = BTreeMap::new();
    let mut total = 0;
    for (key, size) in &keys {
        offsets.insert(*key, total);
        total += size;
    }
    let globalise = |parts: &BTreeMap<Key, SparseVec>| -> SparseVec {
        let mut out = SparseVec::new();
        for (key, v) in parts {
            let off = offsets[key];
            for (i, c) in v {
                if !c.is_zero() {
                    out.insert(off + i, c.clone());
                }
            }
        }
        out
    };
    let constant = globalise(&constant_parts);
    let columns: Vec<SparseVec> = column_parts.iter().map(globalise).collect();

    let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (&i, c) in col {
            rows.entry(i).or_default().insert(j, c.clone());
        }
    }
    for &i in constant.keys() {
        rows.entry(i).or_default();
    }
    let equations: Vec<(SparseVec, Rational)> = rows
        .into_iter()
        .map(|(i, a)| (a, -constant.get(&i).cloned().unwrap_or_else(Rational::zero)))
        .collect();
    match solve(ncols, &equations) {
        Solution::Feasible(u) => {
            let mut values: Vec<TensorElement> = slots.iter().map(|s| TensorElement::zero(s.tag)).collect();
            for (col, c) in u.iter().enumerate() {
                let (k, j) = col_of[col];
                values[k].add_assign(&bases[k][j].scale(c));
            }
            AffineSolution::Feasible(values)
        }
        Solution::Infeasible => {
            let mut span = Echelon::new();
            for col in &columns {
                span.insert(col);
            }
            let residual = span.reduce(&constant);
            let mut components = Vec::new();
            for (key, off) in &offsets {
                let size = keys[key];
                let local: SparseVec = residual
                    .range(*off..off + size)
                    .map(|(i, c)| (i - off, c.clone()))
                    .collect();
                if local.is_empty() {
                    continue;
                }
                let (Reverse(w), ci) = *key;
                let target = constraints[ci].target;
                let elem = pres.reducer(target, w).element(&local).retag(target);
                components.push((ci, w, elem));
            }
            components.sort_by_key(|(ci, w, _)| (*w, *ci));
            AffineSolution::Infeasible(Obstruction { components })
        }
    }
}
