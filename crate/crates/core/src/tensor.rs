//! Elements of the tensor, symmetric, exterior and mixed powers of a module.
//!
//! Every element is carried in tensor-word coordinates: a finite map from words
//! of generator indices to polynomial coefficients. The tag records which
//! quotient the element lives in, and only affects zero-tests and normal forms.
//! `R^n` is the mixed power `S^(n-1) (x) F`: its first `n - 1` slots commute and
//! the last slot is distinguished.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::algebra::{Polynomial, Presentation, Rational};
use crate::error::{Error, Result};

pub type Word = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    /// tensor power
    T,
    /// symmetric power
    S,
    /// exterior power
    A,
    /// symmetric power of length n-1 tensored with the module
    R,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Space::T => "T",
            Space::S => "S",
            Space::A => "A",
            Space::R => "R",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceTag {
    pub space: Space,
    pub length: usize,
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.space, self.length)
    }
}

impl SpaceTag {
    pub fn new(space: Space, length: usize) -> Self {
        SpaceTag { space, length }
    }

    pub fn t(length: usize) -> Self {
        Self::new(Space::T, length)
    }

    pub fn s(length: usize) -> Self {
        Self::new(Space::S, length)
    }

    pub fn a(length: usize) -> Self {
        Self::new(Space::A, length)
    }

    pub fn r(length: usize) -> Self {
        Self::new(Space::R, length)
    }

    /// Representative tag for spaces that coincide: every power of length at
    /// most one is the ring or the module, and `R^2 = T^2`.
    pub fn canonical(self) -> Self {
        match (self.space, self.length) {
            (_, 0) | (_, 1) => SpaceTag::t(self.length),
            (Space::R, 2) => SpaceTag::t(2),
            _ => self,
        }
    }

    pub fn coincides(self, other: SpaceTag) -> bool {
        self.canonical() == other.canonical()
    }

    /// Whether `target` is a quotient of `self` (or the same space).
    pub fn projects_to(self, target: SpaceTag) -> bool {
        if self.length != target.length {
            return false;
        }
        let (a, b) = (self.canonical(), target.canonical());
        a == b
            || a.space == Space::T
            || (a.space == Space::R && b.space == Space::S)
    }
}

/// Canonical representative of a word in the quotient by the word symmetries
/// of `tag`, with the sign picked up on the way. `None` when the word vanishes.
pub fn canonical_word(tag: SpaceTag, word: &[usize]) -> Option<(i8, Word)> {
    let tag = tag.canonical();
    let mut w = word.to_vec();
    match tag.space {
        Space::T => Some((1, w)),
        Space::S => {
            w.sort_unstable();
            Some((1, w))
        }
        Space::R => {
            let n = w.len();
            if n > 1 {
                w[..n - 1].sort_unstable();
            }
            Some((1, w))
        }
        Space::A => {
            // insertion sort, counting transpositions
            let mut sign = 1i8;
            for i in 1..w.len() {
                let mut j = i;
                while j > 0 && w[j - 1] > w[j] {
                    w.swap(j - 1, j);
                    sign = -sign;
                    j -= 1;
                }
            }
            if w.windows(2).any(|p| p[0] == p[1]) {
                None
            } else {
                Some((sign, w))
            }
        }
    }
}

/// Linear combination of generator words with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorElement {
    tag: SpaceTag,
    terms: BTreeMap<Word, Polynomial>,
}

impl TensorElement {
    pub fn zero(tag: SpaceTag) -> Self {
        TensorElement { tag, terms: BTreeMap::new() }
    }

    /// A ring element, as an element of length 0.
    pub fn scalar(p: Polynomial) -> Self {
        Self::from_word(SpaceTag::t(0), Vec::new(), p)
    }

    /// The module generator `g` with coefficient 1.
    pub fn generator(g: usize, nvars: usize) -> Self {
        Self::from_word(SpaceTag::t(1), vec![g], Polynomial::one(nvars))
    }

    /// Module element `sum_j coeffs[j] * g_j`.
    pub fn from_module_coeffs(coeffs: &[Polynomial]) -> Self {
        let mut t = Self::zero(SpaceTag::t(1));
        for (g, p) in coeffs.iter().enumerate() {
            t.add_term(vec![g], p);
        }
        t
    }

    pub fn from_word(tag: SpaceTag, word: Word, p: Polynomial) -> Self {
        assert_eq!(word.len(), tag.length, "word length must match the tag");
        let mut t = Self::zero(tag);
        t.add_term(word, &p);
        t
    }

    pub fn tag(&self) -> SpaceTag {
        self.tag
    }

    pub fn length(&self) -> usize {
        self.tag.length
    }

    pub fn space(&self) -> Space {
        self.tag.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Polynomial)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, word: &[usize]) -> Polynomial {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    /// Coefficients over the generators of a length-1 element.
    pub fn module_coeffs(&self, rank: usize) -> Vec<Polynomial> {
        debug_assert_eq!(self.length(), 1);
        (0..rank).map(|g| self.coefficient(&[g])).collect()
    }

    /// True when the representative has no terms (not a zero-test modulo relations).
    pub fn is_trivially_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: Word, p: &Polynomial) {
        debug_assert_eq!(word.len(), self.tag.length);
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
            Entry::Vacant(e) => {
                e.insert(p.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += p;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Same terms under another tag (no check).
    pub fn retag(mut self, tag: SpaceTag) -> Self {
        assert_eq!(tag.length, self.tag.length);
        self.tag = tag;
        self
    }

    /// Retags to a quotient space of the current one.
    pub fn project(&self, target: SpaceTag) -> Result<Self> {
        if !self.tag.projects_to(target) {
            return Err(Error::NotAQuotient { from: self.tag, to: target });
        }
        Ok(self.clone().retag(target))
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.neg())
    }

    pub fn add_assign(&mut self, other: &TensorElement) {
        debug_assert_eq!(self.length(), other.length(), "tensor length mismatch");
        for (w, p) in &other.terms {
            self.add_term(w.clone(), p);
        }
    }

    pub fn neg(&self) -> TensorElement {
        self.scale(&-Rational::from_integer(1.into()))
    }

    pub fn scale(&self, c: &Rational) -> TensorElement {
        if c.is_zero() {
            return Self::zero(self.tag);
        }
        TensorElement {
            tag: self.tag,
            terms: self.terms.iter().map(|(w, p)| (w.clone(), p.scale(c))).collect(),
        }
    }

    pub fn mul_poly(&self, a: &Polynomial) -> TensorElement {
        let mut out = Self::zero(self.tag);
        for (w, p) in &self.terms {
            out.add_term(w.clone(), &(p * a));
        }
        out
    }

    /// Word concatenation `self * other`, tagged `tag`.
    pub fn concat(&self, other: &TensorElement, tag: SpaceTag) -> TensorElement {
        assert_eq!(tag.length, self.length() + other.length());
        let mut out = Self::zero(tag);
        for (w1, p1) in &self.terms {
            for (w2, p2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, &(p1 * p2));
            }
        }
        out
    }

    /// Applies a word map term by term, summing the signed images.
    pub fn map_words<F>(&self, tag: SpaceTag, mut f: F) -> TensorElement
    where
        F: FnMut(&[usize]) -> Vec<(Rational, Word)>,
    {
        let mut out = Self::zero(tag);
        for (w, p) in &self.terms {
            for (c, w2) in f(w) {
                out.add_term(w2, &p.scale(&c));
            }
        }
        out
    }

    /// Weights of the homogeneous pieces present in this representative.
    pub fn weights(&self, pres: &Presentation) -> BTreeSet<i64> {
        let vw = pres.var_weights();
        let mut out = BTreeSet::new();
        for (w, p) in &self.terms {
            let ww = pres.word_weight(w);
            for x in p.weights(vw) {
                out.insert(x + ww);
            }
        }
        out
    }

    /// The homogeneous piece of weight `weight`.
    pub fn graded_part(&self, pres: &Presentation, weight: i64) -> TensorElement {
        let vw = pres.var_weights();
        let mut out = Self::zero(self.tag);
        for (w, p) in &self.terms {
            let part = p.graded_part(weight - pres.word_weight(w), vw);
            out.add_term(w.clone(), &part);
        }
        out
    }

    /// Common weight of a homogeneous nonzero representative.
    pub fn homogeneous_weight(&self, pres: &Presentation) -> Option<i64> {
        let ws = self.weights(pres);
        (ws.len() == 1).then(|| *ws.iter().next().unwrap())
    }

    /// The coefficient of a length-0 element.
    pub fn as_scalar(&self) -> Polynomial {
        debug_assert_eq!(self.length(), 0);
        self.coefficient(&[])
    }
}

/// The switch operator on `R^n`; zero on the module itself.
///
/// `sigma(m_1...m_n) = sum_{i=1}^{n-1} m_n m_(n-1) ... m_(n-i+1) m_1 ... m_(n-i)`.
pub fn sigma(omega: &TensorElement) -> Result<TensorElement> {
    let tag = omega.tag();
    if !tag.coincides(SpaceTag::r(tag.length)) {
        return Err(Error::SpaceMismatch { expected: SpaceTag::r(tag.length), found: tag });
    }
    let n = tag.length;
    let out_tag = SpaceTag::r(n);
    Ok(omega.map_words(out_tag, |w| {
        let one = Rational::from_integer(1.into());
        (1..n)
            .map(|i| {
                let mut v: Word = w[n - i..].iter().rev().copied().collect();
                v.extend_from_slice(&w[..n - i]);
                (one.clone(), v)
            })
            .collect()
    }))
}

/// `1 + sigma`.
pub fn sigma_star(omega: &TensorElement) -> Result<TensorElement> {
    let s = sigma(omega)?;
    Ok(omega.clone().retag(s.tag()).add(&s))
}

/// `(k - sigma)(omega)` for an integer `k`.
pub fn k_minus_sigma(k: i64, omega: &TensorElement) -> Result<TensorElement> {
    let s = sigma(omega)?;
    Ok(omega
        .scale(&Rational::from_integer(k.into()))
        .retag(s.tag())
        .sub(&s))
}

/// Membership in `K^n`, the kernel of `n - sigma_star` on `R^n`.
pub fn in_k(pres: &Presentation, omega: &TensorElement) -> Result<bool> {
    let n = omega.length();
    if n == 0 {
        return Err(Error::SpaceMismatch { expected: SpaceTag::r(1), found: omega.tag() });
    }
    // n - sigma_star = (n - 1) - sigma
    let r = k_minus_sigma(n as i64 - 1, omega)?;
    Ok(pres.is_zero(&r))
}

/// Dimension of the weight-`w` piece of `K^n`, as the kernel of `n - sigma_star` on `R^n`.
pub fn k_dimension(pres: &Presentation, n: usize, w: i64) -> usize {
    let tag = SpaceTag::r(n);
    let red = pres.reducer(tag, w);
    let basis = red.basis();
    let mut ech = crate::algebra::Echelon::new();
    for b in &basis {
        let img = k_minus_sigma(n as i64 - 1, &b.clone().retag(tag)).expect("length n");
        ech.insert(&red.reduce(pres, &img));
    }
    basis.len() - ech.rank()
}

/// Graded product `a * b` landing in `R^(p+q)`; `a` enters through its image in `S^p`.
pub fn mul_graded(a: &TensorElement, b: &TensorElement) -> Result<TensorElement> {
    let (p, q) = (a.length(), b.length());
    if q == 0 {
        return Err(Error::SpaceMismatch { expected: SpaceTag::r(1), found: b.tag() });
    }
    let a_ok = p <= 1 || matches!(a.space(), Space::R | Space::S | Space::T);
    let b_ok = b.tag().coincides(SpaceTag::r(q)) || b.space() == Space::T;
    if !a_ok || !b_ok {
        return Err(Error::SpaceMismatch { expected: SpaceTag::r(q), found: b.tag() });
    }
    Ok(a.concat(b, SpaceTag::r(p + q)))
}

/// Product in the symmetric algebra.
pub fn mul_symmetric(a: &TensorElement, b: &TensorElement) -> TensorElement {
    a.concat(b, SpaceTag::s(a.length() + b.length()))
}
