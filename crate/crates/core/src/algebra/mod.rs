//! Exact arithmetic over weighted-graded rings and finitely presented graded modules.

pub mod linalg;
pub mod poly;
pub mod presentation;
pub mod quotient;
pub mod rational;

pub use linalg::{Echelon, Solution, SparseVec};
pub use poly::{Monomial, Polynomial};
pub use presentation::{
    graded_split, validate_presentation, weighted_monomials, Generator, Issue, ModulePresentation,
    Presentation, RingPresentation, ValidationReport, Variable,
};
pub use quotient::{relation_space_basis, solve_affine, AffineConstraint, AffineSolution, Obstruction};
pub use rational::Rational;
