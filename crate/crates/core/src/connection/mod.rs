//! Derivations, connections, extended connections and comparison maps.

mod comparison;
mod connection;
mod derivation;
mod extended;

use std::fmt;

use crate::tensor::TensorElement;

pub use comparison::{compare_extended, s_map, s_tilde, ComparisonMap, EquiviterMap};
pub use connection::{
    is_flat_connection, nabla, solve_connection, Certificate, Connection, ConnectionSearch,
};
pub use derivation::Derivation;
pub use extended::{
    check_ti, extend_flat, flat_extended_failure, is_flat_extended, iterate_connection, tprime, validate_extended,
    ExtendedConnection, ExtendedMap, NablaIteration, Truncated,
};

/// One failed check, with the offending element when there is one.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub what: String,
    pub residual: Option<TensorElement>,
}

/// Outcome of a validation: empty means every check passed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn fail(&mut self, what: impl Into<String>, residual: Option<TensorElement>) {
        self.failures.push(Failure { what: what.into(), residual });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let msgs: Vec<&str> = self.failures.iter().map(|x| x.what.as_str()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}
