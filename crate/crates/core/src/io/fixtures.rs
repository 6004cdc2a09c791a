//! Scenario files shipped with the crate.

pub const NODAL: &str = include_str!("../../fixtures/nodal.jet");
pub const NONGORENSTEIN: &str = include_str!("../../fixtures/nongorenstein.jet");
pub const TAYLOR: &str = include_str!("../../fixtures/taylor.jet");
pub const TAYLOR_NU1: &str = include_str!("../../fixtures/taylor_nu1.jet");
pub const TAYLOR_NU2: &str = include_str!("../../fixtures/taylor_nu2.jet");
pub const TAYLOR_NU3: &str = include_str!("../../fixtures/taylor_nu3.jet");

/// `(file name, contents)` for every shipped fixture.
pub const ALL: [(&str, &str); 6] = [
    ("nodal.jet", NODAL),
    ("nongorenstein.jet", NONGORENSTEIN),
    ("taylor.jet", TAYLOR),
    ("taylor_nu1.jet", TAYLOR_NU1),
    ("taylor_nu2.jet", TAYLOR_NU2),
    ("taylor_nu3.jet", TAYLOR_NU3),
];
