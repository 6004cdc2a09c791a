//! Scenario files, the expression language, rendering and the command line.

pub mod cli;
pub mod fixtures;
pub mod parser;
pub mod render;
pub mod scenario;

pub use parser::{parse_expression, parse_polynomial, Names};
pub use render::{render_polynomial, render_tensor};
pub use scenario::{parse_scenario, Scenario};
pub use cli::run_cli;
