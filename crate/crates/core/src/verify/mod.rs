//! Independent checks of the greedy decomposition.

pub mod check;
pub mod gen;
pub mod interval;
pub mod lp;
pub mod oracle;

pub use check::{check_decomposition, CheckError, CheckReport};
pub use gen::{gen_instance, gen_path_instance};
pub use interval::interval_ucat;
pub use oracle::{feasible_with_modes, ucat_oracle, FeasibilityCertificate, OracleError};
