//! Empirical checks of the boundedness inequalities on finite spaces.

pub mod checks;
pub mod family;
pub mod report;
pub mod suite;

pub use checks::{run_check, CheckId, Setup, SetupSpec};
pub use family::{TestFamily, VectorFamily};
pub use report::{exit_code, to_csv, to_json, InequalityReport, Status};
pub use suite::{run_suite, SuiteConfig};
