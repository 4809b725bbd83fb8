//! Catalog of worked spaces, brute-force oracles, file formats and the
//! replication suite behind the command-line tool.

pub mod catalog;
pub mod fdcheck;
pub mod io;
pub mod oracle;
pub mod suite;

pub use catalog::{catalog, CatalogEntry, KnownCriticalSet};
pub use fdcheck::{finite_difference_check, finite_difference_check_with};
pub use oracle::{is_morse_model, oracle_critical_set, CriticalComponent, CriticalSet, OracleConfig};
pub use suite::{run_paper_suite, Check, SuiteReport};
