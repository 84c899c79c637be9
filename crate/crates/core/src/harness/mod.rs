//! Scenario files, run artifacts, refinement studies and the property suites.

mod artifact;
mod converge;
pub mod oracle;
mod scenario;
pub mod verify;

pub use artifact::{execute, report_text, run, trajectory_csv, RunArtifact, VERSION};
pub use converge::{converge, oracle_error, ConvergenceRow, ConvergenceTable};
pub use scenario::{OutputBlock, PicardBlock, ProblemKind, Scenario, BUILTIN_EXAMPLE};
pub use verify::{acceptance, verify, CriterionReport, PropertyResult, Suite, SuiteReport, CRITERIA};
