//! Manufactured-solution convergence studies, the Hartmann channel benchmark,
//! error norms and CSV reports.

pub mod cases;
pub mod errors;
pub mod report;
pub mod study;

pub use cases::{ExactSolution, HartmannCase, ManufacturedCase};
pub use errors::{compute_errors, interpolate_exact, ErrorReport};
pub use report::{
    cell_samples, format_table, read_report, write_cell_samples, write_profile, write_report, CellSample, ReportRow,
};
pub use study::{convergence_study, rate, run_hartmann, ConvergenceTable, HartmannResult, ProfileSample, Rates};
