//! Scripted reproductions: the Case I ARL grid, the Case II masking trace
//! and the profile-monitoring identity.

pub mod masking;
pub mod output;
pub mod profile;
pub mod table1;

pub use masking::{MaskingDemo, MaskingOutput, MaskingSummary};
pub use profile::{
    equivalence_check, profile_deviation, profile_equivalence_trials, Equivalence, EquivalenceReport, ProfileModel,
};
pub use table1::{reproduce_table1, CellIndex, ChartColumn, Table1Cell, CHART_COLUMNS, REFERENCE_ARL};
