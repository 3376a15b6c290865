//! Influence zones of continuous steel beams.
//!
//! The crate analyses continuous beams on simple supports with exact
//! Timoshenko elements, builds the critical variable-load arrangements
//! (flexural and shear-induced) a priori, sizes members against a UKB
//! catalog with ULS cross-section checks, and measures how many neighbouring
//! spans on either side of a beam are needed to recover its design
//! utilisation within an error threshold.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod arrangements;
pub mod catalog;
pub mod cli;
pub mod dataset;
pub mod design;
pub mod error;
pub mod model;
pub mod report;
pub mod solver;
pub mod zone;

pub use arrangements::{critical_set, flexural_set, naive_set, shear_set, shear_transform, ArrangementSet, SetKind};
pub use catalog::{SectionCatalog, SteelSection};
pub use design::{design_system, DesignResult, Resistances};
pub use error::{Error, Result};
pub use model::{factored_udl, validate_system, BeamSystem, LoadArrangement, LoadCombination, Material};
pub use solver::{response_table, response_tables, solve, ResponseTable, StationGrid};
pub use zone::{captured_curve, extract_k_max, zone_statistics, CapturedCurve, ZoneResult};
