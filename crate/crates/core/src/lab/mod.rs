//! Simulation lab: the properness study over distorted versions of a known
//! true model, and the grid study of summary classification measures.

mod grid;
mod simulate;
mod study;
mod variants;

pub use grid::{
    average_ranks, classification_grid_study, grid_point, spearman_correlation, GridPoint,
    GridProfile, GridSpec, GridStudy, GRID_MEASURES,
};
pub use simulate::{generate_dataset, SimulatedDataset, SimulationSpec};
pub use study::{
    run_properness_study, MeasureSummary, PropernessStudy, StudyColumn, StudyThreshold,
};
pub use variants::{apply_variant, shrink_inflate, VariantContext, VariantId, VariantInput};
