//! The approximate determinant method.

pub mod params;
pub mod pipeline;
pub mod simplex;

pub use params::{alpha_for, dm_parameters, DMParameters};
pub use pipeline::{
    assign_boxes, calibrate_m0, cover_boxes, fit_auxiliary_form, run_pipeline, AuxiliaryForm, BoxCover, Chart,
    Classification, PipelineConfig, PipelineReport,
};
pub use simplex::{simplex_stats, SimplexSpec, SimplexStats};
