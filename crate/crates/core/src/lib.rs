//! Equilibria, linear stability, trajectories and zero-velocity curves of
//! the planar restricted three-body problem with a radiating, drag-inducing
//! larger primary, an oblate smaller primary and a circumbinary belt.
//!
//! Quantities are dimensionless: unit separation, unit total mass, and the
//! frame rotates with mean motion `n`.

pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod exec;
pub mod model;
pub mod presets;
pub mod stability;
pub mod zvc;

pub use dynamics::{
    drift_report, integrate, integrate_with, DriftReport, IntegrateOptions, Trajectory,
};
pub use equilibria::{find_all, find_family, EquilibriumPoint, Family, SeedMode};
pub use error::{Error, Primary, Result};
pub use exec::Exec;
pub use model::{derive_params, ModelInputs, ModelParams, PhaseState};
pub use stability::{classify, routh_boundary, stability_report, StabilityClass, StabilityReport};
pub use zvc::{
    extract_contours, oval_classification, sample_grid, BBox, ContourSet, FieldGrid, OvalClass,
};
