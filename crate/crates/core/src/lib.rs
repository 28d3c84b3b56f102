//! Distance distributions of measurable subsets of spheres and of products of
//! spheres.
//!
//! The crate estimates the cumulative distance measure
//! `St_A(ℓ) = ∫_A ∫_A H(ℓ − d(x, y)) dx dy` of regions `A`, compares such
//! measures with distribution-free tolerances, and implements the ball-swap
//! construction under which `St_A − St_Ā` is invariant. The `verify` module
//! turns the resulting identities into reproducible pass/fail checks.

pub mod distribution;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod region;
pub mod rng;
pub mod run;
pub mod swap;
pub mod syntax;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    angle_from_chord, angular_distance, bisector_reflect, chord_from_angle, euclidean_distance,
    product_distance, sample_uniform, Combiner, Metric, ProductPoint, Rotation, SpaceSpec,
    SpherePoint,
};
pub use region::{MeasureEstimate, Region};
