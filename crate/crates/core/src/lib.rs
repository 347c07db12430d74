//! Billiard scattering in retroreflecting hollows.
//!
//! The crate builds planar hollows (rectangle, triangle, mushroom, tube,
//! double parabola, notched angle), traces billiard particles through them,
//! estimates the scattering measures they generate on the angle square
//! `(-π/2, π/2)²`, and evaluates retroreflectivity and resistance
//! functionals. Independent analytic models (unfolding parities, circle
//! rotations, the notched-angle symbolic dynamics) live in [`oracles`] and
//! are used to cross-check the geometric tracer.
//!
//! Angle conventions used throughout:
//! - `phi` is measured counterclockwise from the inward direction `-n` to the
//!   incoming velocity `v`, where `n` is the outer normal of the opening;
//! - `phi_plus` is measured counterclockwise from `n` to the outgoing
//!   velocity `v⁺`;
//! - `phi_plus == phi` is exact retroreflection (`v⁺ = -v`) and
//!   `phi_plus == -phi` is mirror reflection in the opening line.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hollows;
pub mod measures;
pub mod oracles;
pub mod resistance;
pub mod schedules;

pub use error::{Error, Result};
