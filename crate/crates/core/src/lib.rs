//! Tools for metrics of the form dt^2 + A1(t)^2 (e1)^2 + A2(t)^2 ((e2)^2 + (e3)^2)
//! on an interval times a homogeneous 3-sphere, where the profile derivatives
//! are quadratic in the ratio x = A1/A2.
//!
//! The crate splits into exact symbolic layers (`rational`, `laurent`, `family`)
//! and floating-point layers (`frame`, `catalog`, `dynamics`). The symbolic side
//! decides which parameter sets give Ricci-flat or Einstein metrics; the numeric
//! side verifies closed forms, integrates the flow and fits asymptotic models.

pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod family;
pub mod frame;
pub mod laurent;
pub mod rational;

pub use error::Error;
pub use family::ParamSet;
pub use frame::{JetPoint, RicciValues};
pub use laurent::LaurentPoly;
pub use rational::Rational;
