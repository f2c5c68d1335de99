//! Bicycle kinematics: the bicycle equation and its monodromy, the Berry-phase and
//! planimeter formulas, bicycle correspondence and Zindler curves, the monodromy
//! integral hierarchy and the AKNS Darboux transform.

pub mod bike_dynamics;
pub mod correspondence;
pub mod curves;
pub mod diffpoly;
pub mod error;
pub mod integrable;
pub mod moebius_monodromy;
pub mod numerics;
pub mod ode;

pub use error::{GeoError, Result};
