//! Rotationally symmetric candidate-solution families for overdetermined
//! elliptic problems `Δu + f(u) = 0` on the round 2-sphere, and the traceless
//! Hessian-difference form `Q` measuring how far a solution is from the family.

pub mod cli;
pub mod eigen;
pub mod error;
pub mod family;
pub mod interp;
pub mod lemmas;
pub mod nonlinearity;
pub mod qform;
pub mod radial;
pub mod sphere;

pub use error::{Error, Result};
pub use nonlinearity::{check_hypothesis_h, HypothesisReport, Nonlinearity};
