pub mod control;
pub mod error;
pub mod linalg;
pub mod ltl;
pub mod network;
pub mod planner;
pub mod protocol;
pub mod scalar;
pub mod sim;

pub use scalar::{Scalar, Vec2};

/// Double-precision forms of the generic types.
pub type ControlParams = control::ControlParams<f64>;
pub type EpsilonBounds = control::EpsilonBounds<f64>;
pub type Mode = control::Mode<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type Point = Vec2<f64>;

/// Single-precision forms of the generic types.
pub mod f32 {
    pub type ControlParams = crate::control::ControlParams<f32>;
    pub type EpsilonBounds = crate::control::EpsilonBounds<f32>;
    pub type Mode = crate::control::Mode<f32>;
    pub type Matrix = crate::linalg::Matrix<f32>;
    pub type Point = crate::Vec2<f32>;
}
