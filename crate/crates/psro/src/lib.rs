//! Policy-space response oracles over normal-form games and K-player Kuhn poker.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod error;
pub mod experiments;
pub mod game;
pub mod graph;
pub mod kuhn;
pub mod metrics;
pub mod oracles;
pub mod psro;
pub mod scalar;
pub mod seeds;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Game = game::NormalFormGame<f64>;
pub type Profile = game::MixedProfile<f64>;
pub type Policy = kuhn::BehavioralPolicy<f64>;
