//! Distributed mirror descent and multiplicative weights for subnetwork
//! zero-sum games.
//!
//! Two groups of agents play a zero-sum game. Each agent mixes its state
//! with its own group over a time-varying network, estimates the opposing
//! group through cross-network links, and takes a mirror (proximal) step.
//! The crate simulates these dynamics and measures regret, consensus
//! errors, gaps and distances to a certified equilibrium. It also
//! evaluates the theoretical bounds those measurements are held against.
//!
//! ```no_run
//! use subzero::experiments::{preset, run_config};
//!
//! let cfg = preset("interdiction-desk").unwrap();
//! let outcome = run_config(&cfg, None)?;
//! println!("{}", outcome.summary());
//! # Ok::<(), subzero::Error>(())
//! ```

pub mod engine;
pub mod error;
pub mod experiments;
pub mod game;
pub mod geometry;
pub mod network;
pub mod oracles;

pub use error::{Error, Result};
