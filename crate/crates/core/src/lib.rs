//! Simulation and braid synthesis for SU(2)_k anyon systems.
//!
//! The crate is `no_std` (it needs `alloc`). It covers, bottom-up:
//!
//! * [`model`]: charges, fusion rules and quantum dimensions of SU(2)_k.
//! * [`symbols`]: F (quantum 6j) and R symbols, plus pentagon/hexagon checks.
//! * [`fusion`]: left-comb fusion-tree bases and elementary braid matrices.
//! * [`grouping`]: composite anyons, regrouped bases and block exchanges.
//! * [`code`]: dense and sparse qubit encodings and leakage measures.
//! * [`braid`], [`target`], [`search`]: braid words, synthesis targets and
//!   exhaustive, deterministic braid search.
//! * [`assembly`]: controlled-phase, controlled-controlled-phase and
//!   register conversion gates built from synthesized braids.
#![no_std]

extern crate alloc;

pub mod assembly;
pub mod braid;
pub mod code;
pub mod error;
pub mod fusion;
pub mod grouping;
pub mod linalg;
pub mod model;
pub mod search;
pub mod symbols;
pub mod target;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use model::{AnyonModel, Charge};
