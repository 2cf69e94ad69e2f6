//! Generalized Walsh (Chrestenson) system of order `a` on `[0, 1)`.

pub mod adic;
pub mod cli;
pub mod correction;
pub mod dictionary;
pub mod error;
pub mod generate;
pub mod greedy;
pub mod io;
pub mod selftest;
pub mod walsh;

pub use adic::{AdicInterval, CellSet, Config, Measure, Norm, StepFunction};
pub use error::{Error, Result};
pub use walsh::{analyze, synthesize, AdicPoint, Method, Spectrum, UnitPhase};
