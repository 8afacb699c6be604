//! Static cost modelling for compiled and interpreted code.
//!
//! The crate turns per-function instruction counts into four raw cost totals
//! (compute units, energy in joules, CO2 in kilograms, monetary cost in USD),
//! normalizes them across a cohort, and folds them into a single weighted
//! composite from which an efficiency score, letter grade, and rating are
//! derived. Text parsers for LLVM IR and PTX produce the counts; the
//! validation module hosts the simulation and sensitivity studies used to
//! check the model against baselines.
//!
//! Everything here is deterministic: identical inputs (including RNG seeds)
//! produce identical outputs, bit for bit.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod classify;
pub mod cost;
pub mod counts;
mod error;
mod fmath;
pub mod llvm;
pub mod ptx;
pub mod report;
pub mod score;
pub mod stats;
pub mod validate;

pub use error::Error;
