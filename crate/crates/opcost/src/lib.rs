//! Command-line analyzer built on the cost-model core.

pub mod app;
pub mod config;
pub mod discover;
pub mod error;
pub mod python;
pub mod render;
pub mod study;
pub mod table;

pub use error::AppError;
