//! Command-line pipeline and read-only analysis service.

pub mod api;
pub mod commands;
pub mod export;
pub mod serve;
