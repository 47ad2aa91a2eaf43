//! Command-line front end for `fracbdi`: every computation as a CSV or JSON
//! table with a manifest that regenerates it.

pub mod app;
pub mod config;
pub mod error;
pub mod grid;
pub mod manifest;
pub mod run;
pub mod table;
pub mod verify;

pub use app::run;
