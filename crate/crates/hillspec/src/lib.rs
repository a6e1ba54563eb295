//! Command-line campaigns over `hillspec-core` with strict JSON
//! configuration and content-addressed result directories.
//!
//! Every campaign is a pure function of its configuration. Work items run
//! on the ambient rayon pool but are collected in a fixed order, and
//! [`campaign::Outcome::persist`] writes the results atomically.

pub mod cache;
pub mod campaign;
pub mod config;
pub mod error;
pub mod formats;

pub use campaign::{run, Check, Command, Outcome};
pub use config::CampaignConfig;
pub use error::{ExitStatus, HarnessError, Result};
