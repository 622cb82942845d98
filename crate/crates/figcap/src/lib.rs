//! Batch tooling around [`figcap_core`]: JSON Lines corpus IO, an external
//! chat-completion refiner with rule-based fallback, score reporting, and
//! the `figcap` command-line interface.
//!
//! Every command reads and writes JSON Lines files so runs compose on disk;
//! outputs are written in input order regardless of worker scheduling.

pub mod cli;
pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod formats;
pub mod jsonl;
pub mod refiner;
pub mod report;

pub use error::{Error, Result};
