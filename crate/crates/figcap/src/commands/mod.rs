//! Subcommand implementations. Each takes the resolved configuration and its
//! parsed arguments; CLI wiring lives in `cli`.

pub mod fuse;
pub mod ingest;
pub mod rank;
pub mod refine;
pub mod report;
pub mod score;
