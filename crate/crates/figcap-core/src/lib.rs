//! Core algorithms for figure-caption corpus tooling.
//!
//! This crate carries the pure, deterministic half of the pipeline:
//!
//! - [`text`]: tokenization and n-gram multisets shared by every metric
//! - [`metrics`]: ROUGE-N (precision/recall/F1), normalized ROUGE variants,
//!   and smoothed sentence-level BLEU-4
//! - [`ranking`]: length-normalized sequence log-probabilities, pairwise
//!   margin ranking loss over metric-ordered candidates, and the combined
//!   multitask loss
//! - [`fusion`]: consensus selection among candidate captions by mean
//!   pairwise similarity
//! - [`refine`]: figure/table reference mining, sentence-level paragraph
//!   refinement, OCR merge policies, and model-input assembly
//!
//! Everything here is a pure function over immutable inputs and is safe to
//! call concurrently without coordination. The crate is `no_std`-compatible
//! (`alloc` required); the default `std` feature switches float math to the
//! standard-library intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod fusion;
pub mod metrics;
pub mod ranking;
pub mod refine;
pub mod text;

pub use error::{Error, Result};
