//! Morphological segmentation toolkit for English derivatives.
//!
//! The crate provides two segmenters over a shared WordPiece vocabulary —
//! greedy longest-match WordPiece ([`wordpiece`]) and an iterative
//! affix-removal derivational segmenter ([`derivational`]) — together with
//! the machinery to put them to work: weakly-supervised dataset construction
//! from labeled corpora ([`corpus`]), a linear probe over segmentation-derived
//! features ([`probe`]), and a battery of segmentation-quality analyses
//! ([`analysis`]).
//!
//! All randomness is seeded and all container iteration is order-stable, so
//! every pipeline stage is deterministic across runs and platforms. With the
//! default `parallel` feature the batch entry points fan out over a rayon
//! pool; without it they run sequentially with identical results.

pub mod analysis;
pub mod corpus;
pub mod derivational;
pub mod error;
pub mod io;
pub mod parallel;
pub mod probe;
pub mod stats;
pub mod vocab;
pub mod wordpiece;

pub use error::{Error, Result};
pub use vocab::{build_stem_set, AffixInventory, StemSet, Vocabulary};
