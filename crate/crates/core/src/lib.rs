//! Pseudo eye-tracking from picture-description speech.
//!
//! Timed words are aligned to circular areas of interest (AOIs) on the
//! picture prompt, turned into a scanpath of pseudo-fixations, summarized
//! into a fixed 68-value feature vector and classified with a regularized
//! logistic regression under speaker-independent cross-validation.
//!
//! This crate is `no_std` (it needs `alloc`) and performs no IO. File
//! formats, rendering and the command line live in the `attnpath` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod classifier;
pub mod error;
pub mod features;
pub mod heatmap;
pub mod linalg;
pub mod pca;
pub mod registry;
pub mod rng;
pub mod scanpath;
pub mod stats;
pub mod synth;
pub mod token;

pub use error::{Error, Result};
pub use features::{FeatureMask, FeatureVector, FEATURE_DIM};
pub use registry::{Aoi, AoiRegistry};
pub use scanpath::{Fixation, Scanpath};
pub use token::{Label, SessionRecord, WordToken};
