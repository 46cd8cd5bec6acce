//! File formats, rendering and the command-line interface around
//! [`attnpath_core`].
//!
//! Everything here deals with text on disk: CTM word timings, session
//! manifests, AOI registries, age-of-acquisition and word-vector tables,
//! SVG scanpaths, PGM heatmaps, and the CSV/JSON artifacts of the `cv`,
//! `features` and `report` commands.

pub mod assets;
pub mod cli;
pub mod corpus;
pub mod ctm;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod output;
pub mod parallel;
pub mod pgm;
pub mod registry_io;
pub mod svg;
pub mod tables;

pub use attnpath_core as core;
pub use error::{Error, Result};
