//! Standard-library companion to [`geneo_core`]: CSV and JSON formats, a
//! small SVG writer, and the parallel Monte Carlo experiments behind the
//! `geneo` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod io;
pub mod svg;

pub use error::{Error, Result};
pub use geneo_core as core;
