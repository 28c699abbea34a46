//! Cross-language data-flow analysis for Java code that hands data to C/C++
//! through JNI, looking for paths that end in unchecked buffer accesses.
//!
//! The pipeline runs in six phases over srcML XML ASTs:
//!
//! 1. [`ast`]: read srcML archives into [`ast::AstUnit`]s
//! 2. [`symbols`]: collect classes, structs, fields and functions
//! 3. [`slicer`]: build a slice profile for every variable
//! 4. [`dataflow`]: link profiles into a graph, across the JNI boundary
//! 5. [`source_sink`]: mark sources and sinks, find source-to-sink paths
//! 6. [`buffer`]: decide whether each sink is bound-checked
//!
//! [`report::run`] drives all of them from an [`report::AnalysisConfig`].

pub mod ast;
pub mod buffer;
pub mod dataflow;
pub mod diagnostics;
pub mod error;
pub mod report;
pub mod slicer;
pub mod source_sink;
pub mod symbols;

pub use error::{Error, Result};
