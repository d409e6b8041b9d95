//! Shift spaces of ultragraphs: vertex-set algebra, path spaces, the
//! embedding metric, and Li–Yorke chaos analysis.

pub mod bits;
pub mod certify;
pub mod chaos;
pub mod cli;
pub mod closed_paths;
pub mod dsl;
pub mod emitters;
pub mod enumeration;
pub mod error;
pub mod index_set;
pub mod lattice;
pub mod metric;
pub mod path;
pub mod scrambled;
pub mod ultragraph;
pub mod vertex_set;

pub use error::{Error, Result};
pub use index_set::{Cardinality, IndexSet};
pub use ultragraph::{EdgeId, Ultragraph};
pub use vertex_set::{VertexId, VertexSet};
