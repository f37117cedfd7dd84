//! Exact graph-complex computations for the rational homology and homotopy
//! of spaces of long embeddings `R^m -> R^n`.

mod canon;

pub mod exactq;
pub mod graphs;
pub mod tables;
pub mod complex_e;
pub mod symfunc;
pub mod genfunc;
pub mod complex_hh;
pub mod emb;
pub mod cache;
pub mod known;
pub mod verify;
