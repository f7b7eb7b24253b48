//! Stratification data for finite-dimensional algebras presented by quivers
//! with relations: normal-form bases, standard modules, heredity chains and
//! Ext/Tor certificates for the embedding of truncated module categories.

pub mod algebra;
pub mod error;
pub mod homological;
pub mod linalg;
pub mod module;
pub mod poly;
pub mod presentation;
pub mod rewriting;
pub mod scalar;
pub mod simples;
pub mod stratification;

pub use algebra::AlgebraTable;
pub use error::Error;
pub use module::{Module, ModuleMap, Side};
pub use presentation::{parse_presentation, Presentation};
pub use rewriting::{complete_rewriting, RewriteSystem};
pub use scalar::{Field, Scalar};
pub use simples::{radical_and_simples, SimpleList, SimpleModule};
