//! Fuzzy concept-lattice indexing and flexible querying of XML documents.

pub mod cli;
pub mod context;
pub mod contextualize;
pub mod error;
pub mod export;
pub mod fuzzy;
pub mod index;
pub mod lattice;
pub mod query;
pub mod weighting;
pub mod xml;

pub use context::{FuzzySet, LContext, Universe};
pub use error::{Error, Result};
pub use fuzzy::{Implication, SNorm};
pub use index::{IndexBundle, IndexConfig, IndexSettings};
pub use lattice::{enumerate_concepts, ConceptLattice, FuzzyConcept};
pub use xml::{extract_levels, DocumentTree, LevelSets};
