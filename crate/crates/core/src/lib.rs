pub mod aharoni;
pub mod combinators;
pub mod covers;
pub mod cubohedron;
pub mod embed;
pub mod error;
pub mod gen;
pub mod geometry;
pub mod invlim;
pub mod maps;
pub mod modulus;
pub mod quotient;
pub mod scalar;
pub mod sequence;
pub mod space;

pub use combinators::ProductNorm;
pub use covers::{Cover, FundamentalSequence, RefinementVerdict};
pub use error::{Error, Result};
pub use maps::{PartialMap, TotalMap};
pub use modulus::{ModulusRow, ModulusTable};
pub use quotient::{ChainLength, ChainMetric, Surjection};
pub use scalar::{q, Extended, Scalar};
pub use sequence::SequencePoint;
pub use space::{check_metric_axioms, Axiom, AxiomReport, FiniteMetricSpace, Violation};
