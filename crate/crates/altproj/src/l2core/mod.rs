//! Ground types for truncated l2 computation: symbolic index sets,
//! closed-form sequence generators, and tail-certified vectors.

mod generator;
mod indexset;
mod seqvec;

pub use generator::{EventualSign, Family, GeneratorDesc, Parity, SignPattern, Term};
pub use indexset::{Base, IndexSet};
pub use seqvec::SeqVec;

pub(crate) use seqvec::dot;
