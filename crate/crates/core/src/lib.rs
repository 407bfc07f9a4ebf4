//! Sentiment orientation of words from a sentiment axis discovered in a
//! word-embedding space.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`corpus`] loads POS-tagged corpora, labeled review sets and polarity
//!    lexicons.
//! 2. [`embedding`] trains skip-gram negative-sampling vectors (or loads
//!    externally trained ones) and provides cosine geometry.
//! 3. [`pattern`] extracts two-word phrases with POS-tag rules and selects the
//!    modifier "point words" that anchor the sentiment axis.
//! 4. [`axis`] splits the point words into two polarity sets (by the first
//!    principal component of their distance matrix, or by an external
//!    lexicon), averages each set into a reference vector, orients the pair
//!    with a seed word and scores every vocabulary word.
//! 5. [`eval`] classifies reviews by the mean orientation of their tokens and
//!    compares against the local PMI-IR baseline in [`pmi`].
//!
//! [`pipeline`] wires the stages together for the command-line tool.

pub mod axis;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod pattern;
pub mod pipeline;
pub mod pmi;

pub use error::{Error, Result};
