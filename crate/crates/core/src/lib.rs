//! Choose the dimensionality of word embeddings from a single wide
//! training run.
//!
//! The pipeline trains one skip-gram embedding with a generous number of
//! dimensions `N`, rotates it onto its principal directions, and removes
//! the weakest direction one at a time while scoring a word-similarity or
//! analogy benchmark. A score that trades metric against size picks the
//! dimensionality; a grid search over separately trained embeddings is
//! available as a baseline.
//!
//! ```no_run
//! use dimsel::corpus::{build_vocabulary, encode, tokenize_file};
//! use dimsel::eval::load_similarity;
//! use dimsel::selector::{ScoreParams, Selector, Task};
//! use dimsel::sgns::TrainConfig;
//!
//! # fn main() -> dimsel::Result<()> {
//! let tokens = tokenize_file("data/enwiki_slice.txt", true)?;
//! let vocab = build_vocabulary(&tokens, 5, None)?;
//! let (ids, _) = encode(&tokens, &vocab, None);
//! let bench = load_similarity("data/wordsim353.tsv")?.lowercased();
//!
//! let train = TrainConfig { epochs: 5, ..TrainConfig::default() };
//! let selector = Selector::new(&ids, &vocab, Task::Similarity(&bench), train);
//! let outcome = selector.run_selection(200, ScoreParams::default(), false)?;
//! println!("selected d = {}", outcome.report.selected_d);
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod pca;
pub mod selector;
pub mod sgns;

pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
