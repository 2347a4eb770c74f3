//! The whole method in one call: train at an upper bound, sweep every
//! truncation, pick the best-scoring dimensionality and retrain there.
//!
//! ```bash
//! cargo run --release -p dimsel --example select_dimension -- data/enwiki_slice.txt data/wordsim353.tsv 200 0.01
//! ```

use std::env;

use dimsel::corpus::{build_vocabulary, encode, tokenize_file};
use dimsel::eval::load_similarity;
use dimsel::selector::{ScoreParams, Selector, Task};
use dimsel::sgns::TrainConfig;

fn main() -> dimsel::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let corpus = args.first().map_or("data/enwiki_slice.txt", String::as_str);
    let bench = args.get(1).map_or("data/wordsim353.tsv", String::as_str);
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(200);
    let lambda: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.01);

    let tokens = tokenize_file(corpus, true)?;
    let vocab = build_vocabulary(&tokens, 5, None)?;
    let (ids, _) = encode(&tokens, &vocab, None);
    let bench = load_similarity(bench)?.lowercased();

    let train = TrainConfig {
        epochs: 16,
        ..TrainConfig::default()
    };
    let selector = Selector::new(&ids, &vocab, Task::Similarity(&bench), train);
    let outcome = selector.run_selection(n, ScoreParams::new(lambda)?, true)?;
    print!("{}", outcome.report.summary());

    // The five best scores, to show how flat the top of the curve is.
    let mut records = outcome.report.records.clone();
    records.retain(|r| !r.score.is_nan());
    records.sort_by(|a, b| b.score.total_cmp(&a.score));
    for r in records.iter().take(5) {
        println!(
            "d={:<4} metric {:>7.3} score {:>7.3}",
            r.d, r.metric, r.score
        );
    }
    Ok(())
}
