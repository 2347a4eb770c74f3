//! Run the selection from several upper bounds and compare the picks.
//!
//! ```bash
//! cargo run --release -p dimsel --example upper_bound_consistency -- data/enwiki_slice.txt data/wordsim353.tsv 100,150,200
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
    let bounds: Vec<usize> = args
        .get(2)
        .map_or("150,200", String::as_str)
        .split(',')
        .map(|s| s.trim().parse().expect("upper bound"))
        .collect();

    let tokens = tokenize_file(corpus, true)?;
    let vocab = build_vocabulary(&tokens, 5, None)?;
    let (ids, _) = encode(&tokens, &vocab, None);
    let bench = load_similarity(bench)?.lowercased();

    let train = TrainConfig {
        epochs: 16,
        ..TrainConfig::default()
    };
    let selector = Selector::new(&ids, &vocab, Task::Similarity(&bench), train);
    let check = selector.consistency_check(&bounds, ScoreParams::new(0.0)?)?;
    for r in &check.reports {
        println!(
            "N={:<4} selected d={:<4} metric {:.3} (full {:.3})",
            r.upper_bound, r.selected_d, r.selected_metric, r.full_metric
        );
    }
    println!("spread: {}", check.spread);
    Ok(())
}
