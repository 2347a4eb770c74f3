//! Train a skip-gram embedding on a text corpus and score it on a
//! similarity benchmark.
//!
//! ```bash
//! cargo run --release -p dimsel --example train_sgns -- data/enwiki_slice.txt data/wordsim353.tsv 100 5
//! ```

use std::env;

use dimsel::corpus::{build_vocabulary, encode, tokenize_file};
use dimsel::eval::{evaluate_similarity, load_similarity};
use dimsel::sgns::{train, TrainConfig};

fn main() -> dimsel::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let corpus = args.first().map_or("data/enwiki_slice.txt", String::as_str);
    let bench = args.get(1).map_or("data/wordsim353.tsv", String::as_str);
    let dim = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let epochs = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(5);

    let tokens = tokenize_file(corpus, true)?;
    let vocab = build_vocabulary(&tokens, 5, None)?;
    let (ids, stats) = encode(&tokens, &vocab, None);
    println!(
        "{} tokens, vocabulary {}, {} out-of-vocabulary dropped",
        tokens.len(),
        vocab.len(),
        stats.oov_dropped
    );
    let bench = load_similarity(bench)?.lowercased();

    let config = TrainConfig {
        dim,
        epochs,
        eval_every: 1,
        ..TrainConfig::default()
    };
    let metric =
        |e: &dimsel::EmbeddingMatrix| evaluate_similarity(e, &vocab, &bench).map(|r| r.metric);
    let out = train(&ids, &vocab, &config, Some(&metric))?;
    for e in &out.log.entries {
        println!(
            "epoch {:>3}  lr {:.6}  metric {:>7.3}  {:.1}s",
            e.epoch,
            e.lr,
            e.metric.unwrap_or(f64::NAN),
            e.elapsed_s
        );
    }
    println!(
        "best epoch {} ({:?}), {:.1}s total",
        out.best_epoch, out.best_metric, out.seconds
    );
    Ok(())
}
