//! Count a corpus, then show what the trainer will see: the most frequent
//! words, their subsampling keep probabilities and noise-sampling mass.
//!
//! ```bash
//! cargo run --release -p dimsel --example build_vocab -- data/enwiki_slice.txt 5 vocab.tsv
//! ```

use std::env;

use dimsel::corpus::{
    build_vocabulary, encode, keep_probability, tokenize_file, NoiseTable, DEFAULT_NOISE_POWER,
    DEFAULT_NOISE_RESOLUTION, DEFAULT_SUBSAMPLE,
};

fn main() -> dimsel::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let corpus = args.first().map_or("data/enwiki_slice.txt", String::as_str);
    let min_count: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);

    let tokens = tokenize_file(corpus, true)?;
    let vocab = build_vocabulary(&tokens, min_count, None)?;
    let (ids, stats) = encode(&tokens, &vocab, None);
    println!(
        "{} tokens -> {} kept, {} out of vocabulary; {} types with count >= {min_count}",
        tokens.len(),
        ids.len(),
        stats.oov_dropped,
        vocab.len()
    );

    let noise = NoiseTable::new(&vocab, DEFAULT_NOISE_POWER, DEFAULT_NOISE_RESOLUTION)?;
    println!(
        "{:<14}{:>9}{:>10}{:>10}",
        "word", "count", "p_keep", "p_noise"
    );
    let shown: Vec<usize> = (0..10)
        .chain([100, 1000, vocab.len() - 1])
        .filter(|&i| i < vocab.len())
        .collect();
    for id in shown {
        println!(
            "{:<14}{:>9}{:>10.4}{:>10.6}",
            vocab.token(id),
            vocab.count(id),
            keep_probability(vocab.count(id), vocab.total_count(), DEFAULT_SUBSAMPLE),
            noise.probability(id)
        );
    }

    if let Some(path) = args.get(2) {
        vocab.save(path)?;
        println!("wrote {path}");
    }
    Ok(())
}
