//! Score a word2vec text embedding on a similarity set and an analogy set.
//!
//! ```bash
//! cargo run --release -p dimsel --example evaluate_embedding -- \
//!     out/embedding_200.vec data/wordsim353.tsv data/questions-words.txt
//! ```

use std::env;

use dimsel::embedding::load_embedding;
use dimsel::eval::{evaluate_analogy, evaluate_similarity, load_analogy, load_similarity};

fn main() -> dimsel::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let Some(path) = args.first() else {
        eprintln!("usage: evaluate_embedding <embedding.vec> [similarity.tsv] [questions.txt]");
        std::process::exit(2);
    };
    let sim = args.get(1).map_or("data/wordsim353.tsv", String::as_str);
    let ana = args
        .get(2)
        .map_or("data/questions-words.txt", String::as_str);

    let (emb, vocab) = load_embedding(path)?;
    println!("{} words x {} dims", emb.rows(), emb.cols());

    let bench = load_similarity(sim)?.lowercased();
    let r = evaluate_similarity(&emb, &vocab, &bench)?;
    println!(
        "{}: Spearman x100 = {:.2} ({} pairs, {} skipped, {} duplicated)",
        bench.name,
        r.metric,
        r.covered,
        r.skipped,
        bench.duplicate_count()
    );

    let questions = load_analogy(ana)?.lowercased();
    let r = evaluate_analogy(&emb, &vocab, &questions, true)?;
    println!(
        "{}: accuracy {:.2}% ({} questions, {} skipped)",
        questions.name, r.metric, r.covered, r.skipped
    );
    Ok(())
}
