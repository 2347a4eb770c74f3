//! Select a dimensionality from one wide embedding, then check it against
//! a grid search over separately trained embeddings.
//!
//! ```bash
//! cargo run --release -p dimsel --example grid_search_compare -- \
//!     --corpus data/enwiki_slice.txt --benchmark data/wordsim353.tsv \
//!     --upper-bound 200 --epochs 16 --grid 25,50,75,100,150,200 \
//!     --analogy data/questions-words.txt
//! ```

use clap::Parser;

use dimsel::corpus::{build_vocabulary, encode, tokenize_file};
use dimsel::eval::{load_analogy, load_similarity};
use dimsel::selector::{compare_to_baseline, speedup_report, ScoreParams, Selector, Task};
use dimsel::sgns::TrainConfig;

#[derive(Parser)]
struct Args {
    #[arg(long, default_value = "data/enwiki_slice.txt")]
    corpus: String,
    #[arg(long, default_value = "data/wordsim353.tsv")]
    benchmark: String,
    #[arg(long, default_value_t = 200)]
    upper_bound: usize,
    #[arg(long, default_value_t = 16)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    min_count: u64,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "25,50,75,100,150,200")]
    grid: Vec<usize>,
    /// Analogy questions used to keep the best checkpoint during training.
    #[arg(long)]
    analogy: Option<String>,
    #[arg(long, default_value_t = 2)]
    eval_every: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Skip retraining at the selected dimensionality.
    #[arg(long)]
    no_retrain: bool,
}

fn main() -> dimsel::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();

    let tokens = tokenize_file(&args.corpus, true)?;
    let vocab = build_vocabulary(&tokens, args.min_count, None)?;
    let (ids, _) = encode(&tokens, &vocab, None);
    let bench = load_similarity(&args.benchmark)?.lowercased();

    let train = TrainConfig {
        epochs: args.epochs,
        seed: args.seed,
        eval_every: args.eval_every,
        threads: args.threads,
        ..TrainConfig::default()
    };
    let analogy = match &args.analogy {
        Some(p) => Some(load_analogy(p)?.lowercased()),
        None => None,
    };
    let mut selector = Selector::new(&ids, &vocab, Task::Similarity(&bench), train);
    if let Some(a) = &analogy {
        selector = selector.with_checkpoint(a);
    }
    let score = ScoreParams::new(args.lambda)?;
    let mut report = selector
        .run_selection(args.upper_bound, score, !args.no_retrain)?
        .report;
    let grid = selector.grid_search(&args.grid, None)?;
    for e in &grid.entries {
        println!(
            "grid d={:<4} metric {:>7.3}  {:.1}s",
            e.dim, e.metric, e.train_s
        );
    }
    let speedup = speedup_report(&report, &grid);
    report.baseline = Some(grid);
    let cmp = compare_to_baseline(&report)?;
    print!("{}", report.summary());
    println!(
        "|d - grid| = {}, relative = {:.1}%, speedup {}",
        cmp.distance_d,
        cmp.relative_performance,
        speedup.label()
    );
    Ok(())
}
