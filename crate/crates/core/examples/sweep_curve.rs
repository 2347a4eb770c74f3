//! Print the truncation sweep of one trained embedding.
//!
//! ```bash
//! cargo run --release -p dimsel --example sweep_curve -- data/enwiki_slice.txt data/wordsim353.tsv 200 16 1
//! ```

use std::env;

use dimsel::corpus::{build_vocabulary, encode, tokenize_file};
use dimsel::eval::{evaluate_similarity_sweep, load_similarity};
use dimsel::pca::{fit_pca, PcaMode};
use dimsel::sgns::{train, TrainConfig};

fn main() -> dimsel::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_owned());
    let tokens = tokenize_file(arg(0, "data/enwiki_slice.txt"), true)?;
    let bench = load_similarity(arg(1, "data/wordsim353.tsv"))?.lowercased();
    let n: usize = arg(2, "200").parse().expect("upper bound");
    let epochs: usize = arg(3, "16").parse().expect("epochs");
    let seed: u64 = arg(4, "1").parse().expect("seed");

    let vocab = build_vocabulary(&tokens, 5, None)?;
    let (ids, _) = encode(&tokens, &vocab, None);
    let config = TrainConfig {
        dim: n,
        epochs,
        seed,
        ..TrainConfig::default()
    };
    let out = train(&ids, &vocab, &config, None)?;
    let model = fit_pca(&out.embedding, PcaMode::Uncentered)?;
    let report = model.explained_variance_report()?;
    println!(
        "spread first/last {:.1}, top/bottom quartile {:.2}",
        report.spread,
        report.quartile_ratio()
    );
    let sweep = evaluate_similarity_sweep(&model, &vocab, &bench)?;
    for p in sweep.iter().rev() {
        if p.d <= 20 || p.d % 10 == 0 {
            println!("d={:<4} metric {:>7.3}", p.d, p.metric);
        }
    }
    Ok(())
}
