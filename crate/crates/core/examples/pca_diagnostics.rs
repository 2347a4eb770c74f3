//! Fit PCA to a saved embedding and print how variance and coefficient
//! magnitude fall off across principal directions.
//!
//! ```bash
//! cargo run --release -p dimsel --example pca_diagnostics -- out/embedding_200.vec
//! cargo run --release -p dimsel --example pca_diagnostics -- out/embedding_200.vec centered
//! ```

use std::env;

use dimsel::embedding::load_embedding;
use dimsel::pca::{fit_pca, PcaMode};

fn main() -> dimsel::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let Some(path) = args.first() else {
        eprintln!("usage: pca_diagnostics <embedding.vec> [uncentered|centered]");
        std::process::exit(2);
    };
    let mode = match args.get(1).map(String::as_str) {
        Some("centered") => PcaMode::Centered,
        _ => PcaMode::Uncentered,
    };

    let (emb, _) = load_embedding(path)?;
    let model = fit_pca(&emb, mode)?;
    let report = model.explained_variance_report()?;
    let profile = model.coefficient_mean_profile();
    let n = model.dims();

    println!("{mode:?} PCA of {} x {n}", model.rows());
    if report.spread_is_infinite {
        println!("first/last variance spread: infinite (rank deficient)");
    } else {
        println!("first/last variance spread: {:.1}", report.spread);
    }
    println!(
        "top/bottom quartile variance ratio: {:.2}",
        report.quartile_ratio()
    );

    let mut cumulative = 0.0;
    println!(
        "{:>5}{:>12}{:>12}{:>14}",
        "k", "ratio", "cumulative", "mean |coef|"
    );
    for k in 0..n {
        cumulative += report.ratios[k];
        if k < 10 || (k + 1) % (n / 10).max(1) == 0 {
            println!(
                "{:>5}{:>12.5}{:>12.4}{:>14.5}",
                k + 1,
                report.ratios[k],
                cumulative,
                profile[k]
            );
        }
    }
    Ok(())
}
