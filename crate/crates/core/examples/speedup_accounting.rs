//! Speedup arithmetic: the published timings and a single-dimension grid.

use std::collections::BTreeMap;

use dimsel::selector::{
    speedup_report, GridEntry, GridSearchResult, MetricSource, SelectionReport, SpeedupReport,
};

fn main() -> dimsel::Result<()> {
    // Minutes: grid total vs one 1,000-dim training plus PCA.
    let text8 = SpeedupReport::from_totals(&[1724.0, 22.0], 22801.0);
    let wiki = SpeedupReport::from_totals(&[10448.0, 34.0], 132652.0);
    println!("Text8:         {:.2} -> {}", text8.speedup, text8.label());
    println!("WikiText-103:  {:.2} -> {}", wiki.speedup, wiki.label());

    // A grid of exactly the upper bound costs one training, so the ratio
    // falls just below one by the PCA and sweep overhead.
    let timings = BTreeMap::from([
        ("train".to_owned(), 600.0),
        ("pca".to_owned(), 4.0),
        ("sweep".to_owned(), 1.0),
    ]);
    let report = SelectionReport {
        selected_d: 120,
        upper_bound: 200,
        vocab_size: 10_000,
        embedding_params: 1_200_000,
        lambda: 0.01,
        task: "similarity:example".into(),
        seed: 1,
        selected_metric: 50.0,
        full_metric: 49.0,
        retrained_metric: None,
        metric_source: MetricSource::Truncated,
        records: Vec::new(),
        timings,
        baseline: None,
    };
    let grid = GridSearchResult::from_entries(vec![GridEntry {
        dim: 200,
        metric: 49.0,
        train_s: 600.0,
        eval_s: 0.0,
    }])?;
    let s = speedup_report(&report, &grid);
    println!(
        "degenerate grid: {:.1}s vs {:.1}s -> {:.4}",
        s.grid_total_s, s.ours_total_s, s.speedup
    );
    Ok(())
}
