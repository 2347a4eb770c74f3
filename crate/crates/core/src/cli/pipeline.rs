//! Stage runners shared by the subcommands.

use std::fmt::Display;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::cli::config::{RunConfig, TaskKind};
use crate::cli::plot::{emit_plot_data, PlotData};
use crate::corpus::{build_vocabulary, encode, tokenize_file, Vocabulary};
use crate::embedding::{save_embedding, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_analogy, load_analogy, load_similarity, AnalogyBenchmark, SimilarityBenchmark,
};
use crate::pca::fit_pca;
use crate::selector::{
    compare_to_baseline, speedup_report, ScoreParams, SelectionReport, Selector, Task,
};
use crate::sgns::{train, CheckpointMetric, TrainOutput};

/// Plain-text run log. Lines go to `log.txt` in the output directory and,
/// unless quiet, to stderr.
pub struct RunLog {
    file: Option<File>,
    quiet: bool,
}

impl RunLog {
    pub fn create(dir: &Path, quiet: bool) -> Result<Self> {
        let path = dir.join("log.txt");
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(RunLog {
            file: Some(file),
            quiet,
        })
    }

    /// A log that only writes to stderr.
    pub fn stderr(quiet: bool) -> Self {
        RunLog { file: None, quiet }
    }

    pub fn line(&mut self, msg: impl Display) {
        if let Some(f) = self.file.as_mut() {
            let _ = writeln!(f, "{msg}");
        }
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    /// Runs one named stage; a failure is logged with the stage name.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.line(format!("[{name}] start"));
        let t = Instant::now();
        match f(self) {
            Ok(v) => {
                self.line(format!(
                    "[{name}] done in {:.2}s",
                    t.elapsed().as_secs_f64()
                ));
                Ok(v)
            }
            Err(e) => {
                if let Some(f) = self.file.as_mut() {
                    let _ = writeln!(f, "[{name}] FAILED: {e}");
                }
                eprintln!("stage {name} failed: {e}");
                Err(e)
            }
        }
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Vocabulary (loaded or built) and the encoded corpus. The vocabulary is
/// written to `vocab.tsv`.
pub fn prepare_corpus(cfg: &RunConfig, log: &mut RunLog) -> Result<(Vocabulary, Vec<u32>)> {
    let corpus = cfg
        .corpus
        .as_ref()
        .ok_or_else(|| Error::Config("missing required `corpus`".into()))?;
    let tokens = tokenize_file(corpus, cfg.lowercase)?;
    let vocab = match &cfg.vocab {
        Some(p) => Vocabulary::load(p)?,
        None => build_vocabulary(&tokens, cfg.min_count, cfg.max_vocab)?,
    };
    let (ids, stats) = encode(&tokens, &vocab, None);
    if ids.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    log.line(format!(
        "{} tokens, {} types, {} out of vocabulary",
        tokens.len(),
        vocab.len(),
        stats.oov_dropped
    ));
    vocab.save(cfg.out_dir.join("vocab.tsv"))?;
    Ok((vocab, ids))
}

/// Benchmarks named by a config, lowercased when the corpus is.
#[derive(Debug, Default)]
pub struct Benchmarks {
    pub similarity: Option<SimilarityBenchmark>,
    pub analogy: Option<AnalogyBenchmark>,
    /// Analogy set for checkpoint retention, if any.
    pub checkpoint: Option<AnalogyBenchmark>,
}

impl Benchmarks {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let mut b = Benchmarks::default();
        if let Some(p) = &cfg.benchmark {
            match cfg.task {
                TaskKind::Similarity => {
                    let s = load_similarity(p)?;
                    b.similarity = Some(if cfg.lowercase { s.lowercased() } else { s });
                }
                TaskKind::Analogy => {
                    let a = load_analogy(p)?;
                    b.analogy = Some(if cfg.lowercase { a.lowercased() } else { a });
                }
            }
        }
        if let Some(p) = &cfg.analogy {
            let a = load_analogy(p)?;
            b.checkpoint = Some(if cfg.lowercase { a.lowercased() } else { a });
        }
        Ok(b)
    }

    pub fn task(&self, cfg: &RunConfig) -> Result<Task<'_>> {
        match (cfg.task, &self.similarity, &self.analogy) {
            (TaskKind::Similarity, Some(s), _) => Ok(Task::Similarity(s)),
            (TaskKind::Analogy, _, Some(a)) => Ok(Task::Analogy {
                bench: a,
                stride: cfg.analogy_stride,
            }),
            _ => Err(Error::Config("missing required `benchmark`".into())),
        }
    }
}

/// `train`: one embedding at `cfg.dim`, written as `embedding_<dim>.vec`
/// with its per-epoch log in `train_log.csv`.
pub fn run_train(cfg: &RunConfig, log: &mut RunLog) -> Result<TrainOutput> {
    let (vocab, ids) = log.stage("vocab", |log| prepare_corpus(cfg, log))?;
    let benches = log.stage("benchmark", |_| Benchmarks::load(cfg))?;
    let config = cfg.train_config(cfg.dim);
    let out = log.stage("train", |_| match &benches.checkpoint {
        Some(bench) => {
            let vocab = &vocab;
            let metric = move |e: &EmbeddingMatrix| -> Result<f64> {
                evaluate_analogy(e, vocab, bench, true).map(|r| r.metric)
            };
            let metric: &CheckpointMetric<'_> = &metric;
            train(&ids, &vocab, &config, Some(metric))
        }
        None => train(&ids, &vocab, &config, None),
    })?;
    log.stage("write", |log| {
        let path = cfg.out_dir.join(format!("embedding_{}.vec", cfg.dim));
        save_embedding(&out.embedding, &vocab, &path)?;
        out.log.save_csv(cfg.out_dir.join("train_log.csv"))?;
        log.line(format!(
            "wrote {} (best epoch {}, {:.1}s)",
            path.display(),
            out.best_epoch,
            out.seconds
        ));
        Ok(())
    })?;
    Ok(out)
}

/// `grid-search`: one embedding per grid dimensionality; rows are
/// appended to `grid.csv` as they finish.
pub fn run_grid(cfg: &RunConfig, log: &mut RunLog) -> Result<crate::selector::GridSearchResult> {
    if cfg.grid.is_empty() {
        return Err(Error::Config("missing required `grid`".into()));
    }
    let (vocab, ids) = log.stage("vocab", |log| prepare_corpus(cfg, log))?;
    let benches = log.stage("benchmark", |_| Benchmarks::load(cfg))?;
    let task = benches.task(cfg)?;
    let mut selector = Selector::new(&ids, &vocab, task, cfg.train_config(cfg.upper_bound));
    if let Some(a) = &benches.checkpoint {
        selector = selector.with_checkpoint(a);
    }
    let grid_csv = cfg.out_dir.join("grid.csv");
    let grid = log.stage("grid-search", |_| {
        selector.grid_search(&cfg.grid, Some(&grid_csv))
    })?;
    log.line(format!(
        "grid best d={} metric={:.3}",
        grid.best_dim, grid.best_metric
    ));
    Ok(grid)
}

/// Files written by [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: SelectionReport,
    pub artifacts: Vec<PathBuf>,
}

/// Vocabulary, training at the upper bound, PCA, sweep and selection,
/// then optional retraining, grid search and upper-bound consistency.
pub fn run_pipeline(cfg: &RunConfig, log: &mut RunLog) -> Result<PipelineOutput> {
    let dir = &cfg.out_dir;
    let mut artifacts = vec![dir.join("run.config"), dir.join("log.txt")];
    let (vocab, ids) = log.stage("vocab", |log| prepare_corpus(cfg, log))?;
    artifacts.push(dir.join("vocab.tsv"));
    let benches = log.stage("benchmark", |_| Benchmarks::load(cfg))?;
    let task = benches.task(cfg)?;
    let score = ScoreParams::new(cfg.lambda)?;

    let mut selector = Selector::new(&ids, &vocab, task, cfg.train_config(cfg.upper_bound));
    if let Some(a) = &benches.checkpoint {
        selector = selector.with_checkpoint(a);
    }
    let outcome = log.stage("select", |_| {
        selector.run_selection(cfg.upper_bound, score, cfg.retrain)
    })?;
    let mut report = outcome.report;
    log.line(format!(
        "selected d={} (metric {:.3}; {:.3} at N={})",
        report.selected_d, report.selected_metric, report.full_metric, report.upper_bound
    ));

    log.stage("write", |_| {
        let emb = dir.join(format!("embedding_{}.vec", cfg.upper_bound));
        save_embedding(&outcome.trained.embedding, &vocab, &emb)?;
        artifacts.push(emb);
        let log_csv = dir.join("train_log.csv");
        outcome.trained.log.save_csv(&log_csv)?;
        artifacts.push(log_csv);
        let model = dir.join("pca.model");
        outcome.model.save(&model)?;
        artifacts.push(model);
        let variance = dir.join("variance.csv");
        emit_plot_data(PlotData::Variance(&outcome.model), &variance)?;
        artifacts.push(variance);
        let sweep = dir.join("sweep.csv");
        emit_plot_data(PlotData::Sweep(&report), &sweep)?;
        artifacts.push(sweep);
        if let Some(re) = &outcome.retrained {
            let p = dir.join(format!("retrained_{}.vec", report.selected_d));
            save_embedding(&re.embedding, &vocab, &p)?;
            artifacts.push(p);
        }
        Ok(())
    })?;

    if !cfg.grid.is_empty() {
        let grid_csv = dir.join("grid.csv");
        let grid = log.stage("grid-search", |_| {
            selector.grid_search(&cfg.grid, Some(&grid_csv))
        })?;
        artifacts.push(grid_csv);
        report
            .timings
            .insert("grid_search".to_owned(), grid.total_seconds());
        report.baseline = Some(grid);
    }

    if !cfg.bounds.is_empty() {
        let consistency = log.stage("consistency", |_| {
            selector.consistency_check(&cfg.bounds, score)
        })?;
        let mut csv = String::from("upper_bound,selected_d\n");
        for (n, d) in &consistency.selections {
            csv.push_str(&format!("{n},{d}\n"));
        }
        let p = dir.join("consistency.csv");
        write_text(&p, &csv)?;
        artifacts.push(p);
        log.line(format!("upper-bound spread: {}", consistency.spread));
    }

    log.stage("report", |log| {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::InvalidArgument(format!("cannot serialize report: {e}")))?;
        let p = dir.join("selection.json");
        write_text(&p, &json)?;
        artifacts.push(p);
        let p = dir.join("timing.csv");
        emit_plot_data(PlotData::Timing(&report.timings), &p)?;
        artifacts.push(p);
        let summary = report.summary();
        let p = dir.join("report.txt");
        write_text(&p, &summary)?;
        artifacts.push(p);
        if let Some(b) = &report.baseline {
            let s = speedup_report(&report, b);
            match compare_to_baseline(&report) {
                Ok(c) => log.line(format!(
                    "grid best d={}; distance {}; relative {:.1}%; speedup {}",
                    b.best_dim,
                    c.distance_d,
                    c.relative_performance,
                    s.label()
                )),
                Err(e) => log.line(format!("comparison undefined: {e}; speedup {}", s.label())),
            }
        }
        Ok(())
    })?;

    Ok(PipelineOutput { report, artifacts })
}

/// Reads `selection.json` back.
pub fn load_report(path: impl AsRef<Path>) -> Result<SelectionReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::parse(e.line(), format!("{}: {e}", path.display())))
}

/// Fits PCA to a saved embedding and writes `pca.model` and `variance.csv`.
pub fn run_pca(cfg: &RunConfig, log: &mut RunLog) -> Result<crate::pca::PcaModel> {
    let path = cfg
        .embedding
        .as_ref()
        .ok_or_else(|| Error::Config("missing required `embedding`".into()))?;
    let (emb, _) = log.stage("load", |_| crate::embedding::load_embedding(path))?;
    let model = log.stage("pca", |_| fit_pca(&emb, cfg.pca_mode))?;
    log.stage("write", |_| {
        model.save(cfg.out_dir.join("pca.model"))?;
        emit_plot_data(PlotData::Variance(&model), cfg.out_dir.join("variance.csv"))
    })?;
    Ok(model)
}
