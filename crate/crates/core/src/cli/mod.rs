//! The `dimsel` command line.
//!
//! Every subcommand resolves a [`RunConfig`] from defaults, then
//! `DIMSEL_THREADS`, then `--config <file>`, then flags. Commands that write
//! into `--out-dir` echo the resolved configuration there as `run.config`.

pub mod config;
pub mod pipeline;
pub mod plot;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{build_vocabulary, tokenize_file};
use crate::embedding::load_embedding;
use crate::error::{Error, Result};
use crate::eval::{evaluate_analogy, evaluate_similarity, EvalResult};
use crate::pca::PcaModel;

pub use config::{RunConfig, TaskKind, THREADS_ENV};
pub use pipeline::{run_pipeline, PipelineOutput, RunLog};
pub use plot::{emit_plot_data, write_plot_data, PlotData, PlotKind};

/// Exit status for usage and configuration errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failures while running a stage.
pub const EXIT_FAILURE: i32 = 1;

/// Declares a group of string-valued flags, each mapped to a config key.
macro_rules! flag_group {
    ($name:ident { $( $(#[$attr:meta])* $field:ident => $key:literal ),* $(,)? }) => {
        #[derive(Debug, Default, Clone, Args)]
        pub struct $name {
            $( $(#[$attr])* #[arg(long)] pub $field: Option<String>, )*
        }

        impl $name {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut v = Vec::new();
                $( if let Some(x) = &self.$field { v.push(($key, x.as_str())); } )*
                v
            }
        }
    };
}

flag_group!(CorpusFlags {
    /// Whitespace-tokenized UTF-8 text.
    corpus => "corpus",
    /// Existing vocabulary (`token<TAB>count`); built from the corpus if absent.
    vocab => "vocab",
    min_count => "min_count",
    max_vocab => "max_vocab",
    /// `true` or `false`.
    lowercase => "lowercase",
});

flag_group!(TrainFlags {
    dim => "dim",
    window => "window",
    negatives => "negatives",
    epochs => "epochs",
    lr_start => "lr_start",
    lr_end => "lr_end",
    /// Subsampling threshold; empty disables subsampling.
    subsample => "subsample",
    noise_power => "noise_power",
    eval_every => "eval_every",
    /// Analogy questions used to keep the best checkpoint.
    analogy => "analogy",
});

flag_group!(BenchFlags {
    /// `similarity` or `analogy`.
    task => "task",
    benchmark => "benchmark",
    analogy_stride => "analogy_stride",
});

flag_group!(SelectFlags {
    upper_bound => "upper_bound",
    lambda => "lambda",
    /// Comma-separated grid-search dimensionalities.
    grid => "grid",
    /// Comma-separated upper bounds for the consistency check.
    bounds => "bounds",
    /// `uncentered` or `centered`.
    pca_mode => "pca_mode",
});

flag_group!(EmbeddingFlags {
    /// word2vec text file.
    embedding => "embedding",
});

flag_group!(ModelFlags {
    /// Model written by `dimsel pca`.
    model => "model",
});

#[derive(Debug, Parser)]
#[command(
    name = "dimsel",
    version,
    about = "Select word-embedding dimensionality with PCA"
)]
pub struct Cli {
    /// Flat `key=value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub out_dir: Option<String>,
    /// Training threads (default from DIMSEL_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<String>,
    /// Only errors on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count tokens and write `vocab.tsv`.
    BuildVocab {
        #[command(flatten)]
        corpus: CorpusFlags,
    },
    /// Train one SGNS embedding.
    Train {
        #[command(flatten)]
        corpus: CorpusFlags,
        #[command(flatten)]
        train: TrainFlags,
    },
    /// Fit PCA to an embedding and write `pca.model`.
    Pca {
        #[command(flatten)]
        embedding: EmbeddingFlags,
        #[arg(long)]
        pca_mode: Option<String>,
    },
    /// Print the explained-variance table of a fitted model.
    PcaReport {
        #[command(flatten)]
        model: ModelFlags,
    },
    /// Score an embedding; prints `metric,covered,skipped`.
    Eval {
        #[command(flatten)]
        embedding: EmbeddingFlags,
        #[command(flatten)]
        bench: BenchFlags,
    },
    /// Train at the upper bound, sweep truncations and select a dimensionality.
    Select {
        #[command(flatten)]
        corpus: CorpusFlags,
        #[command(flatten)]
        train: TrainFlags,
        #[command(flatten)]
        bench: BenchFlags,
        #[command(flatten)]
        select: SelectFlags,
        /// Retrain at the selected dimensionality.
        #[arg(long)]
        retrain: bool,
    },
    /// Train one embedding per dimensionality and score each.
    GridSearch {
        #[command(flatten)]
        corpus: CorpusFlags,
        #[command(flatten)]
        train: TrainFlags,
        #[command(flatten)]
        bench: BenchFlags,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Summarize `selection.json` in the output directory, or print one of
    /// its plot tables.
    Report {
        #[arg(long, value_enum)]
        plot: Option<PlotKind>,
        #[command(flatten)]
        model: ModelFlags,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::BuildVocab { .. } => "build-vocab",
            Command::Train { .. } => "train",
            Command::Pca { .. } => "pca",
            Command::PcaReport { .. } => "pca-report",
            Command::Eval { .. } => "eval",
            Command::Select { .. } => "select",
            Command::GridSearch { .. } => "grid-search",
            Command::Report { .. } => "report",
        }
    }

    fn flag_pairs(&self) -> Vec<(&'static str, &str)> {
        let mut v = Vec::new();
        match self {
            Command::BuildVocab { corpus } => v.extend(corpus.pairs()),
            Command::Train { corpus, train } => {
                v.extend(corpus.pairs());
                v.extend(train.pairs());
            }
            Command::Pca {
                embedding,
                pca_mode,
            } => {
                v.extend(embedding.pairs());
                if let Some(m) = pca_mode {
                    v.push(("pca_mode", m.as_str()));
                }
            }
            Command::PcaReport { model } | Command::Report { model, .. } => v.extend(model.pairs()),
            Command::Eval { embedding, bench } => {
                v.extend(embedding.pairs());
                v.extend(bench.pairs());
            }
            Command::Select {
                corpus,
                train,
                bench,
                select,
                retrain,
            } => {
                v.extend(corpus.pairs());
                v.extend(train.pairs());
                v.extend(bench.pairs());
                v.extend(select.pairs());
                if *retrain {
                    v.push(("retrain", "true"));
                }
            }
            Command::GridSearch {
                corpus,
                train,
                bench,
                grid,
            } => {
                v.extend(corpus.pairs());
                v.extend(train.pairs());
                v.extend(bench.pairs());
                if let Some(g) = grid {
                    v.push(("grid", g.as_str()));
                }
            }
        }
        v
    }

    /// Path keys that must be present.
    fn required(&self) -> &'static [&'static str] {
        match self {
            Command::BuildVocab { .. } | Command::Train { .. } => &["corpus"],
            Command::Pca { .. } => &["embedding"],
            Command::PcaReport { .. } => &["model"],
            Command::Eval { .. } => &["embedding", "benchmark"],
            Command::Select { .. } | Command::GridSearch { .. } => &["corpus", "benchmark"],
            Command::Report { .. } => &[],
        }
    }

    /// Whether the command writes artifacts into the output directory.
    fn writes(&self) -> bool {
        !matches!(
            self,
            Command::PcaReport { .. } | Command::Eval { .. } | Command::Report { .. }
        )
    }
}

impl Cli {
    /// Defaults, then `DIMSEL_THREADS`, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Ok(t) = std::env::var(THREADS_ENV) {
            cfg.set("threads", &t)
                .map_err(|e| Error::Config(format!("{THREADS_ENV}: {e}")))?;
        }
        if let Some(p) = &self.config {
            cfg.merge_file(p)?;
        }
        let globals = [
            ("seed", &self.seed),
            ("out_dir", &self.out_dir),
            ("threads", &self.threads),
        ];
        for (key, value) in globals {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for (key, value) in self.command.flag_pairs() {
            cfg.set(key, value)?;
        }
        cfg.validate(self.command.required())?;
        Ok(cfg)
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = if cli.quiet { "error" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.resolve()?;
    let mut log = if cli.command.writes() {
        pipeline::ensure_dir(&cfg.out_dir)?;
        cfg.save(cfg.out_dir.join("run.config"))?;
        let mut log = RunLog::create(&cfg.out_dir, cli.quiet)?;
        log.line(format!("dimsel {}", cli.command.name()));
        log
    } else {
        RunLog::stderr(cli.quiet)
    };
    let stdout = std::io::stdout();
    let io = |e| Error::io("<stdout>", e);
    match &cli.command {
        Command::BuildVocab { .. } => {
            let corpus = cfg.corpus.as_ref().expect("validated");
            let tokens = log.stage("tokenize", |_| tokenize_file(corpus, cfg.lowercase))?;
            let vocab = log.stage("vocab", |_| {
                build_vocabulary(&tokens, cfg.min_count, cfg.max_vocab)
            })?;
            vocab.save(cfg.out_dir.join("vocab.tsv"))?;
            log.line(format!(
                "{} types from {} tokens",
                vocab.len(),
                vocab.total_count()
            ));
        }
        Command::Train { .. } => {
            pipeline::run_train(&cfg, &mut log)?;
        }
        Command::Pca { .. } => {
            pipeline::run_pca(&cfg, &mut log)?;
        }
        Command::PcaReport { .. } => {
            let model = PcaModel::load(cfg.model.as_ref().expect("validated"))?;
            write_plot_data(PlotData::Variance(&model), stdout.lock())?;
        }
        Command::Eval { .. } => {
            let (emb, vocab) = load_embedding(cfg.embedding.as_ref().expect("validated"))?;
            let benches = pipeline::Benchmarks::load(&cfg)?;
            let r: EvalResult = match (&benches.similarity, &benches.analogy) {
                (Some(s), _) => evaluate_similarity(&emb, &vocab, s)?,
                (_, Some(a)) => evaluate_analogy(&emb, &vocab, a, true)?,
                _ => return Err(Error::Config("missing required `benchmark`".into())),
            };
            let mut out = stdout.lock();
            writeln!(out, "metric,covered,skipped").map_err(io)?;
            writeln!(out, "{},{},{}", r.metric, r.covered, r.skipped).map_err(io)?;
        }
        Command::Select { .. } => {
            let out = run_pipeline(&cfg, &mut log)?;
            if !cli.quiet {
                print!("{}", out.report.summary());
            }
        }
        Command::GridSearch { .. } => {
            pipeline::run_grid(&cfg, &mut log)?;
        }
        Command::Report { plot, .. } => {
            let report = pipeline::load_report(cfg.out_dir.join("selection.json"))?;
            let out = stdout.lock();
            match plot {
                None => {
                    let mut out = out;
                    write!(out, "{}", report.summary()).map_err(io)?;
                }
                Some(PlotKind::Sweep) => write_plot_data(PlotData::Sweep(&report), out)?,
                Some(PlotKind::Timing) => write_plot_data(PlotData::Timing(&report.timings), out)?,
                Some(PlotKind::Grid) => {
                    let grid = report.baseline.as_ref().ok_or_else(|| {
                        Error::InvalidArgument("report has no grid-search baseline".into())
                    })?;
                    write_plot_data(PlotData::Grid(grid), out)?
                }
                Some(PlotKind::Variance) => {
                    let path = cfg
                        .model
                        .clone()
                        .unwrap_or_else(|| cfg.out_dir.join("pca.model"));
                    let model = PcaModel::load(path)?;
                    write_plot_data(PlotData::Variance(&model), out)?
                }
            }
        }
    }
    Ok(())
}
