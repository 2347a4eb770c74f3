//! Dimensionality selection.
//!
//! Train one embedding at an upper bound `N`, rotate it onto its principal
//! directions, then drop directions from the least significant end one at
//! a time while scoring the benchmark. Every retained dimensionality `d`
//! gets a score `metric - lambda * d`; the highest score wins and ties go
//! to the smaller `d`. A grid search over separately trained embeddings
//! serves as the baseline.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::corpus::Vocabulary;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_analogy, evaluate_similarity, evaluate_similarity_sweep, AnalogyBenchmark,
    SimilarityBenchmark,
};
use crate::pca::{fit_pca, PcaMode, PcaModel};
use crate::sgns::{train, CheckpointMetric, TrainConfig, TrainOutput};

/// Default penalty per retained dimension, in metric points (×100 scale).
pub const DEFAULT_LAMBDA: f64 = 0.01;
/// Default distance between evaluated dimensionalities in analogy sweeps.
pub const DEFAULT_ANALOGY_STRIDE: usize = 10;

/// `f(d, metric) = metric - lambda * d`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScoreParams {
    pub lambda: f64,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams {
            lambda: DEFAULT_LAMBDA,
        }
    }
}

impl ScoreParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Config(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(ScoreParams { lambda })
    }

    #[inline]
    pub fn score(&self, d: usize, metric: f64) -> f64 {
        metric - self.lambda * d as f64
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepRecord {
    /// Retained dimensions.
    pub d: usize,
    #[serde(with = "nan_as_null")]
    pub metric: f64,
    #[serde(with = "nan_as_null")]
    pub score: f64,
    pub task: String,
}

/// JSON has no NaN; undefined metrics travel as `null`.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Builds scored records from `(d, metric)` points.
pub fn score_records(points: &[(usize, f64)], score: ScoreParams, task: &str) -> Vec<SweepRecord> {
    points
        .iter()
        .map(|&(d, metric)| SweepRecord {
            d,
            metric,
            score: score.score(d, metric),
            task: task.to_owned(),
        })
        .collect()
}

/// Index of the best-scoring record. NaN scores never win; equal scores
/// go to the smaller `d`.
pub fn select_best(records: &[SweepRecord]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in records.iter().enumerate() {
        if r.score.is_nan() {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let cur = &records[b];
                if r.score > cur.score || (r.score == cur.score && r.d < cur.d) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.ok_or_else(|| Error::Degenerate("every sweep record has an undefined metric".into()))
}

/// The language task scored during sweeps.
#[derive(Debug, Clone, Copy)]
pub enum Task<'a> {
    Similarity(&'a SimilarityBenchmark),
    Analogy {
        bench: &'a AnalogyBenchmark,
        stride: usize,
    },
}

impl Task<'_> {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Similarity(_) => "similarity",
            Task::Analogy { .. } => "analogy",
        }
    }

    pub fn label(&self) -> String {
        match self {
            Task::Similarity(b) => format!("similarity:{}", b.name),
            Task::Analogy { bench, .. } => format!("analogy:{}", bench.name),
        }
    }

    /// Scores a full embedding.
    pub fn evaluate(&self, embedding: &EmbeddingMatrix, vocab: &Vocabulary) -> Result<f64> {
        match self {
            Task::Similarity(b) => evaluate_similarity(embedding, vocab, b).map(|r| r.metric),
            Task::Analogy { bench, .. } => {
                evaluate_analogy(embedding, vocab, bench, true).map(|r| r.metric)
            }
        }
    }
}

/// `(d, metric)` for the truncations `d = N-1, ..., 1` of an uncentered
/// model. Similarity sweeps visit every `d`; analogy sweeps visit every
/// `stride`-th one counting down from `N-1`, always including `d = 1`.
pub fn sweep_model(
    model: &PcaModel,
    vocab: &Vocabulary,
    task: Task<'_>,
) -> Result<Vec<(usize, f64)>> {
    match task {
        Task::Similarity(bench) => Ok(evaluate_similarity_sweep(model, vocab, bench)?
            .into_iter()
            .map(|p| (p.d, p.metric))
            .collect()),
        Task::Analogy { bench, stride } => {
            let n = model.dims();
            let stride = stride.max(1);
            let mut ds: Vec<usize> = (1..n).rev().step_by(stride).collect();
            if ds.last() != Some(&1) && n > 1 {
                ds.push(1);
            }
            ds.into_iter()
                .map(|d| {
                    let t = model.truncate(d)?;
                    let m = evaluate_analogy(&t.values, vocab, bench, true)?;
                    Ok((d, m.metric))
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricSource {
    Truncated,
    Retrained,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridEntry {
    pub dim: usize,
    #[serde(with = "nan_as_null")]
    pub metric: f64,
    pub train_s: f64,
    pub eval_s: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSearchResult {
    pub entries: Vec<GridEntry>,
    pub best_dim: usize,
    pub best_metric: f64,
}

impl GridSearchResult {
    /// Picks the best entry (ties to the smaller dimension).
    pub fn from_entries(entries: Vec<GridEntry>) -> Result<Self> {
        let mut best: Option<&GridEntry> = None;
        for e in &entries {
            if e.metric.is_nan() {
                continue;
            }
            if best.is_none_or(|b| e.metric > b.metric || (e.metric == b.metric && e.dim < b.dim)) {
                best = Some(e);
            }
        }
        let best =
            best.ok_or_else(|| Error::Degenerate("grid search produced no metric".into()))?;
        let (best_dim, best_metric) = (best.dim, best.metric);
        Ok(GridSearchResult {
            entries,
            best_dim,
            best_metric,
        })
    }

    pub fn total_seconds(&self) -> f64 {
        self.entries.iter().map(|e| e.train_s + e.eval_s).sum()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SelectionReport {
    pub selected_d: usize,
    pub upper_bound: usize,
    pub vocab_size: usize,
    pub embedding_params: usize,
    pub lambda: f64,
    pub task: String,
    pub seed: u64,
    /// Metric of the truncated embedding at `selected_d`.
    pub selected_metric: f64,
    /// Metric of the N-dimensional embedding before any removal.
    pub full_metric: f64,
    pub retrained_metric: Option<f64>,
    /// Where [`SelectionReport::final_metric`] comes from.
    pub metric_source: MetricSource,
    pub records: Vec<SweepRecord>,
    /// Seconds per phase: `train`, `pca`, `sweep`, and `retrain` if run.
    pub timings: BTreeMap<String, f64>,
    pub baseline: Option<GridSearchResult>,
}

impl SelectionReport {
    pub fn final_metric(&self) -> f64 {
        match self.metric_source {
            MetricSource::Retrained => self.retrained_metric.unwrap_or(self.selected_metric),
            MetricSource::Truncated => self.selected_metric,
        }
    }

    pub fn timing(&self, phase: &str) -> f64 {
        self.timings.get(phase).copied().unwrap_or(0.0)
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("task:             {}\n", self.task));
        s.push_str(&format!("upper bound N:    {}\n", self.upper_bound));
        s.push_str(&format!("lambda:           {}\n", self.lambda));
        s.push_str(&format!("selected d:       {}\n", self.selected_d));
        s.push_str(&format!("embedding params: {}\n", self.embedding_params));
        s.push_str(&format!("metric at N:      {:.3}\n", self.full_metric));
        s.push_str(&format!("metric at d:      {:.3}\n", self.selected_metric));
        if let Some(m) = self.retrained_metric {
            s.push_str(&format!("retrained metric: {m:.3}\n"));
        }
        for (phase, secs) in &self.timings {
            s.push_str(&format!("time {phase:<12}{secs:.2}s\n"));
        }
        if let Some(b) = &self.baseline {
            s.push_str(&format!(
                "grid search best: d={} metric={:.3} ({} dims, {:.2}s)\n",
                b.best_dim,
                b.best_metric,
                b.entries.len(),
                b.total_seconds()
            ));
            if let Ok(c) = compare_to_baseline(self) {
                s.push_str(&format!(
                    "distance to grid: {}\nrelative perf:    {:.1}%\n",
                    c.distance_d, c.relative_performance
                ));
            }
            let sp = speedup_report(self, b);
            s.push_str(&format!("speedup:          {}\n", sp.label()));
        }
        s
    }
}

/// Result of [`Selector::run_selection`].
#[derive(Debug, Clone)]
pub struct SelectionOutcome {
    pub report: SelectionReport,
    pub trained: TrainOutput,
    pub model: PcaModel,
    pub retrained: Option<TrainOutput>,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Comparison {
    pub distance_d: usize,
    /// Our final metric as a percentage of the grid-search best.
    pub relative_performance: f64,
}

pub fn compare_to_baseline(report: &SelectionReport) -> Result<Comparison> {
    let base = report
        .baseline
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("report has no grid-search baseline".into()))?;
    if !(base.best_metric > 0.0) {
        return Err(Error::Degenerate(format!(
            "baseline best metric {} is not positive",
            base.best_metric
        )));
    }
    Ok(Comparison {
        distance_d: report.selected_d.abs_diff(base.best_dim),
        relative_performance: 100.0 * report.final_metric() / base.best_metric,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpeedupReport {
    pub ours_total_s: f64,
    pub grid_total_s: f64,
    pub speedup: f64,
}

impl SpeedupReport {
    /// `ours_parts` are the phase durations of one selection run.
    pub fn from_totals(ours_parts: &[f64], grid_total: f64) -> Self {
        let ours: f64 = ours_parts.iter().sum();
        SpeedupReport {
            ours_total_s: ours,
            grid_total_s: grid_total,
            speedup: grid_total / ours,
        }
    }

    /// One decimal, e.g. `13.1x`.
    pub fn label(&self) -> String {
        format!("{:.1}x", self.speedup)
    }
}

/// Compares one selection run (train + PCA + sweep, plus retrain when it
/// happened) against the summed grid-search training and evaluation time.
pub fn speedup_report(report: &SelectionReport, grid: &GridSearchResult) -> SpeedupReport {
    let parts: Vec<f64> = ["train", "pca", "sweep", "retrain"]
        .iter()
        .map(|p| report.timing(p))
        .collect();
    SpeedupReport::from_totals(&parts, grid.total_seconds())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConsistencyReport {
    /// `(upper bound, selected d)` per bound.
    pub selections: Vec<(usize, usize)>,
    /// Largest pairwise difference of selected dimensionalities.
    pub spread: usize,
    pub reports: Vec<SelectionReport>,
}

/// Corpus, vocabulary, task and training recipe shared by every run.
pub struct Selector<'a> {
    pub corpus: &'a [u32],
    pub vocab: &'a Vocabulary,
    pub task: Task<'a>,
    pub train: TrainConfig,
    /// Analogy set used for best-checkpoint retention during training.
    pub checkpoint: Option<&'a AnalogyBenchmark>,
}

impl<'a> Selector<'a> {
    pub fn new(
        corpus: &'a [u32],
        vocab: &'a Vocabulary,
        task: Task<'a>,
        train: TrainConfig,
    ) -> Self {
        Selector {
            corpus,
            vocab,
            task,
            train,
            checkpoint: None,
        }
    }

    pub fn with_checkpoint(mut self, bench: &'a AnalogyBenchmark) -> Self {
        self.checkpoint = Some(bench);
        self
    }

    fn train_dim(&self, dim: usize) -> Result<TrainOutput> {
        let config = TrainConfig {
            dim,
            ..self.train.clone()
        };
        match self.checkpoint {
            Some(bench) => {
                let vocab = self.vocab;
                let metric = move |e: &EmbeddingMatrix| -> Result<f64> {
                    evaluate_analogy(e, vocab, bench, true).map(|r| r.metric)
                };
                let metric: &CheckpointMetric<'_> = &metric;
                train(self.corpus, self.vocab, &config, Some(metric))
            }
            None => train(self.corpus, self.vocab, &config, None),
        }
    }

    /// Trains at `upper_bound`, sweeps every truncation and selects the
    /// best-scoring dimensionality; optionally retrains at that size.
    pub fn run_selection(
        &self,
        upper_bound: usize,
        score: ScoreParams,
        retrain: bool,
    ) -> Result<SelectionOutcome> {
        if upper_bound < 2 {
            return Err(Error::Config(format!(
                "upper bound must be >= 2, got {upper_bound}"
            )));
        }
        if upper_bound >= self.vocab.len() {
            return Err(Error::Config(format!(
                "upper bound {upper_bound} must be below the vocabulary size {}",
                self.vocab.len()
            )));
        }
        let mut timings = BTreeMap::new();

        let trained = self.train_dim(upper_bound)?;
        timings.insert("train".to_owned(), trained.seconds);

        let t = Instant::now();
        let model = fit_pca(&trained.embedding, PcaMode::Uncentered)?;
        timings.insert("pca".to_owned(), t.elapsed().as_secs_f64());

        let t = Instant::now();
        let points = sweep_model(&model, self.vocab, self.task)?;
        let full_metric = self.task.evaluate(&trained.embedding, self.vocab)?;
        timings.insert("sweep".to_owned(), t.elapsed().as_secs_f64());

        let records = score_records(&points, score, &self.task.label());
        let best = select_best(&records)?;
        let selected_d = records[best].d;
        let selected_metric = records[best].metric;
        log::info!(
            "N={upper_bound}: selected d={selected_d} (metric {selected_metric:.3}, full {full_metric:.3})"
        );

        let retrained = if retrain {
            let out = self.train_dim(selected_d)?;
            timings.insert("retrain".to_owned(), out.seconds);
            Some(out)
        } else {
            None
        };
        let retrained_metric = match &retrained {
            Some(out) => Some(self.task.evaluate(&out.embedding, self.vocab)?),
            None => None,
        };

        let report = SelectionReport {
            selected_d,
            upper_bound,
            vocab_size: self.vocab.len(),
            embedding_params: self.vocab.len() * selected_d,
            lambda: score.lambda,
            task: self.task.label(),
            seed: self.train.seed,
            selected_metric,
            full_metric,
            retrained_metric,
            metric_source: if retrained.is_some() {
                MetricSource::Retrained
            } else {
                MetricSource::Truncated
            },
            records,
            timings,
            baseline: None,
        };
        Ok(SelectionOutcome {
            report,
            trained,
            model,
            retrained,
        })
    }

    /// Trains one embedding per dimensionality and scores each. When
    /// `partial_csv` is given, a `dim,metric,train_s,eval_s` row is
    /// appended after every finished entry so a failure keeps earlier
    /// results on disk.
    pub fn grid_search(
        &self,
        dims: &[usize],
        partial_csv: Option<&Path>,
    ) -> Result<GridSearchResult> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Config("grid dims must be non-empty and >= 1".into()));
        }
        let mut sink = match partial_csv {
            Some(p) => {
                let mut f = OpenOptions::new()
                    .create(true)
                    .write(true)
                    .truncate(true)
                    .open(p)
                    .map_err(|e| Error::io(p, e))?;
                writeln!(f, "dim,metric,train_s,eval_s").map_err(|e| Error::io(p, e))?;
                Some((f, PathBuf::from(p)))
            }
            None => None,
        };
        let mut entries = Vec::with_capacity(dims.len());
        for &dim in dims {
            let out = self.train_dim(dim)?;
            let t = Instant::now();
            let metric = self.task.evaluate(&out.embedding, self.vocab)?;
            let entry = GridEntry {
                dim,
                metric,
                train_s: out.seconds,
                eval_s: t.elapsed().as_secs_f64(),
            };
            log::info!("grid d={dim}: metric {metric:.3} in {:.1}s", entry.train_s);
            if let Some((f, p)) = sink.as_mut() {
                writeln!(
                    f,
                    "{},{},{},{}",
                    entry.dim, entry.metric, entry.train_s, entry.eval_s
                )
                .map_err(|e| Error::io(p.as_path(), e))?;
            }
            entries.push(entry);
        }
        GridSearchResult::from_entries(entries)
    }

    /// Runs [`Self::run_selection`] once per upper bound.
    pub fn consistency_check(
        &self,
        bounds: &[usize],
        score: ScoreParams,
    ) -> Result<ConsistencyReport> {
        if bounds.is_empty() {
            return Err(Error::Config("no upper bounds given".into()));
        }
        let mut reports = Vec::with_capacity(bounds.len());
        for &n in bounds {
            reports.push(self.run_selection(n, score, false)?.report);
        }
        let selections: Vec<(usize, usize)> = reports
            .iter()
            .map(|r| (r.upper_bound, r.selected_d))
            .collect();
        let lo = selections.iter().map(|s| s.1).min().expect("non-empty");
        let hi = selections.iter().map(|s| s.1).max().expect("non-empty");
        Ok(ConsistencyReport {
            selections,
            spread: hi - lo,
            reports,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(points: &[(usize, f64)], lambda: f64) -> Vec<SweepRecord> {
        score_records(points, ScoreParams::new(lambda).unwrap(), "t")
    }

    #[test]
    fn worked_example() {
        let r = recs(&[(1, 30.0), (2, 50.0), (3, 50.5)], 1.0);
        let scores: Vec<f64> = r.iter().map(|x| x.score).collect();
        assert_eq!(scores, [29.0, 48.0, 47.5]);
        assert_eq!(r[select_best(&r).unwrap()].d, 2);
    }

    #[test]
    fn zero_lambda_is_metric_argmax_with_small_ties() {
        let r = recs(&[(4, 10.0), (3, 12.0), (2, 12.0), (1, 5.0)], 0.0);
        assert_eq!(r[select_best(&r).unwrap()].d, 2);
    }

    #[test]
    fn nan_never_wins() {
        let r = recs(&[(3, f64::NAN), (2, 1.0), (1, f64::NAN)], 0.0);
        assert_eq!(r[select_best(&r).unwrap()].d, 2);
        let r = recs(&[(1, f64::NAN)], 0.0);
        assert!(select_best(&r).is_err());
    }

    #[test]
    fn negative_lambda_rejected() {
        assert!(ScoreParams::new(-1.0).is_err());
        assert!(ScoreParams::new(f64::NAN).is_err());
    }

    fn report(selected: usize, metric: f64, best_dim: usize, best_metric: f64) -> SelectionReport {
        SelectionReport {
            selected_d: selected,
            upper_bound: 10,
            vocab_size: 100,
            embedding_params: 100 * selected,
            lambda: 0.0,
            task: "t".into(),
            seed: 1,
            selected_metric: metric,
            full_metric: metric,
            retrained_metric: None,
            metric_source: MetricSource::Truncated,
            records: vec![],
            timings: BTreeMap::new(),
            baseline: Some(GridSearchResult {
                entries: vec![GridEntry {
                    dim: best_dim,
                    metric: best_metric,
                    train_s: 1.0,
                    eval_s: 0.0,
                }],
                best_dim,
                best_metric,
            }),
        }
    }

    #[test]
    fn comparison_identical() {
        let c = compare_to_baseline(&report(5, 40.0, 5, 40.0)).unwrap();
        assert_eq!(c.distance_d, 0);
        assert_eq!(c.relative_performance, 100.0);
    }

    #[test]
    fn comparison_table_values() {
        let mut r = report(101, 0.0, 100, 63.8);
        r.retrained_metric = Some(64.5);
        r.metric_source = MetricSource::Retrained;
        let c = compare_to_baseline(&r).unwrap();
        assert_eq!(c.distance_d, 1);
        assert_eq!(format!("{:.1}", c.relative_performance), "101.1");
        assert!(compare_to_baseline(&report(1, 1.0, 1, 0.0)).is_err());
        let mut none = report(1, 1.0, 1, 1.0);
        none.baseline = None;
        assert!(compare_to_baseline(&none).is_err());
    }

    #[test]
    fn grid_ties_prefer_small() {
        let e = |dim, metric| GridEntry {
            dim,
            metric,
            train_s: 0.0,
            eval_s: 0.0,
        };
        let g = GridSearchResult::from_entries(vec![e(50, 3.0), e(25, 3.0), e(100, 2.0)]).unwrap();
        assert_eq!(g.best_dim, 25);
        let g = GridSearchResult::from_entries(vec![e(7, 1.0)]).unwrap();
        assert_eq!(g.best_dim, 7);
    }

    #[test]
    fn published_speedups() {
        let text8 = SpeedupReport::from_totals(&[1724.0, 22.0], 22801.0);
        assert!((text8.speedup - 22801.0 / 1746.0).abs() < 1e-12);
        assert_eq!(text8.label(), "13.1x");
        let wiki = SpeedupReport::from_totals(&[10448.0, 34.0], 132652.0);
        assert_eq!(wiki.label(), "12.7x");
    }

    #[test]
    fn degenerate_grid_speedup_below_one() {
        let mut r = report(5, 1.0, 5, 1.0);
        r.timings.insert("train".into(), 10.0);
        r.timings.insert("pca".into(), 0.5);
        r.timings.insert("sweep".into(), 0.25);
        let grid = GridSearchResult {
            entries: vec![GridEntry {
                dim: 10,
                metric: 1.0,
                train_s: 10.0,
                eval_s: 0.0,
            }],
            best_dim: 10,
            best_metric: 1.0,
        };
        let s = speedup_report(&r, &grid);
        assert!((s.speedup - 10.0 / 10.75).abs() < 1e-12);
    }
}
