//! Skip-gram with negative sampling.
//!
//! Training runs in `f32` over two row-major matrices: input ("word")
//! vectors and output ("context") vectors. Only the input vectors leave
//! this module as the trained embedding. With more than one thread the
//! workers update shared rows without synchronization, so only
//! single-threaded runs are bit-reproducible.

use std::cell::UnsafeCell;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{keep_probability, NoiseTable, Vocabulary, DEFAULT_NOISE_POWER};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

pub use crate::embedding::{load_embedding, save_embedding};

const NOISE_RESOLUTION: u64 = crate::corpus::DEFAULT_NOISE_RESOLUTION;
const PROGRESS_BATCH: usize = 1024;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    /// Subsampling threshold; `None` keeps every occurrence.
    pub subsample: Option<f64>,
    pub noise_power: f64,
    pub seed: u64,
    pub eval_every: usize,
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 200,
            lr_start: 0.025,
            lr_end: 0.025 * 1e-4,
            subsample: Some(crate::corpus::DEFAULT_SUBSAMPLE),
            noise_power: DEFAULT_NOISE_POWER,
            seed: 1,
            eval_every: 10,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_owned()));
        if self.dim == 0 {
            return bad("dim must be >= 1");
        }
        if self.window == 0 {
            return bad("window must be >= 1");
        }
        if self.negatives == 0 {
            return bad("negatives must be >= 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1");
        }
        if self.eval_every == 0 {
            return bad("eval_every must be >= 1");
        }
        if self.threads == 0 {
            return bad("threads must be >= 1");
        }
        if !(self.lr_end > 0.0 && self.lr_end <= self.lr_start) {
            return bad("learning rates must satisfy 0 < lr_end <= lr_start");
        }
        if let Some(t) = self.subsample {
            if !(t > 0.0) {
                return bad("subsample threshold must be > 0");
            }
        }
        Ok(())
    }

    /// Learning rate after `progress` (0..=1) of all epochs.
    pub fn lr_at(&self, progress: f64) -> f64 {
        self.lr_start - (self.lr_start - self.lr_end) * progress.clamp(0.0, 1.0)
    }
}

/// Input rows uniform in `[-0.5/dim, 0.5/dim]`, output rows zero.
pub fn init_embeddings(
    vocab_size: usize,
    dim: usize,
    seed: u64,
) -> Result<(EmbeddingMatrix, EmbeddingMatrix)> {
    if vocab_size == 0 || dim == 0 {
        return Err(Error::InvalidArgument(
            "vocab_size and dim must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..vocab_size * dim)
        .map(|_| (rng.random::<f64>() - 0.5) / dim as f64)
        .collect();
    Ok((
        EmbeddingMatrix::from_vec(vocab_size, dim, data)?,
        EmbeddingMatrix::zeros(vocab_size, dim),
    ))
}

#[inline]
fn sigmoid<T: Float>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// `log σ(x)` without overflow: `-(max(-x, 0) + ln(1 + e^{-|x|}))`.
#[inline]
fn log_sigmoid(x: f64) -> f64 {
    -((-x).max(0.0) + (-x.abs()).exp().ln_1p())
}

#[inline]
fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
fn axpy<T: Float>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

/// Negative log-likelihood of one positive pair and its noise samples:
/// `-log σ(c·v) - Σ log σ(-n·v)`.
pub fn pair_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    let mut loss = -log_sigmoid(dot(context, center));
    for n in negatives {
        loss -= log_sigmoid(-dot(n, center));
    }
    loss
}

/// Scratch space reused across [`sgd_step`] calls.
#[derive(Debug, Clone)]
pub struct StepScratch<T> {
    center_grad: Vec<T>,
    coefs: Vec<T>,
}

impl<T: Float> StepScratch<T> {
    pub fn new(dim: usize, negatives: usize) -> Self {
        StepScratch {
            center_grad: vec![T::zero(); dim],
            coefs: Vec::with_capacity(negatives + 1),
        }
    }
}

/// One SGD step on `pair_loss` for (center, context, negatives).
///
/// All coefficients are computed from the pre-step parameters, so the
/// update equals `-lr` times the exact gradient even when an output row
/// appears more than once among the targets.
#[allow(clippy::too_many_arguments)]
pub fn sgd_step<T: Float>(
    input: &mut [T],
    output: &mut [T],
    dim: usize,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: T,
    scratch: &mut StepScratch<T>,
) -> Result<()> {
    let v_range = center * dim..(center + 1) * dim;
    let v = &input[v_range.clone()];
    scratch.coefs.clear();
    let targets =
        std::iter::once((context, T::one())).chain(negatives.iter().map(|&n| (n, T::zero())));
    for (t, label) in targets.clone() {
        let score = dot(v, &output[t * dim..(t + 1) * dim]);
        if !score.is_finite() {
            return Err(Error::NonFinite(format!(
                "score for pair ({center}, {t}) is not finite; learning rate too high?"
            )));
        }
        scratch.coefs.push(label - sigmoid(score));
    }
    scratch.center_grad.iter_mut().for_each(|g| *g = T::zero());
    for ((t, _), &g) in targets.clone().zip(&scratch.coefs) {
        axpy(g, &output[t * dim..(t + 1) * dim], &mut scratch.center_grad);
    }
    for ((t, _), &g) in targets.zip(&scratch.coefs) {
        axpy(lr * g, v, &mut output[t * dim..(t + 1) * dim]);
    }
    axpy(lr, &scratch.center_grad, &mut input[v_range]);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LogEntry {
    pub epoch: usize,
    /// Checkpoint metric, when this epoch was evaluated successfully.
    pub metric: Option<f64>,
    pub lr: f64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct TrainLog {
    pub entries: Vec<LogEntry>,
    /// Evaluation failures as `(epoch, message)`.
    pub failures: Vec<(usize, String)>,
}

impl TrainLog {
    /// Writes `epoch,metric,lr,elapsed_s`; an unevaluated epoch has an
    /// empty metric field.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epoch,metric,lr,elapsed_s")?;
        for e in &self.entries {
            let metric = e.metric.map(|m| m.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{}", e.epoch, metric, e.lr, e.elapsed_s)?;
        }
        w.flush()
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(BufWriter::new(f))
            .map_err(|e| Error::io(path, e))
    }

    pub fn best_metric(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter_map(|e| e.metric)
            .fold(None, |acc, m| Some(acc.map_or(m, |a: f64| a.max(m))))
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    /// Input vectors of the best checkpoint (the final epoch when no
    /// checkpoint metric was supplied or every evaluation failed).
    pub embedding: EmbeddingMatrix,
    pub best_epoch: usize,
    pub best_metric: Option<f64>,
    /// Output vectors at the end of training.
    pub output: EmbeddingMatrix,
    pub log: TrainLog,
    pub seconds: f64,
}

/// Scores a checkpoint; higher is better.
pub type CheckpointMetric<'a> = dyn Fn(&EmbeddingMatrix) -> Result<f64> + Sync + 'a;

fn to_matrix(rows: usize, cols: usize, data: &[f32]) -> EmbeddingMatrix {
    EmbeddingMatrix::from_vec(rows, cols, data.iter().map(|&x| x as f64).collect())
        .expect("shape matches")
}

fn stream_seed(seed: u64, epoch: usize, stream: usize) -> u64 {
    // splitmix64 finalizer over the combined key
    let mut z = seed
        .wrapping_add((epoch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((stream as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Matrices shared between worker threads without locking.
struct Hogwild {
    input: UnsafeCell<Vec<f32>>,
    output: UnsafeCell<Vec<f32>>,
}

// Workers race on row updates; SGD tolerates the lost writes.
unsafe impl Sync for Hogwild {}

struct EpochCtx<'a> {
    dim: usize,
    window: usize,
    negatives: usize,
    noise: &'a NoiseTable,
    config: &'a TrainConfig,
    epoch: usize,
    epoch_len: usize,
    progress: &'a AtomicUsize,
}

fn run_shard(
    ctx: &EpochCtx<'_>,
    shard: &[u32],
    input: &mut [f32],
    output: &mut [f32],
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let mut scratch = StepScratch::<f32>::new(ctx.dim, ctx.negatives);
    let mut negs = Vec::with_capacity(ctx.negatives);
    let total = (ctx.config.epochs * ctx.epoch_len.max(1)) as f64;
    let mut lr = ctx
        .config
        .lr_at(ctx.epoch as f64 / ctx.config.epochs as f64) as f32;
    let mut local = 0usize;
    for (pos, &center) in shard.iter().enumerate() {
        if local == PROGRESS_BATCH {
            let done = ctx.progress.fetch_add(local, Ordering::Relaxed) + local;
            local = 0;
            let progress = (ctx.epoch * ctx.epoch_len + done) as f64 / total;
            lr = ctx.config.lr_at(progress) as f32;
        }
        local += 1;
        let reach = rng.random_range(1..=ctx.window);
        let lo = pos.saturating_sub(reach);
        let hi = (pos + reach).min(shard.len() - 1);
        for (j, &context) in shard.iter().enumerate().take(hi + 1).skip(lo) {
            if j == pos {
                continue;
            }
            negs.clear();
            for _ in 0..ctx.negatives {
                let n = ctx.noise.sample(rng);
                if n != context as usize {
                    negs.push(n);
                }
            }
            sgd_step(
                input,
                output,
                ctx.dim,
                center as usize,
                context as usize,
                &negs,
                lr,
                &mut scratch,
            )
            .map_err(|e| Error::Diverged {
                epoch: ctx.epoch + 1,
                message: e.to_string(),
            })?;
        }
    }
    ctx.progress.fetch_add(local, Ordering::Relaxed);
    Ok(())
}

/// Trains an embedding with linearly decayed learning rate and dynamic
/// windows, evaluating `checkpoint` every `eval_every` epochs (and after
/// the last one) and keeping the best-scoring input vectors.
pub fn train(
    corpus: &[u32],
    vocab: &Vocabulary,
    config: &TrainConfig,
    checkpoint: Option<&CheckpointMetric<'_>>,
) -> Result<TrainOutput> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let rows = vocab.len();
    let dim = config.dim;
    if let Some(&bad) = corpus.iter().find(|&&id| id as usize >= rows) {
        return Err(Error::InvalidArgument(format!(
            "corpus id {bad} outside vocabulary of {rows}"
        )));
    }
    let noise = NoiseTable::new(vocab, config.noise_power, NOISE_RESOLUTION.max(rows as u64))?;
    let keep: Option<Vec<f64>> = config.subsample.map(|t| {
        vocab
            .counts()
            .iter()
            .map(|&c| {
                if c == 0 {
                    1.0
                } else {
                    keep_probability(c, vocab.total_count(), t)
                }
            })
            .collect()
    });

    let (init_in, _) = init_embeddings(rows, dim, config.seed)?;
    let shared = Hogwild {
        input: UnsafeCell::new(init_in.as_slice().iter().map(|&x| x as f32).collect()),
        output: UnsafeCell::new(vec![0.0; rows * dim]),
    };

    let start = Instant::now();
    let mut log = TrainLog::default();
    let mut best: Option<(f64, usize, EmbeddingMatrix)> = None;
    let mut epoch_ids = Vec::with_capacity(corpus.len());

    for epoch in 0..config.epochs {
        epoch_ids.clear();
        match &keep {
            Some(p) => {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, epoch, 0));
                epoch_ids.extend(
                    corpus
                        .iter()
                        .copied()
                        .filter(|&id| rng.random::<f64>() < p[id as usize]),
                );
            }
            None => epoch_ids.extend_from_slice(corpus),
        }
        let progress = AtomicUsize::new(0);
        let ctx = EpochCtx {
            dim,
            window: config.window,
            negatives: config.negatives,
            noise: &noise,
            config,
            epoch,
            epoch_len: epoch_ids.len(),
            progress: &progress,
        };
        if !epoch_ids.is_empty() {
            let threads = config.threads.min(epoch_ids.len());
            if threads == 1 {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, epoch, 1));
                // SAFETY: no other thread is running.
                let (input, output) =
                    unsafe { (&mut *shared.input.get(), &mut *shared.output.get()) };
                run_shard(&ctx, &epoch_ids, input, output, &mut rng)?;
            } else {
                let chunk = epoch_ids.len().div_ceil(threads);
                let shared = &shared;
                let ctx = &ctx;
                std::thread::scope(|s| {
                    let handles: Vec<_> = epoch_ids
                        .chunks(chunk)
                        .enumerate()
                        .map(|(t, shard)| {
                            s.spawn(move || {
                                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(
                                    config.seed,
                                    epoch,
                                    t + 1,
                                ));
                                // SAFETY: buffers outlive the scope and are never
                                // reallocated; concurrent row writes are the
                                // accepted lock-free SGD race.
                                let (input, output) = unsafe {
                                    (&mut *shared.input.get(), &mut *shared.output.get())
                                };
                                run_shard(ctx, shard, input, output, &mut rng)
                            })
                        })
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("training worker panicked"))
                        .collect::<Result<Vec<()>>>()
                })?;
            }
        }

        let done = epoch + 1;
        let lr = config.lr_at(done as f64 / config.epochs as f64);
        let mut entry = LogEntry {
            epoch: done,
            metric: None,
            lr,
            elapsed_s: start.elapsed().as_secs_f64(),
        };
        let evaluate = done % config.eval_every == 0 || done == config.epochs;
        if evaluate {
            // SAFETY: workers have joined.
            let input = unsafe { &*shared.input.get() };
            let current = to_matrix(rows, dim, input);
            match checkpoint {
                Some(metric) => match metric(&current) {
                    Ok(m) if m.is_finite() => {
                        entry.metric = Some(m);
                        if best.as_ref().is_none_or(|(b, _, _)| m > *b) {
                            best = Some((m, done, current));
                        }
                    }
                    Ok(m) => {
                        log::warn!("epoch {done}: checkpoint metric {m} is not finite, skipped");
                        log.failures.push((done, format!("non-finite metric {m}")));
                    }
                    Err(e) => {
                        log::warn!("epoch {done}: checkpoint evaluation failed: {e}");
                        log.failures.push((done, e.to_string()));
                    }
                },
                None if done == config.epochs => {
                    best = best.or(Some((f64::NAN, done, current)));
                }
                None => {}
            }
            entry.elapsed_s = start.elapsed().as_secs_f64();
        }
        log::debug!(
            "epoch {done}/{} lr={lr:.6} metric={:?}",
            config.epochs,
            entry.metric
        );
        log.entries.push(entry);
    }

    let input = shared.input.into_inner();
    let output = shared.output.into_inner();
    let (best_metric, best_epoch, embedding) = match best {
        Some((m, e, emb)) => (if m.is_nan() { None } else { Some(m) }, e, emb),
        None => (None, config.epochs, to_matrix(rows, dim, &input)),
    };
    Ok(TrainOutput {
        embedding,
        best_epoch,
        best_metric,
        output: to_matrix(rows, dim, &output),
        log,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, encode};

    #[test]
    fn init_range_and_determinism() {
        let (a, out) = init_embeddings(50, 100, 3).unwrap();
        assert!(a.as_slice().iter().all(|x| x.abs() <= 0.005));
        assert!(out.as_slice().iter().all(|&x| x == 0.0));
        let (b, _) = init_embeddings(50, 100, 3).unwrap();
        assert_eq!(a, b);
        let (c, _) = init_embeddings(50, 100, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn pair_loss_known_values() {
        let z = [0.0; 4];
        let l = pair_loss(&z, &z, &[&z]);
        assert!((l - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        let v = [1.0];
        let l = pair_loss(&v, &[700.0], &[&[-700.0]]);
        assert!(l >= 0.0 && l < 1e-300);
        let l = pair_loss(&v, &[-700.0], &[&[700.0]]);
        assert!((l - 1400.0).abs() < 1e-9, "{l}");
    }

    #[test]
    fn zero_lr_leaves_parameters() {
        let (init, _) = init_embeddings(3, 4, 1).unwrap();
        let mut input = init.as_slice().to_vec();
        let mut output: Vec<f64> = (0..12).map(|i| i as f64 * 0.01).collect();
        let (i0, o0) = (input.clone(), output.clone());
        let mut s = StepScratch::new(4, 2);
        sgd_step(&mut input, &mut output, 4, 0, 1, &[2, 2], 0.0, &mut s).unwrap();
        assert_eq!(input, i0);
        assert_eq!(output, o0);
    }

    #[test]
    fn positive_pair_score_increases() {
        let mut input = vec![0.1, -0.2, 0.05, 0.3, 0.2, -0.1];
        let mut output = vec![0.05, 0.1, -0.2, -0.1, 0.0, 0.2];
        let mut s = StepScratch::new(3, 0);
        let score = |i: &[f64], o: &[f64]| dot(&i[0..3], &o[3..6]);
        let mut prev = score(&input, &output);
        for _ in 0..50 {
            sgd_step(&mut input, &mut output, 3, 0, 1, &[], 0.5, &mut s).unwrap();
            let now = score(&input, &output);
            assert!(now > prev);
            prev = now;
        }
    }

    #[test]
    fn non_finite_score_is_reported() {
        let mut input = vec![f64::INFINITY, 0.0];
        let mut output = vec![1.0, 0.0];
        let mut s = StepScratch::new(2, 0);
        assert!(sgd_step(&mut input, &mut output, 2, 0, 0, &[], 0.1, &mut s).is_err());
    }

    fn toy_corpus() -> (Vocabulary, Vec<u32>) {
        let tokens: Vec<&str> = (0..200)
            .map(|i| if i % 2 == 0 { "a" } else { "b" })
            .collect();
        let vocab = build_vocabulary(&tokens, 1, None).unwrap();
        let (ids, _) = encode(&tokens, &vocab, None);
        (vocab, ids)
    }

    fn toy_config(epochs: usize) -> TrainConfig {
        TrainConfig {
            dim: 5,
            window: 1,
            negatives: 1,
            epochs,
            subsample: None,
            eval_every: 1,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn toy_pattern_aligns_a_with_b() {
        let (vocab, ids) = toy_corpus();
        let out = train(&ids, &vocab, &toy_config(50), None).unwrap();
        let a = out.embedding.row(0);
        let b = out.output.row(1);
        let cos = dot(a, b) / (dot(a, a).sqrt() * dot(b, b).sqrt());
        // output rows start at zero, so any alignment is learned
        assert!(cos > 0.5, "cos = {cos}");
    }

    #[test]
    fn single_epoch_single_evaluation() {
        let (vocab, ids) = toy_corpus();
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let metric = |_: &EmbeddingMatrix| {
            calls.fetch_add(1, Ordering::SeqCst);
            Ok(1.0)
        };
        let out = train(&ids, &vocab, &toy_config(1), Some(&metric)).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        let plain = train(&ids, &vocab, &toy_config(1), None).unwrap();
        assert_eq!(out.embedding, plain.embedding);
    }

    #[test]
    fn lr_decreases_each_epoch() {
        let (vocab, ids) = toy_corpus();
        let out = train(&ids, &vocab, &toy_config(6), None).unwrap();
        let lrs: Vec<f64> = out.log.entries.iter().map(|e| e.lr).collect();
        assert!(lrs.windows(2).all(|w| w[1] < w[0]), "{lrs:?}");
    }

    #[test]
    fn best_checkpoint_is_kept() {
        let (vocab, ids) = toy_corpus();
        let calls = std::sync::atomic::AtomicUsize::new(0);
        // peaks at the third evaluation, fails at the fourth
        let metric = |_: &EmbeddingMatrix| {
            let n = calls.fetch_add(1, Ordering::SeqCst);
            match n {
                3 => Err(Error::Degenerate("boom".into())),
                _ => Ok([1.0, 2.0, 5.0, 0.0, 3.0][n]),
            }
        };
        let out = train(&ids, &vocab, &toy_config(5), Some(&metric)).unwrap();
        assert_eq!(out.best_epoch, 3);
        assert_eq!(out.best_metric, Some(5.0));
        assert_eq!(out.log.best_metric(), Some(5.0));
        assert_eq!(out.log.failures.len(), 1);
        let mut csv = Vec::new();
        out.log.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("epoch,metric,lr,elapsed_s\n"));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn single_thread_is_reproducible() {
        let (vocab, ids) = toy_corpus();
        let cfg = TrainConfig {
            subsample: Some(0.3),
            ..toy_config(3)
        };
        let a = train(&ids, &vocab, &cfg, None).unwrap();
        let b = train(&ids, &vocab, &cfg, None).unwrap();
        assert_eq!(a.embedding, b.embedding);
        assert_eq!(a.output, b.output);
    }

    #[test]
    fn multi_thread_runs() {
        let (vocab, ids) = toy_corpus();
        let cfg = TrainConfig {
            threads: 3,
            ..toy_config(3)
        };
        let out = train(&ids, &vocab, &cfg, None).unwrap();
        assert!(out.embedding.is_finite());
    }

    #[test]
    fn rejects_bad_input() {
        let (vocab, ids) = toy_corpus();
        assert!(matches!(
            train(&[], &vocab, &toy_config(1), None),
            Err(Error::EmptyCorpus)
        ));
        let cfg = TrainConfig {
            lr_end: 1.0,
            ..toy_config(1)
        };
        assert!(train(&ids, &vocab, &cfg, None).is_err());
        assert!(train(&[7], &vocab, &toy_config(1), None).is_err());
    }
}
