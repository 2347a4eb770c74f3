//! Resolved run configuration and its flat `key=value` file format.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pca::PcaMode;
use crate::selector::DEFAULT_ANALOGY_STRIDE;
use crate::sgns::TrainConfig;

/// Environment variable consulted for the default thread count.
pub const THREADS_ENV: &str = "DIMSEL_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Similarity,
    Analogy,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Similarity => "similarity",
            TaskKind::Analogy => "analogy",
        }
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "similarity" => Ok(TaskKind::Similarity),
            "analogy" => Ok(TaskKind::Analogy),
            _ => Err(format!("expected similarity or analogy, got {s:?}")),
        }
    }
}

/// Everything one invocation needs. Flags override config-file values,
/// which override defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub embedding: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub benchmark: Option<PathBuf>,
    /// Analogy questions for best-checkpoint retention while training.
    pub analogy: Option<PathBuf>,
    pub task: TaskKind,
    pub min_count: u64,
    pub max_vocab: Option<usize>,
    pub lowercase: bool,
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub subsample: Option<f64>,
    pub noise_power: f64,
    pub eval_every: usize,
    pub upper_bound: usize,
    pub lambda: f64,
    pub analogy_stride: usize,
    pub pca_mode: PcaMode,
    pub retrain: bool,
    pub grid: Vec<usize>,
    pub bounds: Vec<usize>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        RunConfig {
            corpus: None,
            vocab: None,
            embedding: None,
            model: None,
            benchmark: None,
            analogy: None,
            task: TaskKind::Similarity,
            min_count: 5,
            max_vocab: None,
            lowercase: true,
            dim: t.dim,
            window: t.window,
            negatives: t.negatives,
            epochs: t.epochs,
            lr_start: t.lr_start,
            lr_end: t.lr_end,
            subsample: t.subsample,
            noise_power: t.noise_power,
            eval_every: t.eval_every,
            upper_bound: 200,
            lambda: crate::selector::DEFAULT_LAMBDA,
            analogy_stride: DEFAULT_ANALOGY_STRIDE,
            pca_mode: PcaMode::Uncentered,
            retrain: false,
            grid: Vec::new(),
            bounds: Vec::new(),
            seed: t.seed,
            out_dir: PathBuf::from("."),
            threads: t.threads,
        }
    }
}

/// Every key accepted in a config file, in serialization order.
pub const KEYS: &[&str] = &[
    "corpus",
    "vocab",
    "embedding",
    "model",
    "benchmark",
    "analogy",
    "task",
    "min_count",
    "max_vocab",
    "lowercase",
    "dim",
    "window",
    "negatives",
    "epochs",
    "lr_start",
    "lr_end",
    "subsample",
    "noise_power",
    "eval_every",
    "upper_bound",
    "lambda",
    "analogy_stride",
    "pca_mode",
    "retrain",
    "grid",
    "bounds",
    "seed",
    "out_dir",
    "threads",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("`{key}`: cannot parse {value:?}: {e}")))
}

fn parse_opt<T: FromStr>(key: &str, value: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if value.trim().is_empty() {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn parse_path(value: &str) -> Option<PathBuf> {
    let v = value.trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_mode(key: &str, value: &str) -> Result<PcaMode> {
    match value.trim() {
        "uncentered" => Ok(PcaMode::Uncentered),
        "centered" => Ok(PcaMode::Centered),
        v => Err(Error::Config(format!(
            "`{key}`: expected uncentered or centered, got {v:?}"
        ))),
    }
}

fn mode_str(m: PcaMode) -> &'static str {
    match m {
        PcaMode::Uncentered => "uncentered",
        PcaMode::Centered => "centered",
    }
}

fn path_str(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_default()
}

fn opt_str<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn list_str(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one key from its textual value. Errors name the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "corpus" => self.corpus = parse_path(value),
            "vocab" => self.vocab = parse_path(value),
            "embedding" => self.embedding = parse_path(value),
            "model" => self.model = parse_path(value),
            "benchmark" => self.benchmark = parse_path(value),
            "analogy" => self.analogy = parse_path(value),
            "task" => self.task = parse(key, value)?,
            "min_count" => self.min_count = parse(key, value)?,
            "max_vocab" => self.max_vocab = parse_opt(key, value)?,
            "lowercase" => self.lowercase = parse(key, value)?,
            "dim" => self.dim = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "negatives" => self.negatives = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "lr_start" => self.lr_start = parse(key, value)?,
            "lr_end" => self.lr_end = parse(key, value)?,
            "subsample" => self.subsample = parse_opt(key, value)?,
            "noise_power" => self.noise_power = parse(key, value)?,
            "eval_every" => self.eval_every = parse(key, value)?,
            "upper_bound" => self.upper_bound = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "analogy_stride" => self.analogy_stride = parse(key, value)?,
            "pca_mode" => self.pca_mode = parse_mode(key, value)?,
            "retrain" => self.retrain = parse(key, value)?,
            "grid" => self.grid = parse_list(key, value)?,
            "bounds" => self.bounds = parse_list(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out_dir" => {
                self.out_dir = parse_path(value)
                    .ok_or_else(|| Error::Config("`out_dir`: must not be empty".into()))?
            }
            "threads" => self.threads = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Textual value of one key, as written by [`Self::to_config_string`].
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "corpus" => path_str(&self.corpus),
            "vocab" => path_str(&self.vocab),
            "embedding" => path_str(&self.embedding),
            "model" => path_str(&self.model),
            "benchmark" => path_str(&self.benchmark),
            "analogy" => path_str(&self.analogy),
            "task" => self.task.as_str().to_owned(),
            "min_count" => self.min_count.to_string(),
            "max_vocab" => opt_str(&self.max_vocab),
            "lowercase" => self.lowercase.to_string(),
            "dim" => self.dim.to_string(),
            "window" => self.window.to_string(),
            "negatives" => self.negatives.to_string(),
            "epochs" => self.epochs.to_string(),
            "lr_start" => self.lr_start.to_string(),
            "lr_end" => self.lr_end.to_string(),
            "subsample" => opt_str(&self.subsample),
            "noise_power" => self.noise_power.to_string(),
            "eval_every" => self.eval_every.to_string(),
            "upper_bound" => self.upper_bound.to_string(),
            "lambda" => self.lambda.to_string(),
            "analogy_stride" => self.analogy_stride.to_string(),
            "pca_mode" => mode_str(self.pca_mode).to_owned(),
            "retrain" => self.retrain.to_string(),
            "grid" => list_str(&self.grid),
            "bounds" => list_str(&self.bounds),
            "seed" => self.seed.to_string(),
            "out_dir" => self.out_dir.display().to_string(),
            "threads" => self.threads.to_string(),
            _ => return None,
        })
    }

    /// Applies a `key=value` document. Blank lines and `#` comments are
    /// ignored; an empty value clears optional keys.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got {line:?}", i + 1))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.merge_str(&text)
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.merge_str(text)?;
        Ok(c)
    }

    /// Every key, one per line, in [`KEYS`] order.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let value = self.get(key).expect("every listed key has a value");
            let _ = writeln!(s, "{key}={value}");
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_config_string()).map_err(|e| Error::io(path, e))
    }

    pub fn train_config(&self, dim: usize) -> TrainConfig {
        TrainConfig {
            dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            lr_start: self.lr_start,
            lr_end: self.lr_end,
            subsample: self.subsample,
            noise_power: self.noise_power,
            seed: self.seed,
            eval_every: self.eval_every,
            threads: self.threads,
        }
    }

    /// Checks that `required` paths are set and exist, and that numeric
    /// fields are in range.
    pub fn validate(&self, required: &[&str]) -> Result<()> {
        for key in required {
            let path = match *key {
                "corpus" => &self.corpus,
                "vocab" => &self.vocab,
                "embedding" => &self.embedding,
                "model" => &self.model,
                "benchmark" => &self.benchmark,
                "analogy" => &self.analogy,
                other => unreachable!("{other} is not a path key"),
            };
            if path.is_none() {
                return Err(Error::Config(format!("missing required `{key}`")));
            }
        }
        let paths = [
            ("corpus", &self.corpus),
            ("vocab", &self.vocab),
            ("embedding", &self.embedding),
            ("model", &self.model),
            ("benchmark", &self.benchmark),
            ("analogy", &self.analogy),
        ];
        for (key, p) in paths {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(Error::Config(format!(
                        "`{key}`: no such file {}",
                        p.display()
                    )));
                }
            }
        }
        self.train_config(self.dim.max(1)).validate()?;
        if self.dim == 0 {
            return Err(Error::Config("`dim`: must be >= 1".into()));
        }
        if self.min_count == 0 {
            return Err(Error::Config("`min_count`: must be >= 1".into()));
        }
        if self.max_vocab == Some(0) {
            return Err(Error::Config("`max_vocab`: must be >= 1".into()));
        }
        if self.upper_bound < 2 {
            return Err(Error::Config("`upper_bound`: must be >= 2".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Config("`lambda`: must be finite and >= 0".into()));
        }
        if self.analogy_stride == 0 {
            return Err(Error::Config("`analogy_stride`: must be >= 1".into()));
        }
        if self.grid.contains(&0) {
            return Err(Error::Config("`grid`: dims must be >= 1".into()));
        }
        if self.bounds.iter().any(|&b| b < 2) {
            return Err(Error::Config("`bounds`: each bound must be >= 2".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identical() {
        let mut c = RunConfig::default();
        c.corpus = Some("a b/corpus.txt".into());
        c.grid = vec![25, 50, 100];
        c.lambda = 0.1 + 0.2;
        c.subsample = None;
        c.max_vocab = Some(30000);
        c.pca_mode = PcaMode::Centered;
        let text = c.to_config_string();
        assert_eq!(RunConfig::from_config_str(&text).unwrap(), c);
        assert_eq!(text.lines().count(), KEYS.len());
    }

    #[test]
    fn errors_name_the_key() {
        let e = RunConfig::from_config_str("upper_bound=lots").unwrap_err();
        assert!(e.to_string().contains("upper_bound"), "{e}");
        let e = RunConfig::from_config_str("colour=blue").unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        let e = RunConfig::default().validate(&["corpus"]).unwrap_err();
        assert!(e.to_string().contains("corpus"), "{e}");
    }

    #[test]
    fn comments_and_blank_values() {
        let c = RunConfig::from_config_str("# run\n\nsubsample=\ngrid=25, 50\n").unwrap();
        assert_eq!(c.subsample, None);
        assert_eq!(c.grid, vec![25, 50]);
    }
}
