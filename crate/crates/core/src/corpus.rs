//! Corpus ingestion: tokenization, vocabulary, subsampling and the
//! negative-sampling noise distribution.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default subsampling threshold.
pub const DEFAULT_SUBSAMPLE: f64 = 1e-4;
/// Default exponent applied to unigram counts for noise sampling.
pub const DEFAULT_NOISE_POWER: f64 = 0.75;
/// Default quantization of the cumulative noise table.
pub const DEFAULT_NOISE_RESOLUTION: u64 = 100_000_000;

/// Splits UTF-8 text on whitespace.
///
/// Invalid UTF-8 is reported with the byte offset of the first bad sequence.
pub fn tokenize(bytes: &[u8], lowercase: bool) -> Result<Vec<String>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Encoding {
        offset: e.valid_up_to(),
    })?;
    Ok(text
        .split_whitespace()
        .map(|t| {
            if lowercase {
                t.to_lowercase()
            } else {
                t.to_owned()
            }
        })
        .collect())
}

/// Reads a whole corpus file and tokenizes it.
pub fn tokenize_file(path: impl AsRef<Path>, lowercase: bool) -> Result<Vec<String>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    tokenize(&bytes, lowercase)
}

/// Token ↔ id map with raw corpus frequencies. Ids are assigned in
/// descending frequency order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    total_count: u64,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from `(token, count)` pairs, which must already be
    /// in id order.
    pub fn from_counts(entries: Vec<(String, u64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut tokens = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (id, (token, count)) in entries.into_iter().enumerate() {
            if index.insert(token.clone(), id).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate token {token:?} in vocabulary"
                )));
            }
            tokens.push(token);
            counts.push(count);
        }
        let total_count = counts.iter().sum();
        Ok(Vocabulary {
            tokens,
            counts,
            total_count,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts[id]
    }

    /// Writes one `token<TAB>count` line per token, in id order.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (token, count) in self.tokens.iter().zip(&self.counts) {
            writeln!(w, "{token}\t{count}")?;
        }
        w.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let (token, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(i + 1, "expected token<TAB>count"))?;
            let count: u64 = count
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad count {count:?}")))?;
            entries.push((token.to_owned(), count));
        }
        Self::from_counts(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file))
    }
}

/// Counts tokens, drops those below `min_count`, and orders the rest by
/// descending frequency (ties keep first-occurrence order). When
/// `max_vocab` is set only that many of the most frequent tokens are kept.
pub fn build_vocabulary<S: AsRef<str>>(
    tokens: &[S],
    min_count: u64,
    max_vocab: Option<usize>,
) -> Result<Vocabulary> {
    if min_count == 0 {
        return Err(Error::InvalidArgument("min_count must be >= 1".into()));
    }
    let mut freq: IndexMap<&str, u64> = IndexMap::new();
    for t in tokens {
        *freq.entry(t.as_ref()).or_insert(0) += 1;
    }
    let mut entries: Vec<(String, u64)> = freq
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(t, c)| (t.to_owned(), c))
        .collect();
    // stable: equal counts stay in first-occurrence order
    entries.sort_by(|a, b| b.1.cmp(&a.1));
    if let Some(max) = max_vocab {
        entries.truncate(max);
    }
    Vocabulary::from_counts(entries)
}

/// Probability of keeping one occurrence of a word with corpus frequency
/// `count / total_count` under threshold `t`.
pub fn keep_probability(count: u64, total_count: u64, t: f64) -> f64 {
    let f = count as f64 / total_count as f64;
    (((f / t).sqrt() + 1.0) * (t / f)).clamp(0.0, 1.0)
}

/// Cumulative distribution over token ids proportional to `count^power`.
#[derive(Debug, Clone)]
pub struct NoiseTable {
    cumulative: Vec<f64>,
    power: f64,
}

impl NoiseTable {
    /// Cumulative mass is quantized to multiples of `1 / resolution`, the
    /// same granularity a word2vec unigram table of that size would have.
    pub fn new(vocab: &Vocabulary, power: f64, resolution: u64) -> Result<Self> {
        Self::from_counts(vocab.counts(), power, resolution)
    }

    pub fn from_counts(counts: &[u64], power: f64, resolution: u64) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if !(power > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise power must be > 0, got {power}"
            )));
        }
        if (resolution as usize) < counts.len() {
            return Err(Error::InvalidArgument(format!(
                "noise resolution {resolution} below vocabulary size {}",
                counts.len()
            )));
        }
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(power)).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate("noise distribution has zero mass".into()));
        }
        let res = resolution as f64;
        let mut running = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                running += w;
                ((running / total) * res).round() / res
            })
            .collect();
        *cumulative.last_mut().expect("non-empty") = 1.0;
        Ok(NoiseTable { cumulative, power })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Probability mass assigned to `id`.
    pub fn probability(&self, id: usize) -> f64 {
        let prev = if id == 0 {
            0.0
        } else {
            self.cumulative[id - 1]
        };
        self.cumulative[id] - prev
    }

    /// Maps a uniform deviate in `[0, 1)` to a token id.
    #[inline]
    pub fn sample_with(&self, u: f64) -> usize {
        let id = self.cumulative.partition_point(|&c| c <= u);
        id.min(self.cumulative.len() - 1)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_with(rng.random::<f64>())
    }
}

/// Subsampling settings for [`encode`].
#[derive(Debug, Clone, Copy)]
pub struct Subsample {
    pub threshold: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeStats {
    pub kept: usize,
    pub oov_dropped: usize,
    pub subsampled: usize,
}

/// Maps tokens to ids, silently dropping out-of-vocabulary tokens.
pub fn encode<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
    subsample: Option<Subsample>,
) -> (Vec<u32>, EncodeStats) {
    let mut stats = EncodeStats::default();
    let keep: Option<(Vec<f64>, ChaCha8Rng)> = subsample.map(|s| {
        let probs = vocab
            .counts()
            .iter()
            .map(|&c| keep_probability(c, vocab.total_count(), s.threshold))
            .collect();
        (probs, ChaCha8Rng::seed_from_u64(s.seed))
    });
    let mut keep = keep;
    let mut ids = Vec::with_capacity(tokens.len());
    for t in tokens {
        let Some(id) = vocab.id(t.as_ref()) else {
            stats.oov_dropped += 1;
            continue;
        };
        if let Some((probs, rng)) = keep.as_mut() {
            if rng.random::<f64>() >= probs[id] {
                stats.subsampled += 1;
                continue;
            }
        }
        ids.push(id as u32);
    }
    stats.kept = ids.len();
    (ids, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize(b"the Quick fox", true).unwrap(),
            ["the", "quick", "fox"]
        );
        assert!(tokenize(b"", false).unwrap().is_empty());
        assert_eq!(tokenize(b"a  b\tc\n", false).unwrap(), ["a", "b", "c"]);
        assert_eq!(tokenize(b"The", false).unwrap(), ["The"]);
    }

    #[test]
    fn tokenize_reports_bad_offset() {
        match tokenize(b"ok \xff bad", false) {
            Err(Error::Encoding { offset }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vocabulary_threshold() {
        let v = build_vocabulary(&["a", "a", "b"], 2, None).unwrap();
        assert_eq!(v.tokens(), ["a"]);
        assert_eq!(v.counts(), [2]);
        assert_eq!(v.total_count(), 2);
    }

    #[test]
    fn vocabulary_tie_order() {
        let v = build_vocabulary(&["a", "b", "a", "b"], 1, None).unwrap();
        assert_eq!(v.tokens(), ["a", "b"]);
        assert_eq!(v.counts(), [2, 2]);
        assert_eq!(v.id("a"), Some(0));
        assert_eq!(v.id("b"), Some(1));
        let v = build_vocabulary(&["b", "a", "a", "b", "c"], 1, Some(2)).unwrap();
        assert_eq!(v.tokens(), ["b", "a"]);
    }

    #[test]
    fn vocabulary_empty_is_error() {
        assert!(matches!(
            build_vocabulary(&["a"], 2, None),
            Err(Error::EmptyVocabulary)
        ));
        assert!(build_vocabulary::<&str>(&[], 1, None).is_err());
        assert!(build_vocabulary(&["a"], 0, None).is_err());
    }

    #[test]
    fn vocabulary_file_round_trip() {
        let v = build_vocabulary(&["x", "y", "y", "z", "z", "z"], 1, None).unwrap();
        let mut buf = Vec::new();
        v.write_to(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "z\t3\ny\t2\nx\t1\n"
        );
        let back = Vocabulary::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, v);
        let err = Vocabulary::read_from("a\t1\nb 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn keep_probability_examples() {
        let t = 1e-3;
        // f == t
        assert_eq!(keep_probability(1, 1000, t), 1.0);
        // f == 100 t
        assert!((keep_probability(100, 1000, t) - 0.11).abs() < 1e-12);
        // rare word, huge threshold
        assert_eq!(keep_probability(1, 1_000_000, 10.0), 1.0);
    }

    #[test]
    fn noise_table_examples() {
        let t = NoiseTable::from_counts(&[1, 1], 0.75, 1000).unwrap();
        assert!((t.probability(0) - 0.5).abs() < 1e-12);
        assert!((t.probability(1) - 0.5).abs() < 1e-12);

        let t = NoiseTable::from_counts(&[8, 1], 1.0, 9).unwrap();
        assert!((t.probability(0) - 8.0 / 9.0).abs() < 1e-12);

        let t = NoiseTable::from_counts(&[16, 1], 0.75, DEFAULT_NOISE_RESOLUTION).unwrap();
        assert!((t.probability(0) - 8.0 / 9.0).abs() < 1e-8);
        assert!((t.probability(1) - 1.0 / 9.0).abs() < 1e-8);
        assert_eq!(*t.cumulative().last().unwrap(), 1.0);
    }

    #[test]
    fn noise_table_errors() {
        assert!(NoiseTable::from_counts(&[], 0.75, 10).is_err());
        assert!(NoiseTable::from_counts(&[1, 2], 0.0, 10).is_err());
        assert!(NoiseTable::from_counts(&[1, 2, 3], 0.75, 2).is_err());
    }

    #[test]
    fn noise_sampling_edges() {
        let t = NoiseTable::from_counts(&[1, 1, 2], 1.0, 1000).unwrap();
        assert_eq!(t.sample_with(0.0), 0);
        assert_eq!(t.sample_with(0.2499), 0);
        assert_eq!(t.sample_with(0.25), 1);
        assert_eq!(t.sample_with(0.5), 2);
        assert_eq!(t.sample_with(0.999_999), 2);
    }

    #[test]
    fn encode_drops_oov() {
        let v = build_vocabulary(&["a"], 1, None).unwrap();
        let (ids, stats) = encode(&["a", "z", "a"], &v, None);
        assert_eq!(ids, [0, 0]);
        assert_eq!(
            stats,
            EncodeStats {
                kept: 2,
                oov_dropped: 1,
                subsampled: 0
            }
        );
    }

    #[test]
    fn encode_subsample_is_seeded() {
        let tokens: Vec<String> = (0..5000).map(|i| format!("w{}", i % 7 + (i % 3))).collect();
        let v = build_vocabulary(&tokens, 1, None).unwrap();
        let s = Some(Subsample {
            threshold: 1e-3,
            seed: 7,
        });
        let (a, sa) = encode(&tokens, &v, s);
        let (b, _) = encode(&tokens, &v, s);
        assert_eq!(a, b);
        assert!(sa.subsampled > 0);
        assert_eq!(sa.kept + sa.subsampled, tokens.len());
    }
}
