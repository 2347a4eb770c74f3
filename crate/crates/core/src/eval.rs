//! Word-similarity (Spearman ×100) and word-analogy (3CosAdd accuracy)
//! evaluation.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::Vocabulary;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::pca::{PcaMode, PcaModel};

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityPair {
    pub word1: String,
    pub word2: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityBenchmark {
    pub name: String,
    pub pairs: Vec<SimilarityPair>,
}

impl SimilarityBenchmark {
    /// Parses `word1 word2 score` rows separated by tabs or commas
    /// (whitespace as a last resort). Blank lines and `#` comments are
    /// ignored; a first row whose score is not a number is a header.
    pub fn parse<R: BufRead>(name: &str, r: R) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut seen_row = false;
        for (i, line) in r.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = if line.contains('\t') {
                line.split('\t').map(str::trim).collect()
            } else if line.contains(',') {
                line.split(',').map(str::trim).collect()
            } else {
                line.split_whitespace().collect()
            };
            if fields.len() < 3 {
                return Err(Error::parse(lineno, "expected word1, word2, score"));
            }
            let first = !seen_row;
            seen_row = true;
            let score = match fields[2].parse::<f64>() {
                Ok(s) if s.is_finite() => s,
                Ok(_) => return Err(Error::parse(lineno, "score is not finite")),
                Err(_) if first => continue,
                Err(_) => return Err(Error::parse(lineno, format!("bad score {:?}", fields[2]))),
            };
            pairs.push(SimilarityPair {
                word1: fields[0].to_owned(),
                word2: fields[1].to_owned(),
                score,
            });
        }
        if pairs.is_empty() {
            return Err(Error::parse(0, "no similarity pairs found"));
        }
        Ok(SimilarityBenchmark {
            name: name.to_owned(),
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Number of pairs that repeat an earlier (unordered) word pair.
    pub fn duplicate_count(&self) -> usize {
        let mut seen = HashSet::new();
        self.pairs
            .iter()
            .filter(|p| {
                let key = if p.word1 <= p.word2 {
                    (p.word1.as_str(), p.word2.as_str())
                } else {
                    (p.word2.as_str(), p.word1.as_str())
                };
                !seen.insert(key)
            })
            .count()
    }

    pub fn lowercased(&self) -> Self {
        SimilarityBenchmark {
            name: self.name.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|p| SimilarityPair {
                    word1: p.word1.to_lowercase(),
                    word2: p.word2.to_lowercase(),
                    score: p.score,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyQuestion {
    pub a: String,
    pub b: String,
    pub c: String,
    pub expected: String,
    /// Index into [`AnalogyBenchmark::sections`].
    pub section: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyBenchmark {
    pub name: String,
    pub questions: Vec<AnalogyQuestion>,
    pub sections: Vec<String>,
}

impl AnalogyBenchmark {
    /// Parses word2vec `questions-words` format: `a b c d` rows and
    /// `: section` labels.
    pub fn parse<R: BufRead>(name: &str, r: R) -> Result<Self> {
        let mut questions = Vec::new();
        let mut sections = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(label) = line.strip_prefix(':') {
                sections.push(label.trim().to_owned());
                continue;
            }
            let w: Vec<&str> = line.split_whitespace().collect();
            let [a, b, c, d] = w[..] else {
                return Err(Error::parse(
                    lineno,
                    format!("expected 4 words, found {}", w.len()),
                ));
            };
            if a == b || c == d {
                return Err(Error::parse(
                    lineno,
                    "question repeats a word within a pair",
                ));
            }
            questions.push(AnalogyQuestion {
                a: a.to_owned(),
                b: b.to_owned(),
                c: c.to_owned(),
                expected: d.to_owned(),
                section: sections.len().checked_sub(1),
            });
        }
        if questions.is_empty() {
            return Err(Error::parse(0, "no analogy questions found"));
        }
        Ok(AnalogyBenchmark {
            name: name.to_owned(),
            questions,
            sections,
        })
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn lowercased(&self) -> Self {
        AnalogyBenchmark {
            name: self.name.clone(),
            questions: self
                .questions
                .iter()
                .map(|q| AnalogyQuestion {
                    a: q.a.to_lowercase(),
                    b: q.b.to_lowercase(),
                    c: q.c.to_lowercase(),
                    expected: q.expected.to_lowercase(),
                    section: q.section,
                })
                .collect(),
            sections: self.sections.clone(),
        }
    }
}

fn benchmark_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn load_similarity(path: impl AsRef<Path>) -> Result<SimilarityBenchmark> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    SimilarityBenchmark::parse(&benchmark_name(path), BufReader::new(f))
}

pub fn load_analogy(path: impl AsRef<Path>) -> Result<AnalogyBenchmark> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    AnalogyBenchmark::parse(&benchmark_name(path), BufReader::new(f))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvalResult {
    pub metric: f64,
    pub covered: usize,
    pub skipped: usize,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

/// A single square root keeps `cos(v, v)` at exactly 1 in any basis, so
/// repeated pairs stay tied after a rotation.
#[inline]
fn cosine_from_parts(dot: f64, norm_sq_u: f64, norm_sq_v: f64) -> Result<f64> {
    if norm_sq_u == 0.0 || norm_sq_v == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (norm_sq_u * norm_sq_v).sqrt()).clamp(-1.0, 1.0))
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::InvalidArgument(format!(
            "vector lengths differ: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    cosine_from_parts(dot(u, v), dot(u, u), dot(v, v))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroRankVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman correlation: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "spearman needs two equal-length inputs of at least 2 values, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

fn pair_ids(vocab: &Vocabulary, p: &SimilarityPair) -> Option<(usize, usize)> {
    Some((vocab.id(&p.word1)?, vocab.id(&p.word2)?))
}

/// Scores `embedding` (row `i` ↔ vocabulary id `i`) on a similarity
/// benchmark. Pairs with an unknown word or a zero vector are skipped.
pub fn evaluate_similarity(
    embedding: &EmbeddingMatrix,
    vocab: &Vocabulary,
    bench: &SimilarityBenchmark,
) -> Result<EvalResult> {
    check_rows(embedding, vocab)?;
    let mut cos = Vec::with_capacity(bench.len());
    let mut human = Vec::with_capacity(bench.len());
    for p in &bench.pairs {
        let Some((a, b)) = pair_ids(vocab, p) else {
            continue;
        };
        if let Ok(c) = cosine(embedding.row(a), embedding.row(b)) {
            cos.push(c);
            human.push(p.score);
        }
    }
    similarity_result(&cos, &human, bench.len())
}

fn similarity_result(cos: &[f64], human: &[f64], total: usize) -> Result<EvalResult> {
    if cos.len() < 2 {
        return Err(Error::InsufficientCoverage {
            covered: cos.len(),
            needed: 2,
        });
    }
    Ok(EvalResult {
        metric: 100.0 * spearman(cos, human)?,
        covered: cos.len(),
        skipped: total - cos.len(),
    })
}

fn check_rows(embedding: &EmbeddingMatrix, vocab: &Vocabulary) -> Result<()> {
    if embedding.rows() != vocab.len() {
        return Err(Error::InvalidArgument(format!(
            "embedding has {} rows but vocabulary has {} tokens",
            embedding.rows(),
            vocab.len()
        )));
    }
    Ok(())
}

/// 3CosAdd analogy accuracy: the answer to `a : b :: c : ?` is the word
/// (other than a, b, c) whose vector has the highest cosine with
/// `b - a + c`. With `normalize` the query is built from unit vectors.
pub fn evaluate_analogy(
    embedding: &EmbeddingMatrix,
    vocab: &Vocabulary,
    bench: &AnalogyBenchmark,
    normalize: bool,
) -> Result<EvalResult> {
    check_rows(embedding, vocab)?;
    let dim = embedding.cols();
    let rows = embedding.rows();
    let inv_norms: Vec<f64> = (0..rows)
        .map(|i| {
            let n = dot(embedding.row(i), embedding.row(i)).sqrt();
            if n > 0.0 {
                1.0 / n
            } else {
                0.0
            }
        })
        .collect();
    let mut unit = embedding.clone();
    for i in 0..rows {
        let s = inv_norms[i];
        unit.row_mut(i).iter_mut().for_each(|x| *x *= s);
    }
    let source = if normalize { &unit } else { embedding };

    let mut query = vec![0.0; dim];
    let (mut covered, mut correct) = (0usize, 0usize);
    for q in &bench.questions {
        let ids = (|| {
            Some((
                vocab.id(&q.a)?,
                vocab.id(&q.b)?,
                vocab.id(&q.c)?,
                vocab.id(&q.expected)?,
            ))
        })();
        let Some((a, b, c, expected)) = ids else {
            continue;
        };
        covered += 1;
        for (k, x) in query.iter_mut().enumerate() {
            *x = source.row(b)[k] - source.row(a)[k] + source.row(c)[k];
        }
        let mut best: Option<(usize, f64)> = None;
        for w in 0..rows {
            if w == a || w == b || w == c || inv_norms[w] == 0.0 {
                continue;
            }
            let s = dot(unit.row(w), &query);
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((w, s));
            }
        }
        let Some((answer, _)) = best else {
            return Err(Error::InvalidArgument("no analogy candidates left".into()));
        };
        if answer == expected {
            correct += 1;
        }
    }
    let metric = if covered == 0 {
        0.0
    } else {
        100.0 * correct as f64 / covered as f64
    };
    Ok(EvalResult {
        metric,
        covered,
        skipped: bench.len() - covered,
    })
}

/// One entry of a truncation sweep; `metric` is NaN where the score is
/// undefined at that dimensionality (fewer than two usable pairs or no
/// rank variance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub d: usize,
    pub metric: f64,
    pub covered: usize,
}

/// Similarity score of every truncation `d = N-1, ..., 1` of an uncentered
/// model, in that order.
///
/// Each pair keeps prefix sums of its dot product and squared norms over
/// the coefficient columns, so dropping direction `d+1` costs O(1) per
/// pair and each value equals a fresh evaluation of `truncate(model, d)`.
pub fn evaluate_similarity_sweep(
    model: &PcaModel,
    vocab: &Vocabulary,
    bench: &SimilarityBenchmark,
) -> Result<Vec<SweepPoint>> {
    if model.mode() != PcaMode::Uncentered {
        return Err(Error::InvalidArgument(
            "similarity sweep requires an uncentered model".into(),
        ));
    }
    if model.rows() != vocab.len() {
        return Err(Error::InvalidArgument(format!(
            "model has {} rows but vocabulary has {} tokens",
            model.rows(),
            vocab.len()
        )));
    }
    let n = model.dims();
    let coef = model.coefficients();
    struct Prefix {
        dot: Vec<f64>,
        n1: Vec<f64>,
        n2: Vec<f64>,
        human: f64,
    }
    let mut prefixes = Vec::new();
    for p in &bench.pairs {
        let Some((a, b)) = pair_ids(vocab, p) else {
            continue;
        };
        let (ra, rb) = (coef.row(a), coef.row(b));
        let mut pre = Prefix {
            dot: Vec::with_capacity(n + 1),
            n1: Vec::with_capacity(n + 1),
            n2: Vec::with_capacity(n + 1),
            human: p.score,
        };
        let (mut d, mut s1, mut s2) = (0.0, 0.0, 0.0);
        pre.dot.push(d);
        pre.n1.push(s1);
        pre.n2.push(s2);
        for k in 0..n {
            d += ra[k] * rb[k];
            s1 += ra[k] * ra[k];
            s2 += rb[k] * rb[k];
            pre.dot.push(d);
            pre.n1.push(s1);
            pre.n2.push(s2);
        }
        prefixes.push(pre);
    }
    if prefixes.len() < 2 {
        return Err(Error::InsufficientCoverage {
            covered: prefixes.len(),
            needed: 2,
        });
    }

    let mut out = Vec::with_capacity(n.saturating_sub(1));
    let mut cos = Vec::with_capacity(prefixes.len());
    let mut human = Vec::with_capacity(prefixes.len());
    for d in (1..n).rev() {
        cos.clear();
        human.clear();
        for p in &prefixes {
            if let Ok(c) = cosine_from_parts(p.dot[d], p.n1[d], p.n2[d]) {
                cos.push(c);
                human.push(p.human);
            }
        }
        let metric = similarity_result(&cos, &human, bench.len())
            .map(|r| r.metric)
            .unwrap_or(f64::NAN);
        out.push(SweepPoint {
            d,
            metric,
            covered: cos.len(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn vocab(words: &[&str]) -> Vocabulary {
        Vocabulary::from_counts(words.iter().map(|w| (w.to_string(), 1)).collect()).unwrap()
    }

    #[test]
    fn parse_similarity_rows() {
        let b = SimilarityBenchmark::parse("t", "cat\tdog\t7.35\n".as_bytes()).unwrap();
        assert_eq!(b.pairs[0].word1, "cat");
        assert_eq!(b.pairs[0].score, 7.35);
        let text = "# comment\nWord 1,Word 2,Human\na,b,1\nc,d,2.5\n";
        let b = SimilarityBenchmark::parse("t", text.as_bytes()).unwrap();
        assert_eq!(b.len(), 2);
        let err = SimilarityBenchmark::parse("t", "a\tb\t1\nc\td\tx\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(SimilarityBenchmark::parse("t", "w1 w2 score\n".as_bytes()).is_err());
        let b = SimilarityBenchmark::parse("t", "a b 1\nb a 2\n".as_bytes()).unwrap();
        assert_eq!(b.duplicate_count(), 1);
    }

    #[test]
    fn parse_analogy_rows() {
        let text =
            ": capital-common\nAthens Greece Baghdad Iraq\n\n: family\nboy girl brother sister\n";
        let b = AnalogyBenchmark::parse("q", text.as_bytes()).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.sections, ["capital-common", "family"]);
        assert_eq!(b.questions[1].section, Some(1));
        assert_eq!(b.lowercased().questions[0].a, "athens");
        let err = AnalogyBenchmark::parse("q", "a b c\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(AnalogyBenchmark::parse("q", ": only\n".as_bytes()).is_err());
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[2.0, 1.0], &[2.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(
            spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(),
            1.0
        );
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!((spearman(&[1.0, 2.0, 3.0], &[2.0, 1.0, 3.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            spearman(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::ZeroRankVariance)
        ));
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert_eq!(average_ranks(&[5.0, 1.0, 5.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn similarity_perfect_and_oov() {
        let v = vocab(&["a", "b", "c", "d"]);
        let e = EmbeddingMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.2],
        ])
        .unwrap();
        let pairs = [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("zz", "a")];
        let bench = SimilarityBenchmark {
            name: "t".into(),
            pairs: pairs
                .iter()
                .map(|(x, y)| SimilarityPair {
                    word1: x.to_string(),
                    word2: y.to_string(),
                    score: if *x == "zz" {
                        0.0
                    } else {
                        cosine(e.row(v.id(x).unwrap()), e.row(v.id(y).unwrap())).unwrap()
                    },
                })
                .collect(),
        };
        let r = evaluate_similarity(&e, &v, &bench).unwrap();
        assert_eq!(r.metric, 100.0);
        assert_eq!((r.covered, r.skipped), (4, 1));

        let oov = SimilarityBenchmark {
            name: "t".into(),
            pairs: vec![SimilarityPair {
                word1: "x".into(),
                word2: "y".into(),
                score: 1.0,
            }],
        };
        assert!(matches!(
            evaluate_similarity(&e, &v, &oov),
            Err(Error::InsufficientCoverage { covered: 0, .. })
        ));
    }

    #[test]
    fn analogy_constructed_fixture() {
        // king - man + woman = queen on near one-hot vectors
        let v = vocab(&["man", "woman", "king", "queen", "apple"]);
        let e = EmbeddingMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.05],
            vec![1.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 1.0, 0.02],
            vec![1.0, 1.0, 1.0, 0.01],
            vec![0.0, 0.0, 0.1, 1.0],
        ])
        .unwrap();
        let q = |a: &str, b: &str, c: &str, d: &str| AnalogyQuestion {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            expected: d.into(),
            section: None,
        };
        let bench = AnalogyBenchmark {
            name: "t".into(),
            questions: vec![
                q("man", "woman", "king", "queen"),
                q("man", "woman", "prince", "princess"),
            ],
            sections: vec![],
        };
        let r = evaluate_analogy(&e, &v, &bench, true).unwrap();
        assert_eq!((r.metric, r.covered, r.skipped), (100.0, 1, 1));
    }

    #[test]
    fn analogy_needs_candidates() {
        let v = vocab(&["a", "b", "c"]);
        let e = EmbeddingMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let bench = AnalogyBenchmark {
            name: "t".into(),
            questions: vec![AnalogyQuestion {
                a: "a".into(),
                b: "b".into(),
                c: "c".into(),
                expected: "a".into(),
                section: None,
            }],
            sections: vec![],
        };
        assert!(evaluate_analogy(&e, &v, &bench, true).is_err());
    }

    #[test]
    fn sweep_rejects_centered_models() {
        let e =
            EmbeddingMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let m = crate::pca::fit_pca(&e, PcaMode::Centered).unwrap();
        let v = vocab(&["a", "b", "c"]);
        let b = SimilarityBenchmark::parse("t", "a b 1\nb c 2\n".as_bytes()).unwrap();
        assert!(evaluate_similarity_sweep(&m, &v, &b).is_err());
    }
}
