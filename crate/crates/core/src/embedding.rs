//! Dense row-major embedding matrix and the word2vec text format.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

/// `rows × cols` matrix; row `i` is the vector of vocabulary id `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        EmbeddingMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "matrix data has {} values, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(EmbeddingMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} values, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(EmbeddingMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Copies the first `d` columns.
    pub fn leading_columns(&self, d: usize) -> EmbeddingMatrix {
        let mut data = Vec::with_capacity(self.rows * d);
        for i in 0..self.rows {
            data.extend_from_slice(&self.row(i)[..d]);
        }
        EmbeddingMatrix {
            rows: self.rows,
            cols: d,
            data,
        }
    }

    pub fn scaled(&self, factor: f64) -> EmbeddingMatrix {
        EmbeddingMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }
}

/// Writes word2vec text format: a `"<rows> <cols>"` header, then one
/// `word v1 ... vd` line per row. Values carry 9 significant digits.
pub fn write_embedding<W: Write>(
    matrix: &EmbeddingMatrix,
    words: &[String],
    mut w: W,
) -> Result<()> {
    if words.len() != matrix.rows() {
        return Err(Error::InvalidArgument(format!(
            "{} words for {} rows",
            words.len(),
            matrix.rows()
        )));
    }
    let io = |e| Error::io("<embedding>", e);
    writeln!(w, "{} {}", matrix.rows(), matrix.cols()).map_err(io)?;
    let mut line = String::new();
    for (i, word) in words.iter().enumerate() {
        line.clear();
        line.push_str(word);
        for v in matrix.row(i) {
            line.push(' ');
            line.push_str(&format!("{v:.8e}"));
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn save_embedding(
    matrix: &EmbeddingMatrix,
    vocab: &Vocabulary,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_embedding(matrix, vocab.tokens(), BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Reads word2vec text format. Word counts are not stored in the format,
/// so the returned vocabulary carries zero counts.
pub fn read_embedding<R: BufRead>(r: R) -> Result<(EmbeddingMatrix, Vocabulary)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?
        .map_err(|e| Error::parse(1, e.to_string()))?;
    let mut parts = header.split_whitespace();
    let (rows, cols) = match (parts.next(), parts.next(), parts.next()) {
        (Some(r), Some(c), None) => (
            r.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("bad row count {r:?}")))?,
            c.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("bad column count {c:?}")))?,
        ),
        _ => return Err(Error::parse(1, "header must be \"<rows> <cols>\"")),
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut words = Vec::with_capacity(rows);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        if words.len() == rows {
            return Err(Error::parse(lineno, format!("more than {rows} rows")));
        }
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("non-empty line");
        let before = data.len();
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad value {f:?}")))?;
            data.push(v);
        }
        let got = data.len() - before;
        if got != cols {
            return Err(Error::parse(
                lineno,
                format!("expected {cols} values, found {got}"),
            ));
        }
        words.push((word.to_owned(), 0));
    }
    if words.len() != rows {
        return Err(Error::parse(
            words.len() + 2,
            format!("expected {rows} rows, found {}", words.len()),
        ));
    }
    let vocab = Vocabulary::from_counts(words)?;
    Ok((EmbeddingMatrix { rows, cols, data }, vocab))
}

pub fn load_embedding(path: impl AsRef<Path>) -> Result<(EmbeddingMatrix, Vocabulary)> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_embedding(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_hand_written() {
        let text = "3 2\nfoo 1 2\nbar -0.5 0.25\nbaz 3e-2 0\n";
        let (m, v) = read_embedding(text.as_bytes()).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 2));
        assert_eq!(m.row(1), [-0.5, 0.25]);
        assert_eq!(m.row(2), [0.03, 0.0]);
        assert_eq!(v.id("baz"), Some(2));
    }

    #[test]
    fn row_length_mismatch_names_line() {
        let text = "2 3\na 1 2 3\nb 1 2 3 4\n";
        match read_embedding(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            read_embedding("2 x\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_embedding("2 1\na 1\n".as_bytes()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn round_trip_within_serialized_precision() {
        let m = EmbeddingMatrix::from_rows(&[
            vec![0.123456789123, -1.0e-7, 42.0],
            vec![std::f64::consts::PI, -2.5, 1.0 / 3.0],
        ])
        .unwrap();
        let words = vec!["x".to_owned(), "y".to_owned()];
        let mut buf = Vec::new();
        write_embedding(&m, &words, &mut buf).unwrap();
        let (back, v) = read_embedding(buf.as_slice()).unwrap();
        assert_eq!(v.tokens(), words.as_slice());
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
}
