//! Principal-direction decomposition of an embedding matrix.
//!
//! `E ≈ mean + C·Uᵀ`, where the columns of `U` are orthonormal directions
//! sorted by explained variance and row `w` of `C` holds the coordinates
//! of word `w`. Removing direction `k` from every word vector (subtracting
//! `C[:,k]·u_kᵀ`) leaves exactly the first `k-1` columns of `C` in play,
//! which is why sweeps can work in coefficient space.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use nalgebra::DMatrix;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"DSPCA\x00\x00\x01";

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PcaMode {
    /// Plain SVD of `E`; no mean term.
    Uncentered,
    /// SVD of `E` minus its column mean.
    Centered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mode: PcaMode,
    /// `N × N`, column `k` is direction `k`.
    basis: DMatrix<f64>,
    coefficients: EmbeddingMatrix,
    explained_variance: Vec<f64>,
    mean: Option<Vec<f64>>,
}

/// Fits the decomposition through a thin SVD of the (optionally centered)
/// embedding. Explained variance of direction `k` is `s_k² / (rows - 1)`.
/// Each direction is signed so that its largest-magnitude entry is positive
/// (the lowest index wins a tie).
pub fn fit_pca(e: &EmbeddingMatrix, mode: PcaMode) -> Result<PcaModel> {
    let (rows, cols) = (e.rows(), e.cols());
    if cols == 0 || rows <= cols {
        return Err(Error::InvalidArgument(format!(
            "PCA needs more rows than columns, got {rows}x{cols}"
        )));
    }
    if !e.is_finite() {
        return Err(Error::NonFinite(
            "embedding contains NaN or infinity".into(),
        ));
    }
    let mut centered = DMatrix::from_row_slice(rows, cols, e.as_slice());
    let mean = match mode {
        PcaMode::Uncentered => None,
        PcaMode::Centered => {
            let mean: Vec<f64> = (0..cols)
                .map(|j| centered.column(j).sum() / rows as f64)
                .collect();
            for (j, m) in mean.iter().enumerate() {
                centered.column_mut(j).add_scalar_mut(-m);
            }
            Some(mean)
        }
    };

    let svd = centered.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let s_max = svd.singular_values[order[0]];
    let cutoff = s_max * rows.max(cols) as f64 * f64::EPSILON;
    let mut basis = DMatrix::zeros(cols, cols);
    let mut explained_variance = Vec::with_capacity(cols);
    for (k, &src) in order.iter().enumerate() {
        let mut u: Vec<f64> = v_t.row(src).iter().copied().collect();
        let pivot = u
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, &x)| {
                if x.abs() > bv {
                    (i, x.abs())
                } else {
                    (bi, bv)
                }
            })
            .0;
        if u[pivot] < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        basis.column_mut(k).copy_from_slice(&u);
        let s = svd.singular_values[src];
        let s = if s <= cutoff { 0.0 } else { s };
        explained_variance.push(s * s / (rows - 1) as f64);
    }

    let coef = &centered * &basis;
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        data.extend(coef.row(i).iter());
    }
    Ok(PcaModel {
        mode,
        basis,
        coefficients: EmbeddingMatrix::from_vec(rows, cols, data)?,
        explained_variance,
        mean,
    })
}

/// The first `d` coefficient columns of a fitted model.
#[derive(Debug, Clone)]
pub struct TruncatedEmbedding<'a> {
    pub values: EmbeddingMatrix,
    pub d: usize,
    pub source: &'a PcaModel,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct VarianceReport {
    pub ratios: Vec<f64>,
    /// First over last explained variance; infinite when the last is zero.
    pub spread: f64,
    pub spread_is_infinite: bool,
}

impl VarianceReport {
    /// Variance share of the top quarter of directions over the bottom
    /// quarter.
    pub fn quartile_ratio(&self) -> f64 {
        let q = (self.ratios.len() / 4).max(1);
        let top: f64 = self.ratios[..q].iter().sum();
        let bottom: f64 = self.ratios[self.ratios.len() - q..].iter().sum();
        top / bottom
    }
}

impl PcaModel {
    pub fn mode(&self) -> PcaMode {
        self.mode
    }

    /// Number of directions `N`.
    pub fn dims(&self) -> usize {
        self.basis.ncols()
    }

    pub fn rows(&self) -> usize {
        self.coefficients.rows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn coefficients(&self) -> &EmbeddingMatrix {
        &self.coefficients
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    pub fn mean(&self) -> Option<&[f64]> {
        self.mean.as_deref()
    }

    fn check_d(&self, d: usize) -> Result<()> {
        if d == 0 || d > self.dims() {
            return Err(Error::DimensionOutOfRange {
                d,
                max: self.dims(),
            });
        }
        Ok(())
    }

    pub fn truncate(&self, d: usize) -> Result<TruncatedEmbedding<'_>> {
        self.check_d(d)?;
        Ok(TruncatedEmbedding {
            values: self.coefficients.leading_columns(d),
            d,
            source: self,
        })
    }

    /// `mean + Σ_{k<d} C[:,k]·u_kᵀ` in the original coordinates.
    pub fn reconstruct(&self, d: usize) -> Result<EmbeddingMatrix> {
        self.check_d(d)?;
        let (rows, n) = (self.rows(), self.dims());
        let mut out = EmbeddingMatrix::zeros(rows, n);
        for i in 0..rows {
            let c = &self.coefficients.row(i)[..d];
            let row = out.row_mut(i);
            if let Some(m) = &self.mean {
                row.copy_from_slice(m);
            }
            for (k, &ck) in c.iter().enumerate() {
                for (x, u) in row.iter_mut().zip(self.basis.column(k).iter()) {
                    *x += ck * u;
                }
            }
        }
        Ok(out)
    }

    pub fn explained_variance_report(&self) -> Result<VarianceReport> {
        let total: f64 = self.explained_variance.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate("all explained variances are zero".into()));
        }
        let ratios = self.explained_variance.iter().map(|v| v / total).collect();
        let first = self.explained_variance[0];
        let last = *self.explained_variance.last().expect("N >= 1");
        let spread_is_infinite = last == 0.0;
        Ok(VarianceReport {
            ratios,
            spread: if spread_is_infinite {
                f64::INFINITY
            } else {
                first / last
            },
            spread_is_infinite,
        })
    }

    /// Mean absolute coefficient per direction across the vocabulary.
    pub fn coefficient_mean_profile(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dims()];
        for i in 0..self.rows() {
            for (s, c) in sums.iter_mut().zip(self.coefficients.row(i)) {
                *s += c.abs();
            }
        }
        let n = self.rows() as f64;
        sums.into_iter().map(|s| s / n).collect()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_u8(match self.mode {
            PcaMode::Uncentered => 0,
            PcaMode::Centered => 1,
        })?;
        w.write_u8(self.mean.is_some() as u8)?;
        w.write_u64::<LittleEndian>(self.rows() as u64)?;
        w.write_u64::<LittleEndian>(self.dims() as u64)?;
        let mut put = |xs: &[f64]| -> std::io::Result<()> {
            for &x in xs {
                w.write_f64::<LittleEndian>(x)?;
            }
            Ok(())
        };
        if let Some(m) = &self.mean {
            put(m)?;
        }
        put(&self.explained_variance)?;
        put(self.basis.as_slice())?;
        put(self.coefficients.as_slice())?;
        w.flush()
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let bad = |m: &str| Error::parse(0, format!("PCA model: {m}"));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| bad("truncated header"))?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        let mut read = || -> std::io::Result<_> {
            let mode = r.read_u8()?;
            let has_mean = r.read_u8()?;
            let rows = r.read_u64::<LittleEndian>()? as usize;
            let cols = r.read_u64::<LittleEndian>()? as usize;
            let mut take = |n: usize| -> std::io::Result<Vec<f64>> {
                let mut v = vec![0.0; n];
                r.read_f64_into::<LittleEndian>(&mut v)?;
                Ok(v)
            };
            let mean = if has_mean == 1 {
                Some(take(cols)?)
            } else {
                None
            };
            let var = take(cols)?;
            let basis = take(cols * cols)?;
            let coef = take(rows * cols)?;
            Ok((mode, mean, rows, cols, var, basis, coef))
        };
        let (mode, mean, rows, cols, var, basis, coef) = read().map_err(|e| bad(&e.to_string()))?;
        let mode = match mode {
            0 => PcaMode::Uncentered,
            1 => PcaMode::Centered,
            m => return Err(bad(&format!("unknown mode {m}"))),
        };
        if (mode == PcaMode::Centered) != mean.is_some() {
            return Err(bad("mean present iff centered"));
        }
        Ok(PcaModel {
            mode,
            basis: DMatrix::from_column_slice(cols, cols, &basis),
            coefficients: EmbeddingMatrix::from_vec(rows, cols, coef)?,
            explained_variance: var,
            mean,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(f))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(f))
    }
}

/// Writes the `k,variance,ratio,mean_abs_coef` table (1-based `k`).
pub fn write_variance_csv<W: Write>(model: &PcaModel, mut w: W) -> Result<()> {
    let report = model.explained_variance_report()?;
    let profile = model.coefficient_mean_profile();
    let io = |e| Error::io("<variance csv>", e);
    writeln!(w, "k,variance,ratio,mean_abs_coef").map_err(io)?;
    for k in 0..model.dims() {
        writeln!(
            w,
            "{},{},{},{}",
            k + 1,
            model.explained_variance()[k],
            report.ratios[k],
            profile[k]
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_matrix(rows: usize, cols: usize, seed: u64) -> EmbeddingMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols)
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        EmbeddingMatrix::from_vec(rows, cols, data).unwrap()
    }

    fn max_orthonormal_deviation(m: &PcaModel) -> f64 {
        let g = m.basis().transpose() * m.basis();
        let n = m.dims();
        (g - DMatrix::<f64>::identity(n, n)).amax()
    }

    fn gram(m: &EmbeddingMatrix) -> DMatrix<f64> {
        let a = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
        &a * a.transpose()
    }

    #[test]
    fn axis_aligned_example() {
        let e = EmbeddingMatrix::from_rows(&[
            vec![3.0, 0.0],
            vec![-3.0, 0.0],
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
        ])
        .unwrap();
        let m = fit_pca(&e, PcaMode::Uncentered).unwrap();
        assert!((m.basis()[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(m.basis()[(1, 0)].abs() < 1e-12);
        assert_eq!(m.explained_variance()[1], 0.0);
        assert!((m.explained_variance()[0] - 20.0 / 3.0).abs() < 1e-12);
        let r = m.explained_variance_report().unwrap();
        assert!(r.spread_is_infinite && r.spread.is_infinite());
    }

    #[test]
    fn small_matrix_orthonormal() {
        let e = random_matrix(4, 2, 9);
        let m = fit_pca(&e, PcaMode::Uncentered).unwrap();
        assert!(max_orthonormal_deviation(&m) < 1e-10);
    }

    #[test]
    fn reconstruction_and_sign_rule() {
        for mode in [PcaMode::Uncentered, PcaMode::Centered] {
            let e = random_matrix(50, 6, 2);
            let m = fit_pca(&e, mode).unwrap();
            let back = m.reconstruct(6).unwrap();
            for (a, b) in e.as_slice().iter().zip(back.as_slice()) {
                assert!((a - b).abs() < 1e-10);
            }
            for k in 0..6 {
                let col: Vec<f64> = m.basis().column(k).iter().copied().collect();
                let (i, _) = col.iter().enumerate().fold((0, 0.0f64), |acc, (i, &x)| {
                    if x.abs() > acc.1 {
                        (i, x.abs())
                    } else {
                        acc
                    }
                });
                assert!(col[i] > 0.0);
            }
            assert!(m.explained_variance().windows(2).all(|w| w[0] >= w[1]));
            assert_eq!(m.mean().is_some(), mode == PcaMode::Centered);
        }
    }

    #[test]
    fn truncation_matches_reconstruction_gram() {
        let e = random_matrix(50, 6, 4);
        let m = fit_pca(&e, PcaMode::Uncentered).unwrap();
        for d in 1..=6 {
            let t = m.truncate(d).unwrap();
            assert_eq!(t.values.cols(), d);
            let diff = (gram(&t.values) - gram(&m.reconstruct(d).unwrap())).amax();
            assert!(diff < 1e-8, "d={d} diff={diff}");
        }
        let full = gram(&m.truncate(6).unwrap().values);
        assert!((full - gram(&e)).amax() < 1e-6);
    }

    #[test]
    fn reconstruction_telescopes() {
        let e = random_matrix(40, 5, 8);
        let m = fit_pca(&e, PcaMode::Uncentered).unwrap();
        for d in 1..5 {
            let hi = m.reconstruct(d + 1).unwrap();
            let lo = m.reconstruct(d).unwrap();
            for i in 0..40 {
                for j in 0..5 {
                    let step = m.coefficients().get(i, d) * m.basis()[(j, d)];
                    assert!((hi.get(i, j) - lo.get(i, j) - step).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn d_out_of_range() {
        let m = fit_pca(&random_matrix(10, 3, 1), PcaMode::Uncentered).unwrap();
        assert!(m.truncate(0).is_err());
        assert!(m.truncate(4).is_err());
        assert!(m.reconstruct(0).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(fit_pca(&random_matrix(3, 3, 1), PcaMode::Uncentered).is_err());
        let mut e = random_matrix(5, 2, 1);
        e.row_mut(2)[0] = f64::NAN;
        assert!(matches!(
            fit_pca(&e, PcaMode::Uncentered),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn variance_report_normalizes() {
        let m = fit_pca(&random_matrix(60, 7, 5), PcaMode::Centered).unwrap();
        let r = m.explained_variance_report().unwrap();
        assert!((r.ratios.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(r.spread >= 1.0 && !r.spread_is_infinite);
        let zero = fit_pca(&EmbeddingMatrix::zeros(5, 2), PcaMode::Uncentered).unwrap();
        assert!(matches!(
            zero.explained_variance_report(),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn isotropic_variance_is_flat() {
        // orthogonal design: ±e_k for each axis, repeated
        let n = 4;
        let mut rows = Vec::new();
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut r = vec![0.0; n];
                r[k] = s;
                rows.push(r);
            }
        }
        let m = fit_pca(
            &EmbeddingMatrix::from_rows(&rows).unwrap(),
            PcaMode::Uncentered,
        )
        .unwrap();
        let r = m.explained_variance_report().unwrap();
        assert!(r.ratios.iter().all(|x| (x - 0.25).abs() < 1e-12));
        assert!((r.spread - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_profile() {
        let e = random_matrix(30, 4, 6);
        let m = fit_pca(&e, PcaMode::Uncentered).unwrap();
        let p = m.coefficient_mean_profile();
        for k in 0..4 {
            let direct: f64 = (0..30)
                .map(|i| m.coefficients().get(i, k).abs())
                .sum::<f64>()
                / 30.0;
            assert!((p[k] - direct).abs() < 1e-12);
        }
        let mut flipped = m.clone();
        for i in 0..30 {
            flipped.coefficients.row_mut(i)[2] *= -1.0;
        }
        assert_eq!(flipped.coefficient_mean_profile(), p);
    }

    #[test]
    fn model_round_trip() {
        for mode in [PcaMode::Uncentered, PcaMode::Centered] {
            let m = fit_pca(&random_matrix(20, 3, 3), mode).unwrap();
            let mut buf = Vec::new();
            m.write_to(&mut buf).unwrap();
            assert_eq!(PcaModel::read_from(buf.as_slice()).unwrap(), m);
        }
        assert!(PcaModel::read_from(&b"garbage!"[..]).is_err());
    }

    #[test]
    fn deterministic_fit() {
        let e = random_matrix(25, 5, 10);
        assert_eq!(
            fit_pca(&e, PcaMode::Uncentered).unwrap(),
            fit_pca(&e, PcaMode::Uncentered).unwrap()
        );
    }
}
