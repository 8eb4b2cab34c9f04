//! Numeric nullspace extraction for ansatz discovery.
//!
//! Discovery problems here are linear: the defect of a combination
//! `Σ cⱼ·basisⱼ` equals the combination of the basis defects. Sampling each
//! basis defect at many points gives a matrix whose (numeric) nullspace is
//! the coefficient space of defect-free combinations.
//!
//! The raw matrix is equilibrated on both sides before the SVD. Each column
//! is divided by `1 + max(scale)` over its entries, so basis functions whose
//! residuals live at wildly different magnitudes (say `1.2ⁿ` next to
//! `0.72ⁿ` at `n = 60`) stop drowning each other out: after the division a
//! column is small precisely when its residuals are small *relative to the
//! magnitudes that produced them*. Each row is then divided by
//! `1 + max(|entry|)` to keep any remaining outlier row from dominating.
//! Diagonal scalings by nonsingular factors never change the nullspace as a
//! subspace; the null vectors are mapped back to original basis coordinates
//! (and normalized to unit length) before they are returned.
//!
//! The rank threshold is `rank_tol * max(σ_max, 1)`. Flooring `σ_max` at 1
//! matters: when *every* basis column is defect-free the whole matrix is
//! rounding noise, `σ_max` itself is noise, and a pure relative threshold
//! would declare the matrix full-rank instead of all-null. Entries are
//! relative residuals, so 1 is the natural unit.

use crate::eval::{EvalError, Point};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NullspaceError {
    #[error("only {rows} usable sample rows for {cols} columns; need at least {needed}")]
    InsufficientSamples {
        rows: usize,
        cols: usize,
        needed: usize,
    },
}

/// Shared knobs for the ansatz finders.
#[derive(Clone, Debug)]
pub struct AnsatzConfig {
    /// Target number of matrix rows (clamped up to `cols + 5` minimum).
    pub samples: usize,
    /// Singular values at or below `rank_tol * max(σ_max, 1)` count as null.
    pub rank_tol: f64,
    pub seed: u64,
}

impl Default for AnsatzConfig {
    fn default() -> AnsatzConfig {
        AnsatzConfig {
            samples: 50,
            rank_tol: 1e-8,
            seed: crate::zerotest::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NullspaceResult {
    /// Unit-length coefficient vectors (original basis coordinates) spanning
    /// the numeric nullspace.
    pub vectors: Vec<Vec<f64>>,
    /// All singular values of the equilibrated matrix, descending.
    pub singular_values: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

impl NullspaceResult {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Evaluate every column at candidate points, keeping rows where all columns
/// are finite, until `target_rows` rows are collected or the pool runs out.
/// Returns the raw value rows and the per-column scale `1 + max(scale)`.
fn collect_rows<F>(
    columns: &[F],
    pool: &[Point],
    target_rows: usize,
) -> (Vec<Vec<f64>>, Vec<f64>)
where
    F: Fn(&Point) -> Result<(f64, f64), EvalError>,
{
    let mut rows = Vec::new();
    let mut col_scales = vec![0.0f64; columns.len()];
    for p in pool {
        if rows.len() >= target_rows {
            break;
        }
        let mut row = Vec::with_capacity(columns.len());
        let mut scales = Vec::with_capacity(columns.len());
        let mut ok = true;
        for col in columns {
            match col(p) {
                Ok((v, s)) => {
                    row.push(v);
                    scales.push(s);
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            for (cs, s) in col_scales.iter_mut().zip(&scales) {
                *cs = cs.max(*s);
            }
            rows.push(row);
        }
    }
    (rows, col_scales.into_iter().map(|s| 1.0 + s).collect())
}

/// Build the two-sided equilibrated matrix from raw rows and column scales.
fn equilibrated(raw: &[Vec<f64>], col_scales: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(raw.len(), col_scales.len(), |i, j| {
        raw[i][j] / col_scales[j]
    });
    for i in 0..m.nrows() {
        let row_max = m.row(i).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let norm = 1.0 + row_max;
        for j in 0..m.ncols() {
            m[(i, j)] /= norm;
        }
    }
    m
}

/// Numeric nullspace of the sampled column evaluators. Each evaluator returns
/// `(value, scale)` as from [`crate::eval::eval_scaled`].
pub fn sampled_nullspace<F>(
    columns: &[F],
    pool: &[Point],
    cfg: &AnsatzConfig,
) -> Result<NullspaceResult, NullspaceError>
where
    F: Fn(&Point) -> Result<(f64, f64), EvalError>,
{
    let cols = columns.len();
    let needed = cols + 5;
    let target = cfg.samples.max(needed);
    let (raw, col_scales) = collect_rows(columns, pool, target);
    if raw.len() < needed {
        return Err(NullspaceError::InsufficientSamples {
            rows: raw.len(),
            cols,
            needed,
        });
    }
    let m = equilibrated(&raw, &col_scales);
    let svd = m.svd(false, true);
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let v_t = svd.v_t.expect("SVD with compute_v");
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let thresh = cfg.rank_tol * sigma_max.max(1.0);
    let mut vectors = Vec::new();
    for (i, s) in sigma.iter().enumerate() {
        if *s <= thresh {
            // Undo the column scaling so coefficients refer to the original
            // basis, then renormalize for presentation.
            let mut c: Vec<f64> = v_t
                .row(i)
                .iter()
                .zip(&col_scales)
                .map(|(v, cs)| v / cs)
                .collect();
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for x in &mut c {
                    *x /= norm;
                }
            }
            vectors.push(c);
        }
    }
    Ok(NullspaceResult {
        vectors,
        singular_values: sigma,
        rows: raw.len(),
        cols,
    })
}

/// Numeric rank of sampled column evaluators with the same equilibration and
/// floored threshold as [`sampled_nullspace`].
pub fn sampled_rank<F>(columns: &[F], pool: &[Point], cfg: &AnsatzConfig) -> usize
where
    F: Fn(&Point) -> Result<(f64, f64), EvalError>,
{
    let (raw, col_scales) = collect_rows(columns, pool, cfg.samples.max(columns.len() + 5));
    if raw.is_empty() {
        return 0;
    }
    let m = equilibrated(&raw, &col_scales);
    let sigma = m.singular_values();
    let sigma_max = sigma.iter().cloned().fold(0.0f64, f64::max);
    let thresh = cfg.rank_tol * sigma_max.max(1.0);
    sigma.iter().filter(|s| **s > thresh).count()
}

/// Rank of an already-built row matrix under the floored threshold.
pub fn rank_of_rows(rows: &[Vec<f64>], rank_tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sigma = m.singular_values();
    let sigma_max = sigma.iter().cloned().fold(0.0f64, f64::max);
    let thresh = rank_tol * sigma_max.max(1.0);
    sigma.iter().filter(|s| **s > thresh).count()
}

/// Evaluator for the linear combination `Σ coeffs[j]·columns[j]`. The scale
/// is the largest `|cⱼ|·scaleⱼ`, so the combination's relative residual is
/// judged against the magnitudes that actually entered the sum.
pub fn combination<'a, F>(
    columns: &'a [F],
    coeffs: &'a [f64],
) -> impl Fn(&Point) -> Result<(f64, f64), EvalError> + 'a
where
    F: Fn(&Point) -> Result<(f64, f64), EvalError>,
{
    move |p: &Point| {
        let mut value = 0.0;
        let mut scale = 0.0f64;
        for (col, c) in columns.iter().zip(coeffs) {
            let (v, s) = col(p)?;
            value += c * v;
            scale = scale.max(c.abs() * s);
        }
        Ok((value, scale))
    }
}
