//! Min-max normalization with persisted per-column statistics.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fitted per-column (min, max), persisted so unseen data reuses training
/// statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl NormStats {
    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    /// Apply fitted statistics to a matrix.
    ///
    /// Values outside the fitted range are NOT clipped (clipping would hide
    /// drift); they map outside [0,1] and are counted in the returned tally.
    pub fn apply(&self, matrix: &Array2<f64>) -> Result<(Array2<f64>, usize)> {
        if matrix.ncols() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: matrix.ncols(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("normalize input"));
        }
        let mut out = matrix.clone();
        let mut out_of_range = 0usize;
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            let (lo, hi) = (self.mins[j], self.maxs[j]);
            let span = hi - lo;
            for v in col.iter_mut() {
                *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
                if !(0.0..=1.0).contains(v) {
                    out_of_range += 1;
                }
            }
        }
        Ok((out, out_of_range))
    }

    /// Apply to a single row vector.
    pub fn apply_row(&self, row: &[f64]) -> Result<(Vec<f64>, usize)> {
        let m = Array2::from_shape_vec((1, row.len()), row.to_vec())
            .map_err(|_| Error::NonFinite("normalize input"))?;
        let (out, oor) = self.apply(&m)?;
        Ok((out.row(0).to_vec(), oor))
    }
}

/// Fit per-column (min, max) on `matrix` and return the normalized matrix.
///
/// Each column maps to [0,1]; a constant column maps to all zeros.
pub fn normalize_minmax(matrix: &Array2<f64>) -> Result<(Array2<f64>, NormStats)> {
    if matrix.nrows() == 0 {
        return Err(Error::InvalidConfig("normalize_minmax needs >= 1 row".into()));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("normalize input"));
    }
    let mut mins = Vec::with_capacity(matrix.ncols());
    let mut maxs = Vec::with_capacity(matrix.ncols());
    for col in matrix.columns() {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        mins.push(lo);
        maxs.push(hi);
    }
    let stats = NormStats { mins, maxs };
    let (out, _) = stats.apply(matrix)?;
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn column_maps_to_unit_interval() {
        let m = array![[0.0], [5.0], [10.0]];
        let (out, stats) = normalize_minmax(&m).unwrap();
        assert_eq!(out, array![[0.0], [0.5], [1.0]]);
        assert_eq!(stats.mins, vec![0.0]);
        assert_eq!(stats.maxs, vec![10.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let m = array![[3.0], [3.0], [3.0]];
        let (out, _) = normalize_minmax(&m).unwrap();
        assert_eq!(out, array![[0.0], [0.0], [0.0]]);
    }

    #[test]
    fn fitted_stats_allow_out_of_range() {
        let stats = NormStats {
            mins: vec![0.0],
            maxs: vec![10.0],
        };
        let (out, oor) = stats.apply(&array![[20.0]]).unwrap();
        assert_eq!(out[(0, 0)], 2.0);
        assert_eq!(oor, 1);
    }

    #[test]
    fn non_finite_rejected() {
        let m = array![[f64::NAN]];
        assert!(normalize_minmax(&m).is_err());
    }

    #[test]
    fn idempotent_on_normalized_data() {
        let m = array![[0.0, 2.0], [5.0, 2.0], [10.0, 2.0]];
        let (once, _) = normalize_minmax(&m).unwrap();
        let (twice, _) = normalize_minmax(&once).unwrap();
        assert_eq!(once, twice);
    }
}
