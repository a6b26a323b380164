//! The regression dataset shared by every estimator.

use ndarray::{Array1, Array2, ArrayView1, ShapeBuilder};

use crate::error::{Error, Result};

/// Response `y` (length T) and regressor matrix `X` (T×N).
///
/// `X` is stored column-major so that column access is a contiguous slice,
/// which is what the coordinate-descent kernels iterate over.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: Array1<f64>,
    x: Array2<f64>,
}

impl Dataset {
    pub fn new(y: Array1<f64>, x: Array2<f64>) -> Result<Self> {
        let (t, n) = x.dim();
        if y.len() != t {
            return Err(Error::DimensionMismatch {
                expected: format!("y of length {t}"),
                got: format!("length {}", y.len()),
            });
        }
        if t < 2 {
            return Err(Error::InvalidData(format!("need T >= 2, got {t}")));
        }
        if n < 1 {
            return Err(Error::InvalidData("need at least one regressor".into()));
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite entry".into()));
        }
        let x = if x.t().is_standard_layout() {
            x
        } else {
            let mut fx = Array2::zeros((t, n).f());
            fx.assign(&x);
            fx
        };
        Ok(Self { y, x })
    }

    /// Builds a dataset from row-major observations.
    pub fn from_rows(y: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        let t = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidData("ragged regressor rows".into()));
        }
        let x = Array2::from_shape_fn((t, n).f(), |(i, j)| rows[i][j]);
        Self::new(Array1::from(y), x)
    }

    pub fn t(&self) -> usize {
        self.x.nrows()
    }

    pub fn n(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.x.column(j)
    }

    pub(crate) fn col_slice(&self, j: usize) -> &[f64] {
        self.x.column(j).to_slice().expect("design is stored column-major")
    }

    pub(crate) fn y_slice(&self) -> &[f64] {
        self.y.as_slice().expect("response is contiguous")
    }

    /// Design with column `j` removed; remaining columns keep their order.
    pub fn without_column(&self, j: usize) -> Result<Array2<f64>> {
        let (t, n) = self.x.dim();
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        Ok(Array2::from_shape_fn((t, n - 1).f(), |(i, k)| {
            self.x[[i, if k < j { k } else { k + 1 }]]
        }))
    }

    /// New dataset with column `j` as response and the other columns as design.
    pub fn nodewise(&self, j: usize) -> Result<Dataset> {
        let x = self.without_column(j)?;
        Dataset::new(self.x.column(j).to_owned(), x)
    }

    /// `X'X / T` as a dense row-major N×N matrix.
    pub fn gram(&self) -> Array2<f64> {
        let n = self.n();
        let inv_t = 1.0 / self.t() as f64;
        let mut g = Array2::zeros((n, n));
        for j in 0..n {
            let cj = self.col_slice(j);
            for k in j..n {
                let v = dot(cj, self.col_slice(k)) * inv_t;
                g[[j, k]] = v;
                g[[k, j]] = v;
            }
        }
        g
    }

    /// `X'v / T` for a length-T vector.
    pub fn xt_times(&self, v: &[f64]) -> Array1<f64> {
        let inv_t = 1.0 / self.t() as f64;
        Array1::from_shape_fn(self.n(), |j| dot(self.col_slice(j), v) * inv_t)
    }

    /// `X b` for a length-N vector, skipping zero coefficients.
    pub fn x_times(&self, b: &[f64]) -> Array1<f64> {
        let mut out = Array1::zeros(self.t());
        let o = out.as_slice_mut().expect("contiguous");
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0.0 {
                axpy(bj, self.col_slice(j), o);
            }
        }
        out
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_bad_shapes_and_values() {
        let x = array![[1.0], [2.0]];
        assert!(Dataset::new(array![1.0, 2.0, 3.0], x.clone()).is_err());
        assert!(Dataset::new(array![1.0, f64::NAN], x).is_err());
        assert!(Dataset::new(array![1.0], array![[1.0]]).is_err());
    }

    #[test]
    fn column_removal_keeps_order() {
        let d = Dataset::new(array![0.0, 0.0], array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let x = d.without_column(1).unwrap();
        assert_eq!(x, array![[1.0, 3.0], [4.0, 6.0]]);
        assert_eq!(d.column(2).to_vec(), vec![3.0, 6.0]);
        assert!(d.without_column(3).is_err());
    }

    #[test]
    fn row_major_input_is_stored_column_major() {
        let d = Dataset::new(array![1.0, 2.0], array![[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(d.col_slice(1), &[2.0, 4.0]);
        let g = d.gram();
        assert!((g[[0, 1]] - 7.0).abs() < 1e-15);
    }
}
