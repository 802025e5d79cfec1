use crate::error::{Error, Result};

/// Real orthogonal coordinate transform whose first row is exactly
/// (1,..,1)/sqrt(n), so the first transformed coordinate equals sqrt(n) times
/// the centroid.
#[derive(Debug, Clone)]
pub struct TransformMatrix {
    n: usize,
    rows: Vec<Vec<f64>>,
}

/// The shipped transforms for n = 2, 3, 4, with rows ordered so the
/// symmetric row comes first.
pub fn transform_matrix(n: usize) -> Result<TransformMatrix> {
    let rows: Vec<Vec<f64>> = match n {
        2 => {
            let s = 1.0 / 2f64.sqrt();
            vec![vec![s, s], vec![s, -s]]
        }
        3 => {
            let s = 1.0 / 3f64.sqrt();
            let h = (3.0f64 / 2.0).sqrt();
            vec![
                vec![s, s, s],
                vec![0.0, s * h, -s * h],
                vec![s * 2f64.sqrt(), -s / 2f64.sqrt(), -s / 2f64.sqrt()],
            ]
        }
        4 => {
            // Helmert-style completion of the symmetric row; only the first
            // row matters for the back-transformed joint distribution.
            let q = (2f64 / 3.0).sqrt();
            vec![
                vec![0.5, 0.5, 0.5, 0.5],
                vec![0.0, 0.0, 0.5 * 2f64.sqrt(), -0.5 * 2f64.sqrt()],
                vec![0.0, q, -0.5 * q, -0.5 * q],
                vec![
                    0.5 * 3f64.sqrt(),
                    -0.5 / 3f64.sqrt(),
                    -0.5 / 3f64.sqrt(),
                    -0.5 / 3f64.sqrt(),
                ],
            ]
        }
        _ => return Err(Error::UnsupportedPhotonNumber(n)),
    };
    Ok(TransformMatrix { n, rows })
}

impl TransformMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row index of the symmetric (1,..,1)/sqrt(n) row.
    pub fn centroid_row_index(&self) -> usize {
        0
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.rows[row][col]
    }

    /// y = M x
    pub fn forward(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().zip(x).map(|(m, v)| m * v).sum();
        }
    }

    /// x = M^T y; the inverse of `forward` since M is orthogonal.
    pub fn back(&self, y: &[f64], x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        x.fill(0.0);
        for (yi, row) in y.iter().zip(&self.rows) {
            for (xj, m) in x.iter_mut().zip(row) {
                *xj += m * yi;
            }
        }
    }

    /// Determinant via cofactor expansion; used by tests only, the shipped
    /// matrices are at most 4x4.
    pub fn determinant(&self) -> f64 {
        fn det(m: &[Vec<f64>]) -> f64 {
            let n = m.len();
            if n == 1 {
                return m[0][0];
            }
            let mut acc = 0.0;
            for j in 0..n {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * m[0][j] * det(&minor);
            }
            acc
        }
        det(&self.rows)
    }
}
