use crate::error::{Error, Result};

/// Tridiagonal matrix stored by bands. `lower[0]` and `upper[n-1]` are unused.
#[derive(Debug, Clone, Default)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Whether the matrix is a strictly diagonally dominant Z-matrix with a
    /// positive diagonal, hence an M-matrix with a non-negative inverse.
    pub fn is_m_matrix(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let lo = if i > 0 { self.lower[i] } else { 0.0 };
            let up = if i + 1 < n { self.upper[i] } else { 0.0 };
            self.diag[i] > 0.0 && lo <= 0.0 && up <= 0.0 && self.diag[i] > lo.abs() + up.abs()
        })
    }

    /// Thomas algorithm; `scratch` is reused across calls to avoid allocation.
    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        debug_assert_eq!(out.len(), n);
        if n == 0 {
            return Ok(());
        }
        scratch.clear();
        scratch.resize(n, 0.0);

        let mut pivot = self.diag[0];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularSystem { row: 0 });
        }
        scratch[0] = self.upper[0] / pivot;
        out[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * scratch[i - 1];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularSystem { row: i });
            }
            if i + 1 < n {
                scratch[i] = self.upper[i] / pivot;
            }
            out[i] = (rhs[i] - self.lower[i] * out[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            out[i] -= scratch[i] * out[i + 1];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; rhs.len()];
        let mut scratch = Vec::new();
        self.solve_into(rhs, &mut out, &mut scratch)?;
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn singular_detected() {
        let m = Tridiagonal {
            lower: vec![0.0, 1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0, 0.0],
        };
        assert!(matches!(m.solve(&[1.0, 1.0]), Err(Error::SingularSystem { row: 1 })));
    }

    proptest! {
        #[test]
        fn solves_dominant_systems(rows in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 1..40)) {
            let n = rows.len();
            let mut m = Tridiagonal::zeros(n);
            let mut x = vec![0.0; n];
            for (i, &(a, c, v)) in rows.iter().enumerate() {
                m.lower[i] = a;
                m.upper[i] = c;
                m.diag[i] = 2.5 + a.abs();
                x[i] = v;
            }
            let b = m.mul_vec(&x);
            let sol = m.solve(&b).unwrap();
            for (s, e) in sol.iter().zip(&x) {
                prop_assert!((s - e).abs() < 1e-12);
            }
        }
    }
}
