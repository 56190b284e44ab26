/// Constant tridiagonal system prefactored for repeated Thomas solves.
///
/// Row `j` reads `lower[j] x[j-1] + diag[j] x[j] + upper[j] x[j+1] = r[j]`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_mod: Vec<f64>,
}

impl Tridiagonal {
    /// Factors the matrix; returns `None` if a pivot vanishes.
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Option<Self> {
        let n = diag.len();
        assert!(lower.len() == n && upper.len() == n, "band length mismatch");
        let mut inv_pivot = vec![0.0; n];
        let mut upper_mod = vec![0.0; n];
        let mut prev_upper = 0.0;
        for j in 0..n {
            let pivot = diag[j] - if j > 0 { lower[j] * prev_upper } else { 0.0 };
            if pivot == 0.0 || !pivot.is_finite() {
                return None;
            }
            inv_pivot[j] = 1.0 / pivot;
            upper_mod[j] = upper[j] * inv_pivot[j];
            prev_upper = upper_mod[j];
        }
        Some(Tridiagonal {
            lower: lower.to_vec(),
            inv_pivot,
            upper_mod,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        rhs[0] *= self.inv_pivot[0];
        for j in 1..n {
            rhs[j] = (rhs[j] - self.lower[j] * rhs[j - 1]) * self.inv_pivot[j];
        }
        for j in (0..n - 1).rev() {
            rhs[j] -= self.upper_mod[j] * rhs[j + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_against_dense_product() {
        let n = 7;
        let lower: Vec<f64> = (0..n).map(|j| if j == 0 { 0.0 } else { -1.0 - 0.1 * j as f64 }).collect();
        let upper: Vec<f64> = (0..n).map(|j| if j == n - 1 { 0.0 } else { -0.7 }).collect();
        let diag: Vec<f64> = (0..n).map(|j| 3.0 + j as f64 * 0.05).collect();
        let x: Vec<f64> = (0..n).map(|j| (j as f64).sin() + 0.3).collect();
        let mut r: Vec<f64> = (0..n)
            .map(|j| {
                let mut v = diag[j] * x[j];
                if j > 0 {
                    v += lower[j] * x[j - 1];
                }
                if j + 1 < n {
                    v += upper[j] * x[j + 1];
                }
                v
            })
            .collect();
        let t = Tridiagonal::factor(&lower, &diag, &upper).unwrap();
        t.solve_in_place(&mut r);
        for (a, b) in r.iter().zip(&x) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_pivot_is_reported() {
        assert!(Tridiagonal::factor(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]).is_none());
    }
}
