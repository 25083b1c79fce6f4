//! Small dense-free linear algebra: a banded LU solver with partial pivoting
//! and a tridiagonal (Thomas) solver. Both are sized for the meshes used by
//! the electrochemical models, where the system matrices are narrow bands.

/// General banded matrix in LAPACK-style band storage with room for the
/// fill-in produced by partial pivoting.
///
/// Entry (i, j) with -ku <= i - j <= kl lives at `data[(kl + ku + i - j) * n + j]`.
/// Rows 0..kl of the storage are reserved for pivoting fill.
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

#[derive(Debug)]
pub struct Singular {
    pub column: usize,
}

impl Banded {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let rows = 2 * kl + ku + 1;
        Banded {
            n,
            kl,
            ku,
            data: vec![0.0; rows * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reset(&mut self) {
        self.data.fill(0.0);
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(
            j <= i + self.ku && i <= j + self.kl,
            "entry ({i}, {j}) outside band kl={}, ku={}",
            self.kl,
            self.ku
        );
        (self.kl + self.ku + i - j) * self.n + j
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i + self.ku || i > j + self.kl {
            0.0
        } else {
            self.data[(self.kl + self.ku + i - j) * self.n + j]
        }
    }

    /// Densify for tests and diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Factor in place (LU with partial pivoting) and solve `A x = b`,
    /// overwriting `b` with the solution. The matrix content is destroyed.
    pub fn solve_in_place(&mut self, b: &mut [f64], ipiv: &mut Vec<usize>) -> Result<(), Singular> {
        assert_eq!(b.len(), self.n);
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let lead = kl + ku; // storage row of the diagonal
        ipiv.clear();
        ipiv.resize(n, 0);

        // Factorization. After pivoting, the upper bandwidth grows to kl + ku.
        for j in 0..n {
            let imax = (j + kl).min(n - 1);
            let mut p = j;
            let mut pmax = self.data[lead * n + j].abs();
            for i in (j + 1)..=imax {
                let v = self.data[(lead + i - j) * n + j].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 {
                return Err(Singular { column: j });
            }
            ipiv[j] = p;
            if p != j {
                // Swap rows j and p across columns j..=min(n-1, j+kl+ku).
                let kmax = (j + lead).min(n - 1);
                for k in j..=kmax {
                    let jidx = (lead + j - k) * n + k;
                    let pidx = (lead + p - k) * n + k;
                    self.data.swap(jidx, pidx);
                }
                b.swap(j, p);
            }
            let piv = self.data[lead * n + j];
            let imax2 = (j + kl).min(n - 1);
            for i in (j + 1)..=imax2 {
                let midx = (lead + i - j) * n + j;
                let m = self.data[midx] / piv;
                self.data[midx] = m;
                if m != 0.0 {
                    let kmax = (j + lead).min(n - 1);
                    for k in (j + 1)..=kmax {
                        let jrow = (lead + j - k) * n + k;
                        let irow = (lead + i - k) * n + k;
                        self.data[irow] -= m * self.data[jrow];
                    }
                    b[i] -= m * b[j];
                }
            }
        }

        // Back substitution.
        for j in (0..n).rev() {
            let kmax = (j + lead).min(n - 1);
            let mut s = b[j];
            for k in (j + 1)..=kmax {
                s -= self.data[(lead + j - k) * n + k] * b[k];
            }
            b[j] = s / self.data[lead * n + j];
        }
        Ok(())
    }
}

/// Thomas algorithm for a tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored. Overwrites `rhs` with the solution.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut Vec<f64>,
) {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= scratch[i + 1] * next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
        let mut x = b.to_vec();
        for j in 0..n {
            let p = (j..n)
                .max_by(|&r, &s| m[r][j].abs().partial_cmp(&m[s][j].abs()).unwrap())
                .unwrap();
            m.swap(j, p);
            x.swap(j, p);
            for i in j + 1..n {
                let f = m[i][j] / m[j][j];
                for k in j..n {
                    let v = m[j][k];
                    m[i][k] -= f * v;
                }
                x[i] -= f * x[j];
            }
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            for k in j + 1..n {
                s -= m[j][k] * x[k];
            }
            x[j] = s / m[j][j];
        }
        x
    }

    #[test]
    fn banded_matches_dense_on_random_systems() {
        let mut rng = StdRng::seed_from_u64(7);
        for trial in 0..50 {
            let n = rng.gen_range(3..40);
            let kl = rng.gen_range(1..5.min(n));
            let ku = rng.gen_range(1..5.min(n));
            let mut band = Banded::new(n, kl, ku);
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if j <= i + ku && i <= j + kl {
                        let v: f64 = rng.gen_range(-1.0..1.0);
                        let v = if i == j { v + 4.0 } else { v };
                        band.set(i, j, v);
                        dense[i][j] = v;
                    }
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let expected = dense_solve(&dense, &b);
            let mut x = b.clone();
            let mut ipiv = Vec::new();
            band.solve_in_place(&mut x, &mut ipiv)
                .unwrap_or_else(|e| panic!("singular at trial {trial}: {e:?}"));
            for i in 0..n {
                assert!(
                    (x[i] - expected[i]).abs() < 1e-9 * (1.0 + expected[i].abs()),
                    "trial {trial} entry {i}: {} vs {}",
                    x[i],
                    expected[i]
                );
            }
        }
    }

    #[test]
    fn banded_needs_pivoting_case() {
        // Small diagonal entry forces a row swap.
        let mut band = Banded::new(3, 1, 1);
        band.set(0, 0, 1e-14);
        band.set(0, 1, 1.0);
        band.set(1, 0, 1.0);
        band.set(1, 1, 1.0);
        band.set(1, 2, 1.0);
        band.set(2, 1, 1.0);
        band.set(2, 2, 3.0);
        let dense = band.to_dense();
        let b = vec![1.0, 2.0, 3.0];
        let expected = dense_solve(&dense, &b);
        let mut x = b.clone();
        let mut ipiv = Vec::new();
        band.solve_in_place(&mut x, &mut ipiv).unwrap();
        for i in 0..3 {
            assert!((x[i] - expected[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_matrix_reported() {
        let mut band = Banded::new(2, 1, 1);
        band.set(0, 0, 1.0);
        band.set(0, 1, 2.0);
        // column 1 under the diagonal is all zero after elimination
        band.set(1, 0, 2.0);
        band.set(1, 1, 4.0);
        let mut x = vec![1.0, 2.0];
        let mut ipiv = Vec::new();
        assert!(band.solve_in_place(&mut x, &mut ipiv).is_err());
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let mut rng = StdRng::seed_from_u64(11);
        let mut scratch = Vec::new();
        for _ in 0..30 {
            let n = rng.gen_range(2..30);
            let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let upper: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(3.0..5.0)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                dense[i][i] = diag[i];
                if i > 0 {
                    dense[i][i - 1] = lower[i];
                }
                if i + 1 < n {
                    dense[i][i + 1] = upper[i];
                }
            }
            let expected = dense_solve(&dense, &b);
            let mut x = b.clone();
            solve_tridiagonal(&lower, &diag, &upper, &mut x, &mut scratch);
            for i in 0..n {
                assert!((x[i] - expected[i]).abs() < 1e-9 * (1.0 + expected[i].abs()));
            }
        }
    }
}
