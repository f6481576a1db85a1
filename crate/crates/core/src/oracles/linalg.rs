//! Dense LU solve with partial pivoting.

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Solves `a x = b` in place. Returns `None` when a pivot falls below
/// `1e-14` times the largest entry of `a`.
pub fn lu_solve(mut a: Matrix, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let scale = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let tiny = scale * 1e-14;

    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, a[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot > tiny) {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.data.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let akk = a[(k, k)];
        for i in (k + 1)..n {
            let f = a[(i, k)] / akk;
            if f == 0.0 {
                continue;
            }
            a[(i, k)] = 0.0;
            let (upper, lower) = a.data.split_at_mut(i * n);
            let row_k = &upper[k * n + k + 1..k * n + n];
            let row_i = &mut lower[k + 1..n];
            for (x, &y) in row_i.iter_mut().zip(row_k) {
                *x -= f * y;
            }
            b[i] -= f * b[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[(k, j)] * b[j];
        }
        b[k] = s / a[(k, k)];
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system_needing_pivoting() {
        let mut a = Matrix::zeros(3);
        let rows = [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [2.0, 0.0, 3.0]];
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                a[(i, j)] = *v;
            }
        }
        // x = (1, 2, 3)
        let b = vec![7.0, 3.0, 11.0];
        let x = lu_solve(a, b).unwrap();
        for (got, want) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_detected() {
        let mut a = Matrix::zeros(2);
        a[(0, 0)] = 1.0;
        a[(0, 1)] = 2.0;
        a[(1, 0)] = 2.0;
        a[(1, 1)] = 4.0;
        assert!(lu_solve(a, vec![1.0, 2.0]).is_none());
        assert!(lu_solve(Matrix::zeros(2), vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.5, -2.0, 0.25, 9.0];
        assert_eq!(lu_solve(Matrix::identity(4), b.clone()).unwrap(), b);
    }
}
