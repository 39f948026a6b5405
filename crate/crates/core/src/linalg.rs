//! Small dense symmetric eigen solvers: cyclic Jacobi rotations for full
//! matrices and implicit QL for symmetric tridiagonals.

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Self::from_fn(rows.len(), |i, j| rows[i][j])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).take(self.n).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `c^T M c`.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        assert_eq!(c.len(), self.n);
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for j in 0..self.n {
                row += self.get(i, j) * c[j];
            }
            acc += c[i] * row;
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-12;

/// Cyclic Jacobi diagonalization of a symmetric matrix. Iterates until the
/// off-diagonal Frobenius mass falls below `1e-12 * ||A||_F`.
pub fn symmetric_eigen(a: &SquareMatrix) -> SymmetricEigen {
    let n = a.order();
    let mut m = a.clone();
    let mut v = SquareMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 });
    let target = JACOBI_OFF_TOL * a.frobenius();
    let mut sweeps = 0;

    while sweeps < JACOBI_MAX_SWEEPS {
        let off = off_diagonal_mass(&m);
        if off <= target || off == 0.0 {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).total_cmp(&m.get(j, j)));
    let values = order.iter().map(|&k| m.get(k, k)).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v.get(i, k)).collect())
        .collect();
    SymmetricEigen {
        values,
        vectors,
        sweeps,
    }
}

fn off_diagonal_mass(m: &SquareMatrix) -> f64 {
    let n = m.order();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m.get(i, j) * m.get(i, j);
            }
        }
    }
    acc.sqrt()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("tridiagonal QL did not converge for eigenvalue {index}")]
pub struct QlNonConvergence {
    pub index: usize,
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `offdiag` (`offdiag[i]` couples rows `i` and `i+1`), plus the
/// first component of each unit eigenvector. Implicit QL with Wilkinson-type
/// shifts; only row 0 of the eigenvector matrix is accumulated.
///
/// Output is unsorted.
pub fn tridiagonal_ql(
    diag: &[f64],
    offdiag: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), QlNonConvergence> {
    let n = diag.len();
    assert!(offdiag.len() + 1 == n || (n == 0 && offdiag.is_empty()));
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(QlNonConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_two_by_two() {
        let a = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let eig = symmetric_eigen(&a);
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
        let v = &eig.vectors[0];
        assert!((v[0] + v[1]).abs() < 1e-14);
        assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let a = SquareMatrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 0.5],
            vec![1.0, 3.0, 0.0, 1.0],
            vec![-2.0, 0.0, 2.0, -1.0],
            vec![0.5, 1.0, -1.0, 5.0],
        ]);
        let eig = symmetric_eigen(&a);
        for i in 0..4 {
            for j in 0..4 {
                let r: f64 = (0..4)
                    .map(|k| eig.values[k] * eig.vectors[k][i] * eig.vectors[k][j])
                    .sum();
                assert!((r - a.get(i, j)).abs() < 1e-12);
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ql_matches_jacobi() {
        let diag = [0.3, -1.0, 2.0, 0.5, 1.5];
        let off = [1.0, 0.7, 0.2, 1.3];
        let (mut vals, _) = tridiagonal_ql(&diag, &off).unwrap();
        vals.sort_by(f64::total_cmp);
        let full = SquareMatrix::from_fn(5, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        });
        let eig = symmetric_eigen(&full);
        for (a, b) in vals.iter().zip(&eig.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ql_first_components_are_unit() {
        let (_, z) = tridiagonal_ql(&[0.0, 0.0, 0.0], &[1.0, 2.0f64.sqrt()]).unwrap();
        let total: f64 = z.iter().map(|v| v * v).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ql_one_by_one() {
        let (d, z) = tridiagonal_ql(&[2.5], &[]).unwrap();
        assert_eq!(d, vec![2.5]);
        assert_eq!(z, vec![1.0]);
    }
}
