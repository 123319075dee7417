//! Dense linear algebra kernel: matrices, a cyclic Jacobi symmetric
//! eigensolver, LU solves, and the Lyapunov equation `AᵀP + PA = -I`.
//!
//! Everything here is desk scale (dimension up to ~50). The Lyapunov
//! equation is solved by vectorization into an `n² × n²` system, and
//! Hurwitz testing uses the Lyapunov criterion so that no nonsymmetric
//! eigensolver is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Off-diagonal Frobenius threshold for Jacobi, relative to `‖S‖_F`.
pub const JACOBI_TOL: f64 = 1e-14;
/// Sweep cap for the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Per-dimension tolerance on `‖AᵀP + PA + I‖_F`.
pub const LYAPUNOV_RESIDUAL_TOL: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

/// Dense row-major real matrix.
///
/// Serializes as `{"rows": r, "cols": c, "entries": [row-major values]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        Matrix::from_row_major(raw.rows, raw.cols, raw.entries)
    }
}

impl Matrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!("non-finite entry at index {pos}")));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        Ok(self
            .entries
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, other: &Matrix, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| op(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn add(&self, other: &Matrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `(M + Mᵀ) / 2`.
    pub fn symmetric_part(&self) -> Result<SymmetricMatrix> {
        let n = self.ensure_square()?;
        let mut s = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                // + 0.0 turns -0.0 into 0.0
                s[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]) + 0.0;
            }
        }
        Ok(SymmetricMatrix(s))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Square matrix whose symmetry was checked at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct SymmetricMatrix(Matrix);

impl TryFrom<Matrix> for SymmetricMatrix {
    type Error = Error;

    fn try_from(m: Matrix) -> Result<Self> {
        SymmetricMatrix::new(m)
    }
}

impl From<SymmetricMatrix> for Matrix {
    fn from(s: SymmetricMatrix) -> Matrix {
        s.0
    }
}

impl SymmetricMatrix {
    /// Accepts `m` if `|m_ij − m_ji| ≤ 1e-12 · max(1, |m_ij|)` everywhere.
    pub fn new(m: Matrix) -> Result<Self> {
        let n = m.ensure_square()?;
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (m[(i, j)] - m[(j, i)]).abs();
                if gap > SYMMETRY_TOL * m[(i, j)].abs().max(1.0) {
                    return Err(Error::NotSymmetric { i, j, gap });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(Matrix::from_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    /// `(M + Mᵀ) / 2` without checking symmetry first.
    pub fn symmetrize(m: &Matrix) -> Result<Self> {
        m.symmetric_part()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn add(&self, other: &SymmetricMatrix) -> Result<Self> {
        Ok(Self(self.0.add(&other.0)?))
    }

    /// `xᵀ S x`.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        let sx = self.0.matvec(x)?;
        Ok(x.iter().zip(&sx).map(|(a, b)| a * b).sum())
    }
}

impl std::ops::Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector
/// columns, so that `S = U diag(λ) Uᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut out = Matrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            for i in 0..n {
                let uik = u[(i, k)] * lambda;
                for j in 0..n {
                    out[(i, j)] += uik * u[(j, k)];
                }
            }
        }
        out
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig(s: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    let n = s.dim();
    let mut a = s.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let threshold = JACOBI_TOL * scale;

    let off_norm = |a: &Matrix| {
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += a[(i, j)] * a[(i, j)];
                }
            }
        }
        sum.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let sn = t * c;
                // A <- Jᵀ A J on rows/cols p and q
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Largest absolute eigenvalue, i.e. the spectral norm of a symmetric matrix.
pub fn operator_norm(s: &SymmetricMatrix) -> Result<f64> {
    let eig = sym_eig(s)?;
    Ok(eig.min().abs().max(eig.max().abs()))
}

/// LU factorization with partial pivoting, stored in place.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Matrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(m: &Matrix) -> Result<Self> {
        let n = m.ensure_square()?;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = f64::EPSILON * n as f64 * m.max_abs();
        for k in 0..n {
            let (pivot_row, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty column");
            if pivot <= tiny || pivot == 0.0 {
                return Err(Error::Singular { column: k, pivot });
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
            }
            let inv = 1.0 / lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] * inv;
                if factor == 0.0 {
                    continue;
                }
                lu[(i, k)] = factor;
                let (upper, lower) = lu.entries.split_at_mut(i * n);
                let row_k = &upper[k * n + k + 1..k * n + n];
                let row_i = &mut lower[k + 1..n];
                for (x, &y) in row_i.iter_mut().zip(row_k) {
                    *x -= factor * y;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu.entries[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu.entries[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// Solves `M x = b` by LU with partial pivoting.
pub fn solve(m: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    LuFactors::factor(m)?.solve(b)
}

/// `‖AᵀP + PA + I‖_F`.
pub fn lyapunov_residual(a: &Matrix, p: &SymmetricMatrix) -> Result<f64> {
    let n = a.ensure_square()?;
    if p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
    }
    let pa = p.as_matrix().matmul(a)?;
    let mut r = pa.transpose().add(&pa)?;
    for i in 0..n {
        r[(i, i)] += 1.0;
    }
    Ok(r.frobenius_norm())
}

/// Solves `AᵀP + PA = −I` for symmetric positive definite `P`.
///
/// Fails with [`Error::NotHurwitz`] when the vectorized system is singular,
/// the residual is out of tolerance, or `P` is not positive definite.
pub fn lyapunov_solve(a: &Matrix) -> Result<SymmetricMatrix> {
    let n = a.ensure_square()?;
    let m = n * n;
    // Row (i, j) of AᵀP + PA: Σ_k A_ki P_kj + Σ_k P_ik A_kj.
    let mut k = Matrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for l in 0..n {
                k[(row, l * n + j)] += a[(l, i)];
                k[(row, i * n + l)] += a[(l, j)];
            }
        }
    }
    let rhs: Vec<f64> = (0..m).map(|r| if r / n == r % n { -1.0 } else { 0.0 }).collect();

    let lu = LuFactors::factor(&k)
        .map_err(|e| Error::NotHurwitz(format!("vectorized Lyapunov system is singular ({e})")))?;
    let mut x = lu.solve(&rhs)?;
    // one step of iterative refinement
    let kx = k.matvec(&x)?;
    let r: Vec<f64> = rhs.iter().zip(&kx).map(|(b, v)| b - v).collect();
    let dx = lu.solve(&r)?;
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotHurwitz("non-finite Lyapunov solution".into()));
    }

    let p = Matrix::from_row_major(n, n, x)?.symmetric_part()?;
    let residual = lyapunov_residual(a, &p)?;
    if residual > LYAPUNOV_RESIDUAL_TOL * n as f64 {
        return Err(Error::NotHurwitz(format!("Lyapunov residual {residual:e} out of tolerance")));
    }
    let min_eig = sym_eig(&p)?.min();
    if min_eig <= 0.0 {
        return Err(Error::NotHurwitz(format!(
            "Lyapunov solution is not positive definite (min eigenvalue {min_eig:e})"
        )));
    }
    Ok(p)
}

/// Lyapunov criterion: `A` is Hurwitz iff `AᵀP + PA = −I` has a positive
/// definite solution.
pub fn is_hurwitz(a: &Matrix) -> bool {
    lyapunov_solve(a).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> SymmetricMatrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymmetricMatrix::new(m).unwrap()
    }

    fn orthonormality_residual(u: &Matrix) -> f64 {
        let n = u.rows();
        u.transpose().matmul(u).unwrap().sub(&Matrix::identity(n)).unwrap().frobenius_norm()
    }

    #[test]
    fn matrix_json_shape() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"rows":2,"cols":2,"entries":[1.0,2.0,3.0,4.0]}"#);
        let back: Matrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix>(r#"{"rows":2,"cols":2,"entries":[1.0]}"#).is_err());
        assert!(
            serde_json::from_str::<SymmetricMatrix>(r#"{"rows":2,"cols":2,"entries":[1,2,3,4]}"#)
                .is_err()
        );
    }

    #[test]
    fn eig_identity() {
        let eig = sym_eig(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn eig_diagonal() {
        let eig = sym_eig(&SymmetricMatrix::from_diagonal(&[-2.0, 5.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![-2.0, 5.0]);
        assert_eq!(eig.eigenvectors, Matrix::identity(2));

        let eig = sym_eig(&SymmetricMatrix::from_diagonal(&[5.0, -2.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![-2.0, 5.0]);
        assert_eq!(eig.eigenvectors, Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
    }

    #[test]
    fn eig_random_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 10, 25, 50] {
            let s = random_symmetric(n, &mut rng);
            let eig = sym_eig(&s).unwrap();
            let norm = s.as_matrix().frobenius_norm();
            let recon = eig.reconstruct().sub(s.as_matrix()).unwrap().frobenius_norm();
            assert!(recon <= 1e-10 * norm, "n={n} recon={recon:e}");
            assert!(orthonormality_residual(&eig.eigenvectors) <= 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]).unwrap();
        assert!(matches!(SymmetricMatrix::new(m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn lu_solves_and_detects_singular() {
        let m = Matrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let x = solve(&m, &[9.0, 8.0]).unwrap();
        assert_abs_diff_eq!(x[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 3.0, epsilon = 1e-14);
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(solve(&s, &[1.0, 1.0]), Err(Error::Singular { .. })));
    }

    #[test]
    fn lyapunov_scalar() {
        let p = lyapunov_solve(&Matrix::from_diagonal(&[-1.0])).unwrap();
        assert_abs_diff_eq!(p[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn lyapunov_diagonal_closed_form() {
        let a = Matrix::from_diagonal(&[-1.0, -2.0]);
        let p = lyapunov_solve(&a).unwrap();
        let expected = [0.5, 0.25];
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { expected[i] } else { 0.0 };
                assert_abs_diff_eq!(p[(i, j)], want, epsilon = 1e-15);
            }
        }
        assert!(lyapunov_residual(&a, &p).unwrap() <= 2e-10);
    }

    #[test]
    fn lyapunov_random_hurwitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let n = 20;
        let mut g = Matrix::zeros(n, n);
        for v in g.entries.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let shift = sym_eig(&g.symmetric_part().unwrap()).unwrap().max() + 0.5;
        let a = g.sub(&Matrix::identity(n).scale(shift)).unwrap();
        let p = lyapunov_solve(&a).unwrap();
        assert!(lyapunov_residual(&a, &p).unwrap() <= 1e-10 * n as f64);
        assert!(sym_eig(&p).unwrap().min() > 0.0);
        assert_eq!(p.as_matrix(), &p.as_matrix().transpose());
    }

    #[test]
    fn hurwitz_cases() {
        assert!(is_hurwitz(&Matrix::identity(3).scale(-1.0)));
        assert!(!is_hurwitz(&Matrix::identity(3)));
        let skew = Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(!is_hurwitz(&skew));
        assert!(matches!(lyapunov_solve(&skew), Err(Error::NotHurwitz(_))));
    }

    #[test]
    fn hurwitz_matches_triangular_diagonal_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.random_range(1..6);
            let mut a = Matrix::zeros(n, n);
            for i in 0..n {
                a[(i, i)] = rng.random_range(-3.0..1.0);
                for j in (i + 1)..n {
                    a[(i, j)] = rng.random_range(-1.0..1.0);
                }
            }
            let abscissa = (0..n).map(|i| a[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
            if abscissa.abs() < 0.05 {
                continue;
            }
            assert_eq!(is_hurwitz(&a), abscissa < 0.0, "abscissa {abscissa}");
        }
    }

    #[test]
    fn operator_norm_cases() {
        assert_eq!(operator_norm(&SymmetricMatrix::identity(4)).unwrap(), 1.0);
        assert_eq!(operator_norm(&SymmetricMatrix::from_diagonal(&[-3.0, 2.0])).unwrap(), 3.0);
        let p = lyapunov_solve(&Matrix::identity(4).scale(-1.0)).unwrap();
        assert_abs_diff_eq!(operator_norm(&p.scale(2.0)).unwrap(), 1.0, epsilon = 1e-14);
    }
}
