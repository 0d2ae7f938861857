//! Dense real matrices and vectors, a one-sided Jacobi SVD, the SVD-based
//! Moore–Penrose pseudoinverse, and the spectral norm.
//!
//! [`Matrix`] and [`Vector`] are immutable value types wrapping `nalgebra`
//! storage. Constructors reject empty shapes and non-finite entries; every
//! operation returns a new value.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense real column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(DVector<f64>);

/// Dense real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(DMatrix<f64>);

fn check_finite(entries: &[f64]) -> Result<()> {
    match entries.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

impl Vector {
    pub fn from_vec(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        check_finite(&entries)?;
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::from_vec(entries.to_vec())
    }

    /// Builds a vector without validation. Callers guarantee a nonempty, finite input.
    pub(crate) fn from_na(v: DVector<f64>) -> Self {
        debug_assert!(v.nrows() > 0);
        Self(v)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self(DVector::zeros(dim))
    }

    /// The `i`-th standard basis vector of length `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.as_slice().to_vec()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    pub fn as_na(&self) -> &DVector<f64> {
        &self.0
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(&self.0 * s)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// Componentwise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.map(f))
    }

    /// Checked difference; the `ops` impls panic on mismatched dimensions instead.
    pub fn try_sub(&self, other: &Vector) -> Result<Vector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "vector difference",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Vector(&self.0 - &other.0))
    }

    /// Concatenation `[self; other]`.
    pub fn concat(&self, other: &Vector) -> Vector {
        let mut v = self.to_vec();
        v.extend(other.iter());
        Vector(DVector::from_vec(v))
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(&self.0 + &rhs.0)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(&self.0 - &rhs.0)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(-&self.0)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, rhs: f64) -> Vector {
        self.scale(rhs)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Matrix {
    /// Builds a `rows × cols` matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: entries.len(),
            });
        }
        check_finite(&entries)?;
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: ncols,
                    found: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        Self::from_row_major(nrows, ncols, entries)
    }

    /// Stacks vectors side by side as columns.
    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let first = columns.first().ok_or(Error::Empty)?;
        let n = first.dim();
        if let Some(bad) = columns.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch {
                context: "matrix column length",
                expected: n,
                found: bad.dim(),
            });
        }
        let cols: Vec<DVector<f64>> = columns.iter().map(|c| c.0.clone()).collect();
        Ok(Self(DMatrix::from_columns(&cols)))
    }

    pub(crate) fn from_na(m: DMatrix<f64>) -> Self {
        debug_assert!(m.nrows() > 0 && m.ncols() > 0);
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity dimension must be positive");
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be positive");
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let v = Vector::from_slice(entries)?;
        Ok(Self(DMatrix::from_diagonal(&v.0)))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector(self.0.row(i).transpose())
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector(self.0.column(j).into_owned())
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn as_na(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Matrix {
        Matrix(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix(&self.0 * s)
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if self.cols() != v.dim() {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols(),
                found: v.dim(),
            });
        }
        Ok(Vector(&self.0 * &v.0))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols(),
                found: other.rows(),
            });
        }
        Ok(Matrix(&self.0 * &other.0))
    }

    /// `[self other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows() != other.rows() {
            return Err(Error::DimensionMismatch {
                context: "horizontal stack",
                expected: self.rows(),
                found: other.rows(),
            });
        }
        let mut m = DMatrix::zeros(self.rows(), self.cols() + other.cols());
        m.columns_mut(0, self.cols()).copy_from(&self.0);
        m.columns_mut(self.cols(), other.cols()).copy_from(&other.0);
        Ok(Matrix(m))
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        Ok(self.transpose().hstack(&other.transpose())?.transpose())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 + &rhs.0)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 - &rhs.0)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-&self.0)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 * &rhs.0)
    }
}

impl Mul<&Vector> for &Matrix {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        Vector(&self.0 * &rhs.0)
    }
}

/// Relative rank tolerance used when the caller passes 0: `max(rows, cols)·ε`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Thin SVD `A = U diag(σ) Vᵀ` with `σ` sorted descending.
struct Svd {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
}

const MAX_SWEEPS: usize = 80;

/// One-sided Jacobi (Hestenes) SVD. Orthogonalizes the columns of `A` (or of
/// `Aᵀ` when `A` is wide) by plane rotations accumulated into `V`.
fn jacobi_svd(a: &DMatrix<f64>) -> Svd {
    let wide = a.nrows() < a.ncols();
    let mut w = if wide { a.transpose() } else { a.clone() };
    let (rows, k) = w.shape();
    let mut v = DMatrix::<f64>::identity(k, k);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
                for i in 0..k {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..k).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMatrix::zeros(rows, k);
    let mut vs = DMatrix::zeros(k, k);
    let mut sigma = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        if s > 0.0 {
            u.set_column(dst, &(w.column(src) / s));
        }
        vs.set_column(dst, &v.column(src));
        sigma.push(s);
    }
    if wide {
        Svd { u: vs, sigma, v: u }
    } else {
        Svd { u, sigma, v: vs }
    }
}

struct Decomposition {
    svd: Svd,
    cutoff: f64,
}

impl Decomposition {
    /// Indices of the singular values above the cutoff.
    fn kept(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.svd
            .sigma
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, s)| s > self.cutoff)
    }
}

fn decompose(a: &Matrix, rank_tol: f64) -> Result<Decomposition> {
    if !rank_tol.is_finite() || rank_tol < 0.0 {
        return Err(Error::InvalidTolerance(rank_tol));
    }
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return Err(Error::Empty);
    }
    check_finite(a.0.as_slice())?;
    let tol = if rank_tol == 0.0 {
        default_rank_tol(r, c)
    } else {
        rank_tol
    };
    let svd = jacobi_svd(&a.0);
    Ok(Decomposition {
        cutoff: tol * svd.sigma[0],
        svd,
    })
}

/// Singular values in descending order.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    jacobi_svd(&a.0).sigma
}

/// Number of singular values strictly above `rank_tol·σ_max` (`rank_tol = 0` selects the default).
pub fn rank(a: &Matrix, rank_tol: f64) -> Result<usize> {
    let d = decompose(a, rank_tol)?;
    Ok(d.kept().count())
}

/// Moore–Penrose pseudoinverse `A†` via a thin SVD, `A† = V Σ⁺ Uᵀ`.
///
/// Singular values at or below `rank_tol·σ_max` are treated as zero; a
/// `rank_tol` of 0 selects [`default_rank_tol`].
pub fn pseudoinverse(a: &Matrix, rank_tol: f64) -> Result<Matrix> {
    let d = decompose(a, rank_tol)?;
    let (r, c) = a.shape();
    let mut pinv = DMatrix::zeros(c, r);
    for (k, s) in d.kept() {
        // rank-one update v_k u_kᵀ / σ_k
        pinv += (d.svd.v.column(k) * d.svd.u.column(k).transpose()) / s;
    }
    Ok(Matrix(pinv))
}

/// Largest singular value (the induced 2-norm).
pub fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Minimum-norm least-squares solution `A†b`, without materializing `A†`.
pub fn solve_least_squares(a: &Matrix, b: &Vector) -> Result<Vector> {
    solve_least_squares_with_tol(a, b, 0.0)
}

pub fn solve_least_squares_with_tol(a: &Matrix, b: &Vector, rank_tol: f64) -> Result<Vector> {
    if a.rows() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "least-squares right-hand side",
            expected: a.rows(),
            found: b.dim(),
        });
    }
    let d = decompose(a, rank_tol)?;
    let mut x = DVector::zeros(a.cols());
    for (k, s) in d.kept() {
        let coeff = d.svd.u.column(k).dot(&b.0) / s;
        x += d.svd.v.column(k) * coeff;
    }
    Ok(Vector(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn identity_is_its_own_pseudoinverse() {
        let p = pseudoinverse(&Matrix::identity(3), 0.0).unwrap();
        assert_eq!(max_abs_diff(&p, &Matrix::identity(3)), 0.0);
    }

    #[test]
    fn column_pseudoinverse_matches_normal_equations() {
        // (AᵀA)⁻¹Aᵀ for A = [1; 2] is [1, 2] / 5.
        let a = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let p = pseudoinverse(&a, 0.0).unwrap();
        assert_eq!(p.shape(), (1, 2));
        assert_relative_eq!(p.get(0, 0), 0.2, max_relative = 1e-14);
        assert_relative_eq!(p.get(0, 1), 0.4, max_relative = 1e-14);
    }

    #[test]
    fn zero_matrix_pseudoinverse_is_zero_transpose_shape() {
        let p = pseudoinverse(&Matrix::zeros(2, 3), 0.0).unwrap();
        assert_eq!(p.shape(), (3, 2));
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn rejects_bad_construction() {
        assert_eq!(Matrix::from_row_major(0, 2, vec![]), Err(Error::Empty));
        assert_eq!(
            Matrix::from_rows(&[[1.0, f64::NAN]]),
            Err(Error::NonFinite(1))
        );
        assert!(Vector::from_vec(vec![]).is_err());
        assert_eq!(
            Vector::from_vec(vec![1.0, f64::INFINITY]),
            Err(Error::NonFinite(1))
        );
        assert!(matches!(
            pseudoinverse(&Matrix::identity(2), -1.0),
            Err(Error::InvalidTolerance(_))
        ));
    }

    #[test]
    fn spectral_norm_examples() {
        assert_relative_eq!(
            spectral_norm(&Matrix::identity(4)),
            1.0,
            max_relative = 1e-15
        );
        let d = Matrix::diagonal(&[3.0, 1.0]).unwrap();
        assert_relative_eq!(spectral_norm(&d), 3.0, max_relative = 1e-15);
        // Largest root of λ² − 30λ + 4 = 0 (characteristic polynomial of AᵀA).
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let lambda = 15.0 + (221.0f64).sqrt();
        assert_relative_eq!(spectral_norm(&a), lambda.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(spectral_norm(&a), 5.4649857, max_relative = 1e-7);
    }

    #[test]
    fn least_squares_examples() {
        let b = Vector::from_slice(&[3.0, 4.0]).unwrap();
        let x = solve_least_squares(&Matrix::identity(2), &b).unwrap();
        assert_relative_eq!(x.get(0), 3.0, max_relative = 1e-15);
        assert_relative_eq!(x.get(1), 4.0, max_relative = 1e-15);

        let col = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let x = solve_least_squares(&col, &Vector::from_slice(&[-8.0, -40.0]).unwrap()).unwrap();
        assert_relative_eq!(x.get(0), -17.6, max_relative = 1e-13);

        let row = Matrix::from_rows(&[[1.0, -1.0]]).unwrap();
        let x = solve_least_squares(&row, &Vector::from_slice(&[0.0]).unwrap()).unwrap();
        assert_eq!(x.to_vec(), vec![0.0, 0.0]);

        assert!(matches!(
            solve_least_squares(&row, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rank_counts_nonzero_singular_values() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(rank(&a, 0.0).unwrap(), 1);
        assert_eq!(rank(&Matrix::identity(3), 0.0).unwrap(), 3);
        assert_eq!(rank(&Matrix::zeros(2, 2), 0.0).unwrap(), 0);
    }

    #[test]
    fn rank_deficient_pseudoinverse_satisfies_penrose() {
        // rank-2 product of 4×2 and 2×5 factors
        let l = Matrix::from_rows(&[[1.0, 0.5], [-2.0, 1.0], [0.3, 0.7], [1.5, -1.0]]).unwrap();
        let r =
            Matrix::from_rows(&[[1.0, 0.0, 2.0, -1.0, 0.5], [0.0, 1.0, 1.0, 3.0, -0.5]]).unwrap();
        let a = &l * &r;
        let p = pseudoinverse(&a, 1e-10).unwrap();
        let tol = 1e-10 * (1.0 + spectral_norm(&a));
        assert!(max_abs_diff(&(&(&a * &p) * &a), &a) <= tol);
        assert!(max_abs_diff(&(&(&p * &a) * &p), &p) <= tol);
        let ap = &a * &p;
        let pa = &p * &a;
        assert!(max_abs_diff(&ap.transpose(), &ap) <= tol);
        assert!(max_abs_diff(&pa.transpose(), &pa) <= tol);
    }

    #[test]
    fn stacking_shapes() {
        let a = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let h = a.hstack(&a.scale(-1.0)).unwrap();
        assert_eq!(h.to_row_major(), vec![1.0, 2.0, -1.0, -2.0]);
        let v = a.vstack(&a).unwrap();
        assert_eq!(v.shape(), (2, 2));
        assert_eq!(v.to_row_major(), vec![1.0, 2.0, 1.0, 2.0]);
    }

    #[test]
    fn rank_two_eight_by_eight_is_decomposed_accurately() {
        // reconstruction of this matrix is off by ~7e-2 with nalgebra's bidiagonal SVD
        let a = Matrix::from_row_major(
            8,
            8,
            vec![
                0.3359624972422351,
                -0.4053848972516399,
                -0.30728766755905945,
                -0.017148331991435617,
                -0.12665919940332643,
                -0.10630518248707846,
                -0.31321461822306135,
                0.1874310005482644,
                0.29705921982840044,
                -0.6194580333173023,
                -0.40973680092345754,
                -0.07827345699132474,
                -0.19205571356709142,
                -0.18228421254876262,
                -0.4014714102439192,
                0.19132042658421144,
                -0.1978578622317031,
                -0.0719160410992173,
                0.016685673389801474,
                -0.06501498157147421,
                -0.02069751409748894,
                -0.042474620540218985,
                0.036251003537980775,
                -0.07992248668295382,
                0.5887421415562806,
                0.6733413187171572,
                0.19326679860810358,
                0.3045233483165591,
                0.20248684059124836,
                0.2817622471132293,
                0.11127991769566413,
                0.1927753696924115,
                0.10291336483436248,
                0.4966360479507798,
                0.2341743277033719,
                0.14485384773550664,
                0.15162861031954533,
                0.17742779909621115,
                0.20023519070107004,
                -0.0034580529106327113,
                -0.3948369379511605,
                -0.3789612023612838,
                -0.09121433862149124,
                -0.18667026073685225,
                -0.11352402154308186,
                -0.1644013972905815,
                -0.03998748690996831,
                -0.13640361066414372,
                0.6136426551295516,
                0.6755048253092601,
                0.18752477873524276,
                0.31104027088101294,
                0.2029790810992421,
                0.2847781067070169,
                0.10343196162082503,
                0.2035089613671623,
                0.8459578619841289,
                -0.4844116566204013,
                -0.4901164116166824,
                0.08650490920645279,
                -0.15440993803832712,
                -0.08625573369184394,
                -0.5327936784525693,
                0.4193627747763151,
            ],
        )
        .unwrap();
        let d = decompose(&a, 0.0).unwrap();
        assert_eq!(d.kept().count(), 2);
        let mut recon = DMatrix::zeros(8, 8);
        for (k, s) in d.svd.sigma.iter().enumerate() {
            recon += d.svd.u.column(k) * d.svd.v.column(k).transpose() * *s;
        }
        assert!((recon - &a.0).norm() < 1e-14);
        let p = pseudoinverse(&a, 0.0).unwrap();
        assert!(spectral_norm(&(&(&(&a * &p) * &a) - &a)) < 1e-13);
        assert!(spectral_norm(&(&(&(&p * &a) * &p) - &p)) < 1e-13);
    }

    #[test]
    fn wide_and_tall_svd_agree() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.5]]).unwrap();
        let s1 = singular_values(&a);
        let s2 = singular_values(&a.transpose());
        assert_eq!(s1.len(), 2);
        for (x, y) in s1.iter().zip(&s2) {
            assert_relative_eq!(x, y, max_relative = 1e-14);
        }
        let p = pseudoinverse(&a, 0.0).unwrap();
        assert!(max_abs_diff(&(&(&a * &p) * &a), &a) < 1e-14);
    }
}
