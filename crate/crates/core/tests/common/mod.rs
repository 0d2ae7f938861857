#![allow(dead_code)]

use centred_simplex::matcore::{default_rank_tol, singular_values};
use centred_simplex::{Matrix, SampleSet, Vector};
use nalgebra::{DMatrix, DVector};
use proptest::collection::vec;
use proptest::prelude::*;

pub const MAX_CONDITION: f64 = 1e3;

pub fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), &a.to_row_major())
}

pub fn from_na(a: &DMatrix<f64>) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..a.nrows())
        .map(|i| a.row(i).iter().copied().collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

pub fn vec_na(v: &Vector) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

pub fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

pub fn rel_v(a: &Vector, b: &Vector) -> f64 {
    (vec_na(a) - vec_na(b)).norm() / (1.0 + b.norm())
}

/// True when every singular value is either below the cutoff or within
/// `MAX_CONDITION` of the largest one.
pub fn well_conditioned(a: &Matrix) -> bool {
    let s = singular_values(a);
    let smax = s[0];
    if smax < 1e-2 {
        return false;
    }
    let tol = default_rank_tol(a.rows(), a.cols()) * smax;
    s.iter()
        .all(|&x| x <= tol || (x >= smax / MAX_CONDITION && x > 1e6 * tol))
}

fn product(r: usize, k: usize, c: usize, b: &[f64], cc: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(r, k, b) * DMatrix::from_row_slice(k, c, cc)
}

/// Random `r × c` matrix of rank at most `k`, as a product `B·C`.
pub fn low_rank(r: usize, c: usize, k: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (vec(-1.0..1.0f64, r * k), vec(-1.0..1.0f64, k * c))
        .prop_map(move |(b, cc)| product(r, k, c, &b, &cc))
}

/// Matrices up to `max × max` of any rank.
pub fn any_matrix(max: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max, 1..=max)
        .prop_flat_map(|(r, c)| (Just(r), Just(c), 1..=r.min(c)))
        .prop_flat_map(|(r, c, k)| low_rank(r, c, k))
}

/// Full-rank matrices up to `max × max`.
pub fn full_rank_matrix(max: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| low_rank(r, c, r.min(c)))
}

fn set_from(x0: Vec<f64>, s: &DMatrix<f64>) -> Option<SampleSet> {
    let dirs = (0..s.ncols())
        .map(|j| Vector::from_vec(s.column(j).iter().copied().collect()).unwrap())
        .collect();
    SampleSet::new(Vector::from_vec(x0).unwrap(), dirs).ok()
}

/// Sample sets with `n ≤ max_n`, `m ≤ max_m` and direction matrix of rank `k`
/// chosen by `rank_of(n, m)`.
fn sets(
    max_n: usize,
    max_m: usize,
    rank_of: fn(usize, usize) -> BoxedStrategy<usize>,
) -> impl Strategy<Value = SampleSet> {
    (1..=max_n, 1..=max_m)
        .prop_flat_map(move |(n, m)| (Just(n), Just(m), rank_of(n, m)))
        .prop_flat_map(|(n, m, k)| (vec(-1.0..1.0f64, n), low_rank(n, m, k)))
        .prop_filter_map("degenerate set", |(x0, s)| {
            let xs = set_from(x0, &s)?;
            well_conditioned(&xs.direction_matrix()).then_some(xs)
        })
}

/// Sample sets of any rank.
pub fn any_set(max_n: usize, max_m: usize) -> impl Strategy<Value = SampleSet> {
    sets(max_n, max_m, |n, m| (1..=n.min(m)).boxed())
}

/// Sample sets whose `S` has full rank `min(n, m)`.
pub fn full_rank_set(max_n: usize, max_m: usize) -> impl Strategy<Value = SampleSet> {
    sets(max_n, max_m, |n, m| Just(n.min(m)).boxed())
}

/// Full-rank sets in a fixed dimension `n`.
pub fn full_rank_set_in(n: usize, max_m: usize) -> impl Strategy<Value = SampleSet> {
    (1..=max_m)
        .prop_flat_map(move |m| (vec(-1.0..1.0f64, n), low_rank(n, m, n.min(m))))
        .prop_filter_map("degenerate set", |(x0, s)| {
            let xs = set_from(x0, &s)?;
            well_conditioned(&xs.direction_matrix()).then_some(xs)
        })
}

/// Smooth test function `f(y) = exp(½aᵀy) + sin(bᵀy) + c` with gradient.
#[derive(Clone, Debug)]
pub struct Smooth {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl Smooth {
    pub fn eval(&self, y: &Vector) -> f64 {
        let ay: f64 = self.a.iter().zip(y.iter()).map(|(a, y)| a * y).sum();
        let by: f64 = self.b.iter().zip(y.iter()).map(|(b, y)| b * y).sum();
        (0.5 * ay).exp() + by.sin() + self.c
    }
}

pub fn smooth(n: usize, c: std::ops::Range<f64>) -> impl Strategy<Value = Smooth> {
    (vec(-1.0..1.0f64, n), vec(-1.0..1.0f64, n), c).prop_map(|(a, b, c)| Smooth { a, b, c })
}

/// Quadratic `½yᵀAy + bᵀy + c` with symmetric `A`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: f64,
}

impl Quadratic {
    pub fn eval(&self, y: &Vector) -> f64 {
        let y = vec_na(y);
        0.5 * y.dot(&(&self.a * &y)) + self.b.dot(&y) + self.c
    }

    pub fn gradient(&self, y: &Vector) -> Vector {
        let g = &self.a * vec_na(y) + &self.b;
        Vector::from_vec(g.iter().copied().collect()).unwrap()
    }
}

pub fn quadratic(n: usize, c: std::ops::Range<f64>) -> impl Strategy<Value = Quadratic> {
    (vec(-1.0..1.0f64, n * n), vec(-1.0..1.0f64, n), c).prop_map(move |(a, b, c)| {
        let a = DMatrix::from_row_slice(n, n, &a);
        Quadratic {
            a: &a + a.transpose(),
            b: DVector::from_vec(b),
            c,
        }
    })
}

/// Independent centred simplex gradient for a full-rank set, via normal equations.
pub fn oracle_gcsg(xs: &SampleSet, f: impl Fn(&Vector) -> f64) -> DVector<f64> {
    let s = to_na(&xs.direction_matrix());
    let x0 = vec_na(xs.x0());
    let dc = DVector::from_iterator(
        s.ncols(),
        (0..s.ncols()).map(|j| {
            let d = s.column(j).into_owned();
            let p = Vector::from_vec((&x0 + &d).iter().copied().collect()).unwrap();
            let q = Vector::from_vec((&x0 - &d).iter().copied().collect()).unwrap();
            0.5 * (f(&p) - f(&q))
        }),
    );
    oracle_min_norm(&s, &dc)
}

/// Minimum-norm solution of `Sᵀg = v` for `S` of full rank, via Householder QR.
pub fn oracle_min_norm(s: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let (n, m) = s.shape();
    if m >= n {
        // Sᵀ = QR, least squares solution R⁻¹Qᵀv
        let qr = s.transpose().qr();
        let rhs = qr.q().transpose() * v;
        qr.r().solve_upper_triangular(&rhs).unwrap()
    } else {
        // S = QR, so Sᵀ = RᵀQᵀ and the minimum-norm solution is QR⁻ᵀv
        let qr = s.clone().qr();
        let y = qr.r().transpose().solve_lower_triangular(v).unwrap();
        qr.q() * y
    }
}

/// Orthogonal projector onto the column space of a full-column-rank `S`.
pub fn oracle_projector(s: &DMatrix<f64>) -> DMatrix<f64> {
    let q = s.clone().qr().q();
    &q * q.transpose()
}
