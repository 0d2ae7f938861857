//! Golden-value and randomized self-checks, run by `csg verify`.

use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{gcsg_bound, LipschitzData};
use crate::calculus::{
    gcscg_chain, gcscg_exp, gcscg_log, gcscg_power, gcscg_product, gcscg_quotient, gcsg_chain,
    gcsg_power, gcsg_product, gcsg_product_k, gcsg_quotient, gsg_error_term, CalculusDecomposition,
    ChainContext, GsgRule,
};
use crate::error::Result;
use crate::matcore::{self, Matrix, Vector};
use crate::sampleset::{Classification, SampleSet};
use crate::simplexgrad::{
    augmented_set, gcsg, gcsg_via_average, gsg, projector_onto_span, GradientEstimate,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: &str, description: &str, passed: bool, detail: String) -> Self {
        Self {
            id: id.to_string(),
            description: description.to_string(),
            passed,
            detail,
        }
    }

    fn from_result(id: &str, description: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(id, description, passed, detail),
            Err(e) => Self::new(id, description, false, format!("error: {e}")),
        }
    }
}

/// `‖a − b‖ / (1 + ‖b‖)`.
pub fn rel_err(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn v(x: &[f64]) -> Vector {
    Vector::from_slice(x).expect("finite literal")
}

fn value_check(got: &Vector, want: &Vector, tol: f64) -> (bool, String) {
    let e = rel_err(got, want);
    (
        e <= tol,
        format!("got {got}, expected {want}, rel err {e:.3e}"),
    )
}

fn abs_check(got: &Vector, want: &Vector, tol: f64) -> (bool, String) {
    let e = (got - want).iter().map(f64::abs).fold(0.0, f64::max);
    (
        e <= tol,
        format!("got {got}, expected {want}, abs err {e:.3e}"),
    )
}

/// Worked examples with known values.
pub fn golden_checks() -> Vec<Check> {
    let quartic = |y: &Vector| y.get(0).powi(4);
    let sqnorm2 = |y: &Vector| y.get(0).powi(2) + y.get(1).powi(2);
    let ellipse2 = |y: &Vector| y.get(0).powi(2) + 2.0 * y.get(1).powi(2) - 3.0;
    let e2 = E * E;
    let alpha = 1.5;

    vec![
        Check::from_result(
            "golden.quartic.ordered",
            "GCSG of y^4 over <-1,0,1> is -17.6",
            (|| {
                let xs = SampleSet::from_scalar_points(&[-1.0, 0.0, 1.0])?;
                Ok(value_check(
                    &gcsg(&xs, &xs.evaluate(quartic)?)?.value,
                    &v(&[-17.6]),
                    1e-12,
                ))
            })(),
        ),
        Check::from_result(
            "golden.quartic.reordered",
            "GCSG of y^4 over <0,1,-1> is 0",
            (|| {
                let xs = SampleSet::from_scalar_points(&[0.0, 1.0, -1.0])?;
                Ok(abs_check(
                    &gcsg(&xs, &xs.evaluate(quartic)?)?.value,
                    &v(&[0.0]),
                    1e-12,
                ))
            })(),
        ),
        Check::from_result(
            "golden.projector",
            "projector onto span of [[1,0],[0,1],[1,1]]",
            (|| {
                let s = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])?;
                let want =
                    Matrix::from_rows(&[[2.0, -1.0, 1.0], [-1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])?
                        .scale(1.0 / 3.0);
                let got = projector_onto_span(&s).matrix;
                let err = (&got - &want).max_abs();
                Ok((err <= 1e-12, format!("max entry error {err:.3e}")))
            })(),
        ),
        Check::from_result(
            "golden.chain.scalar",
            "chain f=y^2, g=y^2+1 over <2,3>: 40 and 48",
            (|| {
                let xs = SampleSet::from_scalar_points(&[2.0, 3.0])?;
                let ctx = ChainContext::evaluate(
                    &xs,
                    |y| v(&[y.get(0).powi(2) + 1.0]),
                    |z| z.get(0).powi(2),
                )?;
                let cc = gcscg_chain(&ctx)?.value;
                let direct = gcsg(&xs, ctx.composite_table())?.value;
                let d = gcsg_chain(&ctx)?;
                let (a, da) = value_check(&cc, &v(&[40.0]), 1e-12);
                let (b, db) = value_check(&direct, &v(&[48.0]), 1e-12);
                let (c, dc) = value_check(&d.error_term, &v(&[-8.0]), 1e-12);
                Ok((
                    a && b && c,
                    format!("calculus: {da}; direct: {db}; E: {dc}"),
                ))
            })(),
        ),
        Check::from_result(
            "golden.chain.vector",
            "chain f=a|y|^2, g(y)=(y2-2y1, y1+y2, y1y2+y2)",
            (|| {
                let xs = SampleSet::from_points(&[v(&[1.0, 2.0]), v(&[2.0, 2.0]), v(&[1.0, 3.0])])?;
                let g = |y: &Vector| {
                    let (a, b) = (y.get(0), y.get(1));
                    v(&[b - 2.0 * a, a + b, a * b + b])
                };
                let ctx = ChainContext::evaluate(&xs, g, |z| alpha * z.dot(z))?;
                let inner = ctx.outer_gradient()?;
                let cc = gcscg_chain(&ctx)?.value;
                let (a, da) = value_check(&inner, &v(&[0.0, 4.4 * alpha, 8.8 * alpha]), 1e-12);
                let (b, db) = value_check(&cc, &v(&[22.0 * alpha, 22.0 * alpha]), 1e-12);
                let truth = v(&[22.0 * alpha, 22.0 * alpha]);
                Ok((
                    a && b,
                    format!(
                        "outer: {da}; calculus: {db}; abs err {:.3e}",
                        (&cc - &truth).norm()
                    ),
                ))
            })(),
        ),
        Check::from_result(
            "golden.exp.full",
            "exp rule, full rank: (2e^2, 2e^2); direct ~ (72.85, 72.85)",
            (|| {
                let xs = SampleSet::from_points(&[v(&[1.0, 1.0]), v(&[2.0, 1.0]), v(&[1.0, 2.0])])?;
                let cc = gcscg_exp(&xs, &xs.evaluate(sqnorm2)?, E)?.value;
                let direct = gcsg(&xs, &xs.evaluate(|y| sqnorm2(y).exp())?)?.value;
                let (a, da) = value_check(&cc, &v(&[2.0 * e2, 2.0 * e2]), 1e-12);
                let (b, db) = abs_check(&direct, &v(&[72.85, 72.85]), 1e-2);
                Ok((a && b, format!("calculus: {da}; direct: {db}")))
            })(),
        ),
        Check::from_result(
            "golden.exp.under",
            "exp rule, underdetermined: (2e^2, 0)",
            (|| {
                let xs = SampleSet::from_points(&[v(&[1.0, 1.0]), v(&[2.0, 1.0])])?;
                let cc = gcscg_exp(&xs, &xs.evaluate(sqnorm2)?, E)?.value;
                Ok(value_check(&cc, &v(&[2.0 * e2, 0.0]), 1e-12))
            })(),
        ),
        Check::from_result(
            "golden.log",
            "log rule: (4/9, 8/9); direct ~ (0.4236, 0.9229)",
            (|| {
                let xs = SampleSet::from_points(&[v(&[2.0, 2.0]), v(&[3.0, 2.0]), v(&[2.0, 3.0])])?;
                let cc = gcscg_log(&xs, &xs.evaluate(ellipse2)?, E)?.value;
                let direct = gcsg(&xs, &xs.evaluate(|y| ellipse2(y).ln())?)?.value;
                let (a, da) = value_check(&cc, &v(&[4.0 / 9.0, 8.0 / 9.0]), 1e-12);
                let (b, db) = abs_check(&direct, &v(&[0.4236, 0.9229]), 1e-3);
                Ok((a && b, format!("calculus: {da}; direct: {db}")))
            })(),
        ),
        Check::from_result(
            "golden.bound.quartic",
            "bound for y^4 over <-1,0,1> dominates error 13.6",
            (|| {
                let xs = SampleSet::from_scalar_points(&[-1.0, 0.0, 1.0])?;
                let err = (gcsg(&xs, &xs.evaluate(quartic)?)?.value.get(0) + 4.0).abs();
                // |f'''(y)| = 24|y| ≤ 72 on [-3, 1]
                let bound = gcsg_bound(&xs, &LipschitzData::new(72.0)?)?
                    .bound
                    .unwrap_or(f64::NAN);
                Ok((
                    bound >= err && (err - 13.6).abs() < 1e-12,
                    format!("error {err}, bound {bound}"),
                ))
            })(),
        ),
    ]
}

/// Seeded generator of random matrices, sample sets and smooth functions.
pub struct Gen {
    rng: ChaCha8Rng,
}

/// Largest condition number (over retained singular values) a generated matrix may have.
pub const MAX_CONDITION: f64 = 1e3;

/// `c + bᵀy + s·sin(aᵀy + φ) + t·exp(wᵀy/2)`.
#[derive(Clone, Debug)]
pub struct SmoothFn {
    c: f64,
    b: Vector,
    s: f64,
    a: Vector,
    phase: f64,
    t: f64,
    w: Vector,
}

impl SmoothFn {
    pub fn eval(&self, y: &Vector) -> f64 {
        self.c
            + self.b.dot(y)
            + self.s * (self.a.dot(y) + self.phase).sin()
            + self.t * (0.5 * self.w.dot(y)).exp()
    }
}

/// `yᵀAy + bᵀy + c`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub a: Matrix,
    pub b: Vector,
    pub c: f64,
}

impl Quadratic {
    pub fn eval(&self, y: &Vector) -> f64 {
        y.dot(&(&self.a * y)) + self.b.dot(y) + self.c
    }

    pub fn gradient(&self, y: &Vector) -> Vector {
        &(&(&self.a + &self.a.transpose()) * y) + &self.b
    }
}

/// Conditioning over the retained singular values is at most [`MAX_CONDITION`],
/// with no singular value near the rank cutoff.
fn condition_ok(a: &Matrix) -> bool {
    well_conditioned_rank(a).is_some()
}

fn well_conditioned_rank(a: &Matrix) -> Option<usize> {
    let s = matcore::singular_values(a);
    let tol = matcore::default_rank_tol(a.rows(), a.cols()) * s[0];
    if s[0] == 0.0 || s.iter().any(|&x| x >= tol && x <= 1e6 * tol) {
        return None;
    }
    let kept: Vec<f64> = s.iter().copied().filter(|&x| x > tol).collect();
    (s[0] / kept[kept.len() - 1] <= MAX_CONDITION).then_some(kept.len())
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn vector(&mut self, n: usize, scale: f64) -> Vector {
        Vector::from_vec((0..n).map(|_| self.uniform(-scale, scale)).collect()).expect("finite")
    }

    fn raw_matrix(&mut self, r: usize, c: usize, rank: usize) -> Matrix {
        let b = Matrix::from_row_major(
            r,
            rank,
            (0..r * rank).map(|_| self.uniform(-1.0, 1.0)).collect(),
        )
        .expect("finite");
        let c = Matrix::from_row_major(
            rank,
            c,
            (0..rank * c).map(|_| self.uniform(-1.0, 1.0)).collect(),
        )
        .expect("finite");
        &b * &c
    }

    /// Random `r × c` matrix of the given rank with bounded conditioning.
    pub fn matrix(&mut self, r: usize, c: usize, rank: usize) -> Matrix {
        loop {
            let a = self.raw_matrix(r, c, rank.max(1));
            if well_conditioned_rank(&a) == Some(rank.max(1)) {
                return a;
            }
        }
    }

    /// Random set in ℝⁿ with `m` directions whose matrix has rank `rank`.
    pub fn sample_set(&mut self, n: usize, m: usize, rank: usize) -> SampleSet {
        loop {
            let s = self.matrix(n, m, rank);
            let dirs: Vec<Vector> = (0..m).map(|j| s.column(j)).collect();
            if let Ok(xs) = SampleSet::new(self.vector(n, 1.0), dirs) {
                return xs;
            }
        }
    }

    /// Random set with a random shape and a random rank (full or deficient).
    pub fn any_sample_set(&mut self) -> SampleSet {
        let n = self.usize_in(1, 4);
        let m = self.usize_in(1, 6);
        let full = n.min(m);
        let rank = if full > 1 && self.uniform(0.0, 1.0) < 0.3 {
            self.usize_in(1, full - 1)
        } else {
            full
        };
        self.sample_set(n, m, rank)
    }

    /// Random set whose matrix has full rank `min(n, m)`.
    pub fn full_rank_set(&mut self) -> SampleSet {
        let n = self.usize_in(1, 4);
        let m = self.usize_in(1, 6);
        self.sample_set(n, m, n.min(m))
    }

    pub fn smooth(&mut self, n: usize) -> SmoothFn {
        SmoothFn {
            c: self.uniform(-1.0, 1.0),
            b: self.vector(n, 1.0),
            s: self.uniform(-1.0, 1.0),
            a: self.vector(n, 1.5),
            phase: self.uniform(0.0, 3.0),
            t: self.uniform(-0.5, 0.5),
            w: self.vector(n, 1.0),
        }
    }

    /// Smooth function with values in `[c − 1.5, c + 1.5]` away from zero.
    pub fn positive_smooth(&mut self, n: usize) -> SmoothFn {
        SmoothFn {
            c: self.uniform(3.0, 4.0),
            b: Vector::zeros(n),
            s: self.uniform(-1.0, 1.0),
            a: self.vector(n, 1.5),
            phase: self.uniform(0.0, 3.0),
            t: 0.0,
            w: Vector::zeros(n),
        }
    }

    pub fn quadratic(&mut self, n: usize) -> Quadratic {
        let a = Matrix::from_row_major(n, n, (0..n * n).map(|_| self.uniform(-1.0, 1.0)).collect())
            .expect("finite");
        Quadratic {
            a: (&a + &a.transpose()).scale(0.5),
            b: self.vector(n, 1.0),
            c: self.uniform(-1.0, 1.0),
        }
    }

    /// Quadratic with a positive constant term large enough to stay away from 0 near `x0`.
    pub fn positive_quadratic(&mut self, n: usize) -> Quadratic {
        let mut q = self.quadratic(n);
        q.a = q.a.scale(0.2);
        q.b = q.b.scale(0.2);
        q.c = self.uniform(5.0, 6.0);
        q
    }
}

fn decomposition_residual(d: &CalculusDecomposition, direct: &Vector) -> f64 {
    (&d.total - direct).norm() / (1.0 + direct.norm() + d.rule_value.norm() + d.error_term.norm())
}

struct Worst {
    worst: f64,
    failures: usize,
    cases: usize,
    skipped: usize,
}

impl Worst {
    fn new() -> Self {
        Self {
            worst: 0.0,
            failures: 0,
            cases: 0,
            skipped: 0,
        }
    }

    fn record(&mut self, err: f64, tol: f64) {
        self.cases += 1;
        if err.is_nan() || err > tol {
            self.failures += 1;
        }
        if err.is_nan() || err > self.worst {
            self.worst = err;
        }
    }

    fn record_opt(&mut self, err: Option<f64>, tol: f64) {
        match err {
            Some(e) => self.record(e, tol),
            None => self.skipped += 1,
        }
    }

    fn check(&self, id: &str, description: &str, tol: f64) -> Check {
        Check::new(
            id,
            description,
            self.failures == 0 && self.cases > 0,
            format!(
                "{} cases, {} skipped, {} failures, worst {:.3e} (tol {tol:.0e})",
                self.cases, self.skipped, self.failures, self.worst
            ),
        )
    }
}

/// Randomized property checks; each runs `cases` seeded cases.
pub fn property_checks(cases: usize, seed: u64) -> Vec<Check> {
    let mut g = Gen::new(seed);
    let mut out = Vec::new();

    // Penrose conditions
    let mut w = Worst::new();
    for _ in 0..cases {
        let (r, c) = (g.usize_in(1, 8), g.usize_in(1, 8));
        let rank = g.usize_in(1, r.min(c));
        let a = g.matrix(r, c, rank);
        let p = matcore::pseudoinverse(&a, 0.0).expect("finite");
        let ap = &a * &p;
        let pa = &p * &a;
        let scale = 1.0 + matcore::spectral_norm(&a);
        let errs = [
            matcore::spectral_norm(&(&(&ap * &a) - &a)),
            matcore::spectral_norm(&(&(&pa * &p) - &p)),
            matcore::spectral_norm(&(&ap.transpose() - &ap)),
            matcore::spectral_norm(&(&pa.transpose() - &pa)),
        ];
        w.record(errs.iter().fold(0.0f64, |m, &e| m.max(e)) / scale, 1e-10);
    }
    out.push(w.check("property.penrose", "four Penrose conditions", 1e-10));

    // pseudoinverse of the transpose
    let mut w = Worst::new();
    for _ in 0..cases {
        let (r, c) = (g.usize_in(1, 8), g.usize_in(1, 8));
        let rank = g.usize_in(1, r.min(c));
        let a = g.matrix(r, c, rank);
        let p = matcore::pseudoinverse(&a, 0.0).expect("finite");
        let pt = matcore::pseudoinverse(&a.transpose(), 0.0).expect("finite");
        let err = (&pt - &p.transpose()).max_abs() / (1.0 + matcore::spectral_norm(&p));
        w.record(err, 1e-12);
    }
    out.push(w.check("property.transpose", "pinv(A^T) = pinv(A)^T", 1e-12));

    // pseudoinverse of [A -A]
    let mut w = Worst::new();
    for _ in 0..cases {
        let r = g.usize_in(1, 4);
        let c = g.usize_in(r, 6);
        let a = g.matrix(r, c, r);
        let p = matcore::pseudoinverse(&a, 0.0).expect("finite");
        let stacked =
            matcore::pseudoinverse(&a.hstack(&(-&a)).expect("same rows"), 0.0).expect("finite");
        let want = p.vstack(&(-&p)).expect("same cols").scale(0.5);
        let err = (&stacked - &want).max_abs() / (1.0 + want.max_abs());
        w.record(err, 1e-10);
    }
    out.push(w.check(
        "property.negation",
        "pinv([A -A]) = 1/2 [pinv(A); -pinv(A)]",
        1e-10,
    ));

    // least squares vs explicit pseudoinverse
    let mut w = Worst::new();
    for _ in 0..cases {
        let (r, c) = (g.usize_in(1, 8), g.usize_in(1, 8));
        let rank = g.usize_in(1, r.min(c));
        let a = g.matrix(r, c, rank);
        let b = g.vector(r, 1.0);
        let x = matcore::solve_least_squares(&a, &b).expect("finite");
        let want = &matcore::pseudoinverse(&a, 0.0).expect("finite") * &b;
        w.record(rel_err(&x, &want), 1e-12);
    }
    out.push(w.check(
        "property.lstsq",
        "solve_least_squares(A, b) = pinv(A) b",
        1e-12,
    ));

    // gcsg == gcsg_via_average
    let mut w = Worst::new();
    for _ in 0..cases {
        let xs = g.any_sample_set();
        let f = g.smooth(xs.dim());
        let r = (|| -> Result<f64> {
            let tab = xs.evaluate(|y| f.eval(y))?;
            Ok(rel_err(
                &gcsg_via_average(&xs, &tab)?.value,
                &gcsg(&xs, &tab)?.value,
            ))
        })();
        w.record(r.unwrap_or(f64::INFINITY), 1e-12);
    }
    out.push(w.check(
        "property.average",
        "gcsg equals the average of the two simplex gradients",
        1e-12,
    ));

    // augmented set
    let mut w = Worst::new();
    for _ in 0..cases {
        let n = g.usize_in(1, 4);
        let m = g.usize_in(n, 6);
        let xs = g.sample_set(n, m, n);
        let f = g.smooth(n);
        let r = (|| -> Result<f64> {
            let y = augmented_set(&xs)?;
            let lhs = gsg(&y, &y.evaluate_forward(|p| f.eval(p))?)?.value;
            let rhs = gcsg(&xs, &xs.evaluate(|p| f.eval(p))?)?.value;
            Ok(rel_err(&lhs, &rhs))
        })();
        w.record(r.unwrap_or(f64::INFINITY), 1e-10);
    }
    out.push(w.check(
        "property.augmented",
        "gsg over the augmented set equals gcsg",
        1e-10,
    ));

    // calculus identities
    let mut w = Worst::new();
    for i in 0..cases {
        let xs = g.any_sample_set();
        let n = xs.dim();
        let r: Result<f64> = (|| {
            Ok(match i % 6 {
                0 => {
                    let (f, h) = (g.smooth(n), g.smooth(n));
                    let d = gcsg_product(
                        &xs,
                        &xs.evaluate(|y| f.eval(y))?,
                        &xs.evaluate(|y| h.eval(y))?,
                    )?;
                    let direct = gcsg(&xs, &xs.evaluate(|y| f.eval(y) * h.eval(y))?)?.value;
                    decomposition_residual(&d, &direct)
                }
                1 => {
                    let k = g.usize_in(2, 4);
                    let fs: Vec<SmoothFn> = (0..k).map(|_| g.smooth(n)).collect();
                    let tabs = fs
                        .iter()
                        .map(|f| xs.evaluate(|y| f.eval(y)))
                        .collect::<Result<Vec<_>>>()?;
                    let d = gcsg_product_k(&xs, &tabs)?;
                    let direct = gcsg(
                        &xs,
                        &xs.evaluate(|y| fs.iter().map(|f| f.eval(y)).product())?,
                    )?
                    .value;
                    decomposition_residual(&d, &direct)
                }
                2 => {
                    let f = g.smooth(n);
                    let k = g.usize_in(0, 5) as i32;
                    let d = gcsg_power(&xs, &xs.evaluate(|y| f.eval(y))?, k)?;
                    let direct = gcsg(&xs, &xs.evaluate(|y| f.eval(y).powi(k))?)?.value;
                    decomposition_residual(&d, &direct)
                }
                3 => {
                    let f = g.positive_smooth(n);
                    let k = -(g.usize_in(1, 5) as i32);
                    let d = gcsg_power(&xs, &xs.evaluate(|y| f.eval(y))?, k)?;
                    let direct = gcsg(&xs, &xs.evaluate(|y| f.eval(y).powi(k))?)?.value;
                    decomposition_residual(&d, &direct)
                }
                4 => {
                    let (f, h) = (g.smooth(n), g.positive_smooth(n));
                    let d = gcsg_quotient(
                        &xs,
                        &xs.evaluate(|y| f.eval(y))?,
                        &xs.evaluate(|y| h.eval(y))?,
                    )?;
                    let direct = gcsg(&xs, &xs.evaluate(|y| f.eval(y) / h.eval(y))?)?.value;
                    decomposition_residual(&d, &direct)
                }
                _ => {
                    let p = g.usize_in(1, 3);
                    let comps: Vec<SmoothFn> = (0..p).map(|_| g.smooth(n)).collect();
                    let outer = g.smooth(p);
                    let inner = |y: &Vector| {
                        Vector::from_vec(comps.iter().map(|c| c.eval(y)).collect()).expect("finite")
                    };
                    let ctx = ChainContext::evaluate(&xs, inner, |z| outer.eval(z))?;
                    let d = gcsg_chain(&ctx)?;
                    let direct = gcsg(&xs, ctx.composite_table())?.value;
                    decomposition_residual(&d, &direct)
                }
            })
        })();
        w.record(r.unwrap_or(f64::INFINITY), 1e-10);
    }
    out.push(w.check(
        "property.rules",
        "every calculus rule with its error term is exact",
        1e-10,
    ));

    // averaging law for error terms
    let mut w = Worst::new();
    for _ in 0..cases {
        let xs = g.any_sample_set();
        let n = xs.dim();
        let (f, h) = (g.smooth(n), g.smooth(n));
        let r: Result<f64> = (|| {
            let (tf, th) = (xs.evaluate(|y| f.eval(y))?, xs.evaluate(|y| h.eval(y))?);
            let fwd = gsg_error_term(GsgRule::Product { f: &tf, g: &th }, &xs)?;
            let bwd = gsg_error_term(
                GsgRule::Product {
                    f: &tf.reflected()?,
                    g: &th.reflected()?,
                },
                &xs.reflect(),
            )?;
            let averaged = (&fwd + &bwd).scale(0.5);
            // independent side: direct GCSG of the product minus the calculus formula
            let direct = gcsg(&xs, &xs.evaluate(|y| f.eval(y) * h.eval(y))?)?.value;
            let grad_f = gcsg(&xs, &tf)?.value;
            let grad_h = gcsg(&xs, &th)?.value;
            let residual = &(&direct - &grad_h.scale(tf.f_x0())) - &grad_f.scale(th.f_x0());
            Ok((&averaged - &residual).norm() / (1.0 + direct.norm() + averaged.norm()))
        })();
        w.record(r.unwrap_or(f64::INFINITY), 1e-10);
    }
    out.push(w.check(
        "property.averaging",
        "E^c equals the average of the one-sided error terms",
        1e-10,
    ));

    // exactness of the calculus estimates on quadratics
    let mut w = Worst::new();
    for i in 0..cases {
        let xs = g.full_rank_set();
        let n = xs.dim();
        let proj = projector_onto_span(&xs.direction_matrix());
        let r: Result<Option<f64>> = (|| {
            let tab = |q: &Quadratic| xs.evaluate(|y| q.eval(y));
            let x0 = xs.x0();
            let (est, truth): (GradientEstimate, Vector) = match i % 6 {
                0 => {
                    let (f, h) = (g.quadratic(n), g.quadratic(n));
                    let t = &h.gradient(x0).scale(f.eval(x0)) + &f.gradient(x0).scale(h.eval(x0));
                    (gcscg_product(&xs, &tab(&f)?, &tab(&h)?)?, t)
                }
                1 => {
                    let f = g.positive_quadratic(n);
                    let k = g.uniform(-2.5, 3.5);
                    let t = f.gradient(x0).scale(k * f.eval(x0).powf(k - 1.0));
                    (gcscg_power(&xs, &tab(&f)?, k)?, t)
                }
                2 => {
                    let (f, h) = (g.quadratic(n), g.positive_quadratic(n));
                    let (f0, h0) = (f.eval(x0), h.eval(x0));
                    let t = (&f.gradient(x0).scale(h0) - &h.gradient(x0).scale(f0))
                        .scale(1.0 / (h0 * h0));
                    (gcscg_quotient(&xs, &tab(&f)?, &tab(&h)?)?, t)
                }
                3 => {
                    let f = g.quadratic(n);
                    let a = g.uniform(0.2, 3.0);
                    let t = f.gradient(x0).scale(a.powf(f.eval(x0)) * a.ln());
                    (gcscg_exp(&xs, &tab(&f)?, a)?, t)
                }
                4 => {
                    let f = g.positive_quadratic(n);
                    let a = g.uniform(1.5, 10.0);
                    let t = f.gradient(x0).scale(1.0 / (f.eval(x0) * a.ln()));
                    (gcscg_log(&xs, &tab(&f)?, a)?, t)
                }
                _ => {
                    // S_g must have full row rank: p ≤ m
                    let p = g.usize_in(1, xs.len().min(3));
                    let comps: Vec<Quadratic> = (0..p).map(|_| g.quadratic(n)).collect();
                    let outer = g.quadratic(p);
                    let inner = |y: &Vector| {
                        Vector::from_vec(comps.iter().map(|c| c.eval(y)).collect()).expect("finite")
                    };
                    let ctx = ChainContext::evaluate(&xs, inner, |z| outer.eval(z))?;
                    let image = ctx.image_set()?;
                    if image.classify(0.0) == Classification::Undetermined
                        || !image.classify(0.0).is_full_row_rank()
                        || !condition_ok(&image.direction_matrix())
                    {
                        return Ok(None);
                    }
                    let jac_rows: Vec<Vec<f64>> =
                        comps.iter().map(|c| c.gradient(x0).to_vec()).collect();
                    let jac = Matrix::from_rows(&jac_rows)?;
                    let t = jac.transpose().mul_vec(&outer.gradient(&inner(x0)))?;
                    (gcscg_chain(&ctx)?, t)
                }
            };
            let truth_u = proj.apply(&truth)?;
            Ok(Some(rel_err(&est.value, &truth_u)))
        })();
        w.record_opt(r.unwrap_or(Some(f64::INFINITY)), 1e-10);
    }
    out.push(w.check(
        "property.quadratic_exactness",
        "calculus estimates are exact (in span S) for polynomials of order < 3",
        1e-10,
    ));

    out
}

/// Runs [`golden_checks`] and [`property_checks`].
pub fn all_checks(cases: usize, seed: u64) -> Vec<Check> {
    let mut checks = golden_checks();
    checks.extend(property_checks(cases, seed));
    checks
}
