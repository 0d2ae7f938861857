//! Analytic test functions and a central finite-difference gradient.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matcore::{Matrix, Vector};

pub type ScalarFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;
/// `(center, radius) ↦ constant` valid on the closed ball `B(center, radius)`.
pub type BallConstantFn = Arc<dyn Fn(&Vector, f64) -> f64 + Send + Sync>;

/// Radius of the ball on which registry constants are evaluated by default.
pub const DEFAULT_BALL_RADIUS: f64 = 0.5;

#[derive(Clone)]
pub struct TestFunction {
    name: String,
    dim: usize,
    eval: ScalarFn,
    gradient: GradientFn,
    hessian: Option<HessianFn>,
    hessian_lipschitz: Option<BallConstantFn>,
    default_point: Vector,
    ball_radius: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("default_point", &self.default_point)
            .field("ball_radius", &self.ball_radius)
            .finish_non_exhaustive()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        default_point: Vector,
        eval: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim: default_point.dim(),
            eval: Arc::new(eval),
            gradient: Arc::new(gradient),
            hessian: None,
            hessian_lipschitz: None,
            default_point,
            ball_radius: DEFAULT_BALL_RADIUS,
        }
    }

    pub fn with_hessian(mut self, h: impl Fn(&Vector) -> Matrix + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn with_hessian_lipschitz(
        mut self,
        l: impl Fn(&Vector, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.hessian_lipschitz = Some(Arc::new(l));
        self
    }

    pub fn with_ball_radius(mut self, r: f64) -> Self {
        self.ball_radius = r;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, y: &Vector) -> f64 {
        (self.eval)(y)
    }

    pub fn gradient(&self, y: &Vector) -> Vector {
        (self.gradient)(y)
    }

    pub fn hessian(&self, y: &Vector) -> Option<Matrix> {
        self.hessian.as_ref().map(|h| h(y))
    }

    /// Lipschitz constant of `∇²f` on `B(center, radius)`, when known analytically.
    pub fn hessian_lipschitz(&self, center: &Vector, radius: f64) -> Option<f64> {
        self.hessian_lipschitz.as_ref().map(|l| l(center, radius))
    }

    pub fn default_point(&self) -> &Vector {
        &self.default_point
    }

    /// Largest sample-set radius for which the stated constants are used.
    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    /// The evaluator as a plain closure.
    pub fn evaluator(&self) -> impl Fn(&Vector) -> f64 + '_ {
        move |y| self.eval(y)
    }
}

/// A vector map `g: ℝⁿ → ℝᵖ` given by its components.
#[derive(Clone)]
pub struct VectorTestFunction {
    name: String,
    components: Vec<TestFunction>,
    /// `L_{g_i}` on a ball: Lipschitz constant of `g_i` itself.
    component_lipschitz: Vec<BallConstantFn>,
}

impl fmt::Debug for VectorTestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorTestFunction")
            .field("name", &self.name)
            .field("components", &self.components)
            .finish_non_exhaustive()
    }
}

impl VectorTestFunction {
    pub fn new(
        name: impl Into<String>,
        components: Vec<TestFunction>,
        component_lipschitz: Vec<BallConstantFn>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument(
                "vector map needs p >= 1 components".into(),
            ));
        }
        if components.len() != component_lipschitz.len() {
            return Err(Error::DimensionMismatch {
                context: "component Lipschitz providers",
                expected: components.len(),
                found: component_lipschitz.len(),
            });
        }
        let n = components[0].dim();
        if let Some(c) = components.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch {
                context: "vector map component domain",
                expected: n,
                found: c.dim(),
            });
        }
        Ok(Self {
            name: name.into(),
            components,
            component_lipschitz,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[TestFunction] {
        &self.components
    }

    pub fn eval(&self, y: &Vector) -> Vector {
        Vector::from_na(nalgebra::DVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|c| c.eval(y)),
        ))
    }

    /// Analytic Jacobian, `p × n`.
    pub fn jacobian(&self, y: &Vector) -> Matrix {
        let rows: Vec<Vec<f64>> = self
            .components
            .iter()
            .map(|c| c.gradient(y).to_vec())
            .collect();
        Matrix::from_rows(&rows).expect("components share a domain")
    }

    /// `L_{g*} = maxᵢ L_{g_i}` on `B(center, radius)`.
    pub fn lipschitz_star(&self, center: &Vector, radius: f64) -> f64 {
        self.component_lipschitz
            .iter()
            .map(|l| l(center, radius))
            .fold(0.0, f64::max)
    }

    /// `L_{∇²g*} = maxᵢ L_{∇²g_i}` on `B(center, radius)`, if every component has one.
    pub fn hessian_lipschitz_star(&self, center: &Vector, radius: f64) -> Option<f64> {
        self.components
            .iter()
            .map(|c| c.hessian_lipschitz(center, radius))
            .try_fold(0.0, |acc: f64, l| l.map(|l| acc.max(l)))
    }
}

fn v(x: &[f64]) -> Vector {
    Vector::from_slice(x).expect("finite literal")
}

fn m(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(rows).expect("finite literal")
}

fn zero_lipschitz(_: &Vector, _: f64) -> f64 {
    0.0
}

fn linear(name: &str, c: Vector, at: Vector) -> TestFunction {
    let n = c.dim();
    let c_eval = c.clone();
    TestFunction::new(name, at, move |y| c_eval.dot(y), move |_| c.clone())
        .with_hessian(move |_| Matrix::zeros(n, n))
        .with_hessian_lipschitz(zero_lipschitz)
}

/// `f(y) = yᵀAy + bᵀy` with symmetric `A`.
fn quadratic(name: &str, a: Matrix, b: Vector, at: Vector) -> TestFunction {
    let (a1, b1) = (a.clone(), b.clone());
    let (a2, b2) = (a.clone(), b);
    TestFunction::new(
        name,
        at,
        move |y| y.dot(&(&a1 * y)) + b1.dot(y),
        move |y| &(&a2 * y).scale(2.0) + &b2,
    )
    .with_hessian(move |_| a.scale(2.0))
    .with_hessian_lipschitz(zero_lipschitz)
}

fn quartic1d() -> TestFunction {
    TestFunction::new(
        "quartic1d",
        v(&[-1.0]),
        |y| y.get(0).powi(4),
        |y| v(&[4.0 * y.get(0).powi(3)]),
    )
    .with_hessian(|y| m(&[&[12.0 * y.get(0).powi(2)]]))
    // f‴ = 24y
    .with_hessian_lipschitz(|c, r| 24.0 * (c.get(0).abs() + r))
}

fn sin_family() -> TestFunction {
    let a = v(&[1.0, 0.5, -0.7]);
    let (a1, a2, a3) = (a.clone(), a.clone(), a.clone());
    let a_norm = a.norm();
    TestFunction::new(
        "sin3",
        v(&[0.2, -0.1, 0.4]),
        move |y| a1.dot(y).sin(),
        move |y| a2.scale(a2.dot(y).cos()),
    )
    .with_hessian(move |y| outer(&a3, &a3).scale(-a3.dot(y).sin()))
    // ‖∇³f‖ = |cos(aᵀy)|‖a‖³
    .with_hessian_lipschitz(move |_, _| a_norm.powi(3))
}

fn exp_family() -> TestFunction {
    let a = v(&[0.6, -0.8]);
    let (a1, a2, a3, a4) = (a.clone(), a.clone(), a.clone(), a.clone());
    TestFunction::new(
        "exp2",
        v(&[0.5, 0.25]),
        move |y| a1.dot(y).exp(),
        move |y| a2.scale(a2.dot(y).exp()),
    )
    .with_hessian(move |y| outer(&a3, &a3).scale(a3.dot(y).exp()))
    // ‖∇³f‖ = e^{aᵀy}‖a‖³, maximal on the ball at y = c + r a/‖a‖
    .with_hessian_lipschitz(move |c, r| {
        let n = a4.norm();
        n.powi(3) * (a4.dot(c) + n * r).exp()
    })
}

/// `f(y) = y₁³ + y₁y₂² − 2y₂³`; constant third-derivative tensor.
fn cubic2() -> TestFunction {
    // nonzero third partials: f₁₁₁ = 6, f₁₂₂ (×3) = 2, f₂₂₂ = −12
    let frobenius = (36.0f64 + 3.0 * 4.0 + 144.0).sqrt();
    TestFunction::new(
        "cubic2",
        v(&[0.3, -0.4]),
        |y| {
            let (a, b) = (y.get(0), y.get(1));
            a.powi(3) + a * b * b - 2.0 * b.powi(3)
        },
        |y| {
            let (a, b) = (y.get(0), y.get(1));
            v(&[3.0 * a * a + b * b, 2.0 * a * b - 6.0 * b * b])
        },
    )
    .with_hessian(|y| {
        let (a, b) = (y.get(0), y.get(1));
        m(&[&[6.0 * a, 2.0 * b], &[2.0 * b, 2.0 * a - 12.0 * b]])
    })
    .with_hessian_lipschitz(move |_, _| frobenius)
}

fn rosenbrock2() -> TestFunction {
    TestFunction::new(
        "rosenbrock2",
        v(&[-0.5, 0.8]),
        |y| {
            let (a, b) = (y.get(0), y.get(1));
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        },
        |y| {
            let (a, b) = (y.get(0), y.get(1));
            v(&[
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ])
        },
    )
    .with_hessian(|y| {
        let (a, b) = (y.get(0), y.get(1));
        m(&[
            &[1200.0 * a * a - 400.0 * b + 2.0, -400.0 * a],
            &[-400.0 * a, 200.0],
        ])
    })
    // f₁₁₁ = 2400y₁, f₁₁₂ (×3) = −400; Frobenius norm of the tensor
    .with_hessian_lipschitz(|c, r| {
        let y1 = c.get(0).abs() + r;
        ((2400.0 * y1).powi(2) + 3.0 * 400.0f64.powi(2)).sqrt()
    })
}

fn outer(a: &Vector, b: &Vector) -> Matrix {
    Matrix::from_na(a.as_na() * b.as_na().transpose())
}

fn square1d() -> TestFunction {
    TestFunction::new(
        "square1d",
        v(&[5.0]),
        |y| y.get(0).powi(2),
        |y| v(&[2.0 * y.get(0)]),
    )
    .with_hessian(|_| m(&[&[2.0]]))
    .with_hessian_lipschitz(zero_lipschitz)
}

fn square_plus_one() -> TestFunction {
    TestFunction::new(
        "squareplusone1d",
        v(&[2.0]),
        |y| y.get(0).powi(2) + 1.0,
        |y| v(&[2.0 * y.get(0)]),
    )
    .with_hessian(|_| m(&[&[2.0]]))
    .with_hessian_lipschitz(zero_lipschitz)
}

fn sqnorm3() -> TestFunction {
    TestFunction::new(
        "sqnorm3",
        v(&[0.0, 3.0, 4.0]),
        |y| y.dot(y),
        |y| y.scale(2.0),
    )
    .with_hessian(|_| Matrix::identity(3).scale(2.0))
    .with_hessian_lipschitz(zero_lipschitz)
}

/// Every registered scalar test function.
pub fn registry() -> Vec<TestFunction> {
    vec![
        quartic1d(),
        linear("linear3", v(&[1.0, -2.0, 0.5]), v(&[0.3, -0.2, 0.1])),
        quadratic(
            "quadratic2",
            m(&[&[2.0, 0.5], &[0.5, 1.0]]),
            v(&[1.0, -1.0]),
            v(&[0.4, -0.3]),
        ),
        quadratic(
            "sqnorm2",
            Matrix::identity(2),
            Vector::zeros(2),
            v(&[1.0, 1.0]),
        ),
        shifted(
            quadratic(
                "ellipse2",
                m(&[&[1.0, 0.0], &[0.0, 2.0]]),
                Vector::zeros(2),
                v(&[2.0, 2.0]),
            ),
            -3.0,
        ),
        sin_family(),
        exp_family(),
        cubic2(),
        rosenbrock2(),
        square1d(),
        square_plus_one(),
        sqnorm3(),
    ]
}

fn shifted(f: TestFunction, c: f64) -> TestFunction {
    let eval = f.eval.clone();
    TestFunction {
        eval: Arc::new(move |y| eval(y) + c),
        ..f
    }
}

/// Looks up a scalar test function by its stable name.
pub fn lookup(name: &str) -> Result<TestFunction> {
    registry()
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::UnknownFunction(name.to_string()))
}

/// Every registered vector map.
pub fn vector_registry() -> Vec<VectorTestFunction> {
    // g(y) = (y₂ − 2y₁, y₁ + y₂, y₁y₂ + y₂)
    let g1 = linear("mixmap.g1", v(&[-2.0, 1.0]), v(&[1.0, 2.0]));
    let g2 = linear("mixmap.g2", v(&[1.0, 1.0]), v(&[1.0, 2.0]));
    let g3 = TestFunction::new(
        "mixmap.g3",
        v(&[1.0, 2.0]),
        |y| y.get(0) * y.get(1) + y.get(1),
        |y| v(&[y.get(1), y.get(0) + 1.0]),
    )
    .with_hessian(|_| m(&[&[0.0, 1.0], &[1.0, 0.0]]))
    .with_hessian_lipschitz(zero_lipschitz);
    let mixmap = VectorTestFunction::new(
        "mixmap",
        vec![g1, g2, g3],
        vec![
            Arc::new(|_, _| 5.0f64.sqrt()),
            Arc::new(|_, _| 2.0f64.sqrt()),
            // ∇g₃ = (y₂, y₁ + 1) and ‖∇²g₃‖ = 1
            Arc::new(|c: &Vector, r| v(&[c.get(1), c.get(0) + 1.0]).norm() + r),
        ],
    )
    .expect("valid literal map");

    let inner = VectorTestFunction::new(
        "squareplusone1d",
        vec![square_plus_one()],
        vec![Arc::new(|c: &Vector, r| 2.0 * (c.get(0).abs() + r))],
    )
    .expect("valid literal map");

    vec![mixmap, inner]
}

pub fn lookup_vector(name: &str) -> Result<VectorTestFunction> {
    vector_registry()
        .into_iter()
        .find(|g| g.name() == name)
        .ok_or_else(|| Error::UnknownFunction(name.to_string()))
}

/// Central-difference gradient with step `h` per coordinate.
pub fn finite_difference_gradient(
    f: impl Fn(&Vector) -> f64,
    x: &Vector,
    h: f64,
) -> Result<Vector> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let n = x.dim();
    let g = (0..n).map(|i| {
        let e = Vector::basis(n, i).scale(h);
        (f(&(x + &e)) - f(&(x - &e))) / (2.0 * h)
    });
    Ok(Vector::from_na(nalgebra::DVector::from_iterator(n, g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lookup_examples() {
        assert_eq!(lookup("quartic1d").unwrap().eval(&v(&[-1.0])), 1.0);
        assert_eq!(lookup("ellipse2").unwrap().eval(&v(&[2.0, 2.0])), 9.0);
        assert_eq!(lookup("sqnorm2").unwrap().eval(&v(&[1.0, 1.0])), 2.0);
        assert!(matches!(lookup("nope"), Err(Error::UnknownFunction(_))));
    }

    #[test]
    fn names_are_unique() {
        let mut names: Vec<String> = registry().iter().map(|f| f.name().to_string()).collect();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn finite_difference_examples() {
        let c = v(&[1.0, -2.0, 0.5]);
        let g = finite_difference_gradient(|y| c.dot(y), &v(&[0.3, 0.1, 7.0]), 0.25).unwrap();
        assert!((&g - &c).norm() < 1e-14);
        let g = finite_difference_gradient(|y| y.get(0).powi(4), &v(&[-1.0]), 1e-5).unwrap();
        assert!((g.get(0) + 4.0).abs() < 1e-8);
        let g = finite_difference_gradient(|_| 3.0, &v(&[1.0, 2.0]), 1e-3).unwrap();
        assert!(g.is_zero());
        assert!(finite_difference_gradient(|_| 0.0, &v(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in registry() {
            for _ in 0..100 {
                let x = Vector::from_vec(
                    f.default_point()
                        .iter()
                        .map(|c| c + rng.random_range(-0.5..0.5))
                        .collect(),
                )
                .unwrap();
                let fd = finite_difference_gradient(f.evaluator(), &x, 1e-6).unwrap();
                let an = f.gradient(&x);
                assert!(
                    (&fd - &an).norm() <= 1e-5 * (1.0 + an.norm()),
                    "{} at {x}: fd {fd} vs {an}",
                    f.name()
                );
            }
        }
    }

    #[test]
    fn hessians_match_finite_differences_of_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in registry() {
            let x = Vector::from_vec(
                f.default_point()
                    .iter()
                    .map(|c| c + rng.random_range(-0.3..0.3))
                    .collect(),
            )
            .unwrap();
            let h = f.hessian(&x).expect("registry entries carry Hessians");
            for i in 0..f.dim() {
                let col = finite_difference_gradient(|y| f.gradient(y).get(i), &x, 1e-6).unwrap();
                for j in 0..f.dim() {
                    assert!(
                        (col.get(j) - h.get(i, j)).abs() <= 1e-4 * (1.0 + h.get(i, j).abs()),
                        "{} Hessian ({i},{j})",
                        f.name()
                    );
                }
            }
        }
    }

    #[test]
    fn polynomial_entries_of_degree_two_have_zero_hessian_lipschitz() {
        for name in [
            "linear3",
            "quadratic2",
            "sqnorm2",
            "ellipse2",
            "square1d",
            "sqnorm3",
        ] {
            let f = lookup(name).unwrap();
            assert_eq!(f.hessian_lipschitz(f.default_point(), 1.0), Some(0.0));
        }
    }

    #[test]
    fn hessian_lipschitz_dominates_sampled_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in registry() {
            let c = f.default_point().clone();
            let r = f.ball_radius();
            let l = f.hessian_lipschitz(&c, r).unwrap();
            let sample = |rng: &mut ChaCha8Rng| loop {
                let p = Vector::from_vec((0..f.dim()).map(|_| rng.random_range(-r..r)).collect())
                    .unwrap();
                if p.norm() <= r {
                    return &c + &p;
                }
            };
            for _ in 0..50 {
                let (a, b) = (sample(&mut rng), sample(&mut rng));
                let dh = &f.hessian(&a).unwrap() - &f.hessian(&b).unwrap();
                let ratio = crate::matcore::spectral_norm(&dh) / (&a - &b).norm();
                assert!(ratio <= l * (1.0 + 1e-12), "{}: {ratio} > {l}", f.name());
            }
        }
    }

    #[test]
    fn mixmap_values_and_constants() {
        let g = lookup_vector("mixmap").unwrap();
        assert_eq!(g.domain_dim(), 2);
        assert_eq!(g.codomain_dim(), 3);
        assert_eq!(g.eval(&v(&[1.0, 2.0])).to_vec(), vec![0.0, 3.0, 4.0]);
        assert_eq!(g.hessian_lipschitz_star(&v(&[1.0, 2.0]), 1.0), Some(0.0));
        assert!(g.lipschitz_star(&v(&[1.0, 2.0]), 1.0) >= 5.0f64.sqrt());
        let j = g.jacobian(&v(&[1.0, 2.0]));
        assert_eq!(j.to_row_major(), vec![-2.0, 1.0, 1.0, 1.0, 2.0, 2.0]);
    }
}
