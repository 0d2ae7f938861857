//! Generalized simplex gradients (GSG), generalized centred simplex gradients
//! (GCSG), the centred simplex Jacobian, and projection onto span S.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, Matrix, Vector};
use crate::sampleset::{Classification, EvaluationTable, SampleSet};

/// Calculus rule behind a calculus-based gradient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Product,
    ProductK,
    Power,
    Quotient,
    Exp,
    Log,
    Chain,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::Product,
        Rule::ProductK,
        Rule::Power,
        Rule::Quotient,
        Rule::Exp,
        Rule::Log,
        Rule::Chain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Product => "product",
            Rule::ProductK => "product_k",
            Rule::Power => "power",
            Rule::Quotient => "quotient",
            Rule::Exp => "exp",
            Rule::Log => "log",
            Rule::Chain => "chain",
        }
    }
}

/// How a gradient estimate was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Gsg,
    Gcsg,
    Gcscg(Rule),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Gsg => f.write_str("gsg"),
            Method::Gcsg => f.write_str("gcsg"),
            Method::Gcscg(rule) => write!(f, "gcscg:{}", rule.as_str()),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gsg" => Ok(Method::Gsg),
            "gcsg" => Ok(Method::Gcsg),
            _ => {
                let rule = s
                    .strip_prefix("gcscg:")
                    .and_then(|r| Rule::ALL.into_iter().find(|x| x.as_str() == r))
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))?;
                Ok(Method::Gcscg(rule))
            }
        }
    }
}

/// An approximate gradient with the metadata of the sample set behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientEstimate {
    pub value: Vector,
    pub method: Method,
    /// Number of directions `m`.
    pub m: usize,
    /// Radius `Δ` of the sample set.
    pub delta: f64,
    /// Function evaluations the method consumes.
    pub eval_count: usize,
}

impl GradientEstimate {
    pub(crate) fn new(value: Vector, method: Method, xs: &SampleSet, eval_count: usize) -> Self {
        Self {
            value,
            method,
            m: xs.len(),
            delta: xs.radius(),
            eval_count,
        }
    }
}

/// `(Sᵀ)†v`: the minimum-norm solution of `Sᵀg = v`.
pub(crate) fn apply_pinv_st(xs: &SampleSet, v: &Vector) -> Result<Vector> {
    matcore::solve_least_squares(&xs.direction_matrix().transpose(), v)
}

/// `∇ˢf(X) = (Sᵀ)†δˢ`.
pub fn gsg(xs: &SampleSet, tab: &EvaluationTable) -> Result<GradientEstimate> {
    tab.check_matches(xs)?;
    let value = apply_pinv_st(xs, &tab.delta_s())?;
    Ok(GradientEstimate::new(value, Method::Gsg, xs, xs.len() + 1))
}

/// `∇ᶜf(X) = (Sᵀ)†δᶜ`.
///
/// `f(x⁰)` does not enter `δᶜ`, so the reported evaluation count is `2m`.
pub fn gcsg(xs: &SampleSet, tab: &EvaluationTable) -> Result<GradientEstimate> {
    tab.check_matches(xs)?;
    let value = apply_pinv_st(xs, &tab.delta_c()?)?;
    Ok(GradientEstimate::new(value, Method::Gcsg, xs, 2 * xs.len()))
}

/// `∇ᶜf(X)` computed as `½(∇ˢf(X) + ∇ˢf(X⁻))`.
pub fn gcsg_via_average(xs: &SampleSet, tab: &EvaluationTable) -> Result<GradientEstimate> {
    tab.check_matches(xs)?;
    let forward = gsg(xs, tab)?;
    let backward = gsg(&xs.reflect(), &tab.reflected()?)?;
    let value = (&forward.value + &backward.value).scale(0.5);
    Ok(GradientEstimate::new(
        value,
        Method::Gcsg,
        xs,
        2 * xs.len() + 1,
    ))
}

/// `p × n` matrix whose row `i` is `∇ᶜgᵢ(X)ᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CentredJacobian {
    pub matrix: Matrix,
}

impl CentredJacobian {
    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// The `m × p` array whose column `j` is `δᶜ` of component `j`.
pub(crate) fn centred_difference_matrix(
    xs: &SampleSet,
    tabs: &[EvaluationTable],
) -> Result<Matrix> {
    if tabs.is_empty() {
        return Err(Error::InvalidArgument(
            "Jacobian needs at least one component".into(),
        ));
    }
    let cols = tabs
        .iter()
        .map(|t| {
            t.check_matches(xs)?;
            t.delta_c()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_columns(&cols)
}

/// Generalized centred simplex Jacobian `J^c_g(X)` from per-component tables.
pub fn centred_jacobian(xs: &SampleSet, tabs: &[EvaluationTable]) -> Result<CentredJacobian> {
    let deltas = centred_difference_matrix(xs, tabs)?;
    let pinv = matcore::pseudoinverse(&xs.direction_matrix().transpose(), 0.0)?;
    // (Sᵀ)† [δᶜ_{g₁} ⋯ δᶜ_{g_p}] = J^cᵀ
    let jt = pinv.matmul(&deltas)?;
    Ok(CentredJacobian {
        matrix: jt.transpose(),
    })
}

/// Orthogonal projector onto a column space.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub matrix: Matrix,
}

impl Projector {
    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        self.matrix.mul_vec(v)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Projection onto the orthogonal complement, `(I − P)v`.
    pub fn complement(&self, v: &Vector) -> Result<Vector> {
        Ok(v - &self.apply(v)?)
    }
}

/// Projector onto `span S`, computed as `(Sᵀ)†Sᵀ`. For full-column-rank `S`
/// this is `S(SᵀS)⁻¹Sᵀ`.
pub fn projector_onto_span(s: &Matrix) -> Projector {
    let st = s.transpose();
    let pinv = matcore::pseudoinverse(&st, 0.0).expect("finite nonempty matrix");
    let p = &pinv * &st;
    // symmetrize away round-off
    let p = (&p + &p.transpose()).scale(0.5);
    Projector { matrix: p }
}

/// `∇f_U = Proj_U ∇f`.
pub fn u_gradient(p: &Projector, grad: &Vector) -> Result<Vector> {
    if grad.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "U-gradient",
            expected: p.dim(),
            found: grad.dim(),
        });
    }
    p.apply(grad)
}

/// `Y = ⟨x⁰, x⁰+d¹, …, x⁰+dᵐ, x⁰−d¹, …, x⁰−dᵐ⟩`.
pub fn augmented_set(xs: &SampleSet) -> Result<SampleSet> {
    let mut dirs = xs.directions().to_vec();
    dirs.extend(xs.reflect().directions().iter().cloned());
    SampleSet::new(xs.x0().clone(), dirs)
}

/// Which space an estimate should be compared in.
pub fn comparison_projector(xs: &SampleSet) -> Option<Projector> {
    match xs.classify(0.0) {
        Classification::Underdetermined => Some(projector_onto_span(&xs.direction_matrix())),
        _ => None,
    }
}
