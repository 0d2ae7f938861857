//! Ordered sample sets `⟨x⁰, x⁰+d¹, …, x⁰+dᵐ⟩`, their reflections, and the
//! function-value tables that feed the simplex difference vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, Matrix, Vector};

/// Rank-based classification of a sample set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// `m > n` and `rank S = n`.
    Overdetermined,
    /// `m = n` and `rank S = n`.
    Determined,
    /// `m < n` and `rank S = m`.
    Underdetermined,
    /// `S` is not of full rank.
    Undetermined,
}

impl Classification {
    /// True when `S` has full row rank, i.e. span S is the whole space.
    pub fn is_full_row_rank(self) -> bool {
        matches!(self, Self::Overdetermined | Self::Determined)
    }

    pub fn is_full_rank(self) -> bool {
        self != Self::Undetermined
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Overdetermined => "overdetermined",
            Self::Determined => "determined",
            Self::Underdetermined => "underdetermined",
            Self::Undetermined => "undetermined",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered set of a reference point `x⁰` and `m ≥ 1` directions `dⁱ`.
///
/// Every direction is nonzero, and the implied points `x⁰ + dⁱ` are pairwise
/// distinct from each other and from `x⁰`. Distinctness is checked bitwise.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    x0: Vector,
    directions: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
struct SampleSetFile {
    x0: Vec<f64>,
    directions: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn new(x0: Vector, directions: Vec<Vector>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::NoDirections);
        }
        let n = x0.dim();
        for d in &directions {
            if d.dim() != n {
                return Err(Error::DimensionMismatch {
                    context: "sample direction",
                    expected: n,
                    found: d.dim(),
                });
            }
        }
        if let Some(i) = directions.iter().position(Vector::is_zero) {
            return Err(Error::ZeroDirection(i + 1));
        }
        let points: Vec<Vector> = std::iter::once(x0.clone())
            .chain(directions.iter().map(|d| &x0 + d))
            .collect();
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::DuplicatePoints(i, j));
                }
            }
        }
        Ok(Self { x0, directions })
    }

    /// Builds `⟨x⁰, x¹, …, xᵐ⟩` from explicit points, with `dⁱ = xⁱ − x⁰`.
    pub fn from_points(points: &[Vector]) -> Result<Self> {
        let (x0, rest) = points.split_first().ok_or(Error::NoDirections)?;
        let directions = rest
            .iter()
            .map(|p| p.try_sub(x0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(x0.clone(), directions)
    }

    /// Convenience for one-dimensional sets given as scalars.
    pub fn from_scalar_points(points: &[f64]) -> Result<Self> {
        let pts = points
            .iter()
            .map(|&p| Vector::from_vec(vec![p]))
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(&pts)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SampleSetFile =
            serde_json::from_str(text).map_err(|e| Error::MalformedSampleSet(e.to_string()))?;
        let x0 =
            Vector::from_vec(file.x0).map_err(|e| Error::MalformedSampleSet(format!("x0: {e}")))?;
        let directions = file
            .directions
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                Vector::from_vec(d)
                    .map_err(|e| Error::MalformedSampleSet(format!("direction {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(x0, directions).map_err(|e| Error::MalformedSampleSet(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let file = SampleSetFile {
            x0: self.x0.to_vec(),
            directions: self.directions.iter().map(Vector::to_vec).collect(),
        };
        serde_json::to_string(&file).expect("plain numeric data serializes")
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.x0.dim()
    }

    /// Number of directions `m`.
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The points `x⁰ + dⁱ`, `i = 1..m`.
    pub fn forward_points(&self) -> Vec<Vector> {
        self.directions.iter().map(|d| &self.x0 + d).collect()
    }

    /// The points `x⁰ − dⁱ`, `i = 1..m`.
    pub fn reflected_points(&self) -> Vec<Vector> {
        self.directions.iter().map(|d| &self.x0 - d).collect()
    }

    /// `S = [d¹ ⋯ dᵐ]`, an `n × m` matrix.
    pub fn direction_matrix(&self) -> Matrix {
        Matrix::from_columns(&self.directions).expect("directions share a dimension")
    }

    /// `Δ = maxᵢ ‖dⁱ‖`.
    pub fn radius(&self) -> f64 {
        self.directions.iter().map(Vector::norm).fold(0.0, f64::max)
    }

    /// `X⁻ = ⟨x⁰, x⁰−d¹, …, x⁰−dᵐ⟩`.
    pub fn reflect(&self) -> SampleSet {
        SampleSet {
            x0: self.x0.clone(),
            directions: self.directions.iter().map(|d| -d).collect(),
        }
    }

    /// `Ŝ = S / Δ`.
    pub fn scaled_matrix(&self) -> Matrix {
        self.direction_matrix().scale(1.0 / self.radius())
    }

    /// Same reference point, every direction multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<SampleSet> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "scale factor {t} must be positive"
            )));
        }
        Self::new(
            self.x0.clone(),
            self.directions.iter().map(|d| d.scale(t)).collect(),
        )
    }

    /// Same directions about a different reference point.
    pub fn recentered(&self, x0: Vector) -> Result<SampleSet> {
        Self::new(x0, self.directions.clone())
    }

    pub fn rank(&self, rank_tol: f64) -> usize {
        matcore::rank(&self.direction_matrix(), rank_tol).expect("validated finite matrix")
    }

    pub fn classify(&self, rank_tol: f64) -> Classification {
        let (n, m) = (self.dim(), self.len());
        let r = self.rank(rank_tol);
        if m > n && r == n {
            Classification::Overdetermined
        } else if m == n && r == n {
            Classification::Determined
        } else if m < n && r == m {
            Classification::Underdetermined
        } else {
            Classification::Undetermined
        }
    }

    /// Evaluates `f` at `x⁰` and at `x⁰ + dⁱ` only.
    pub fn evaluate_forward(&self, f: impl Fn(&Vector) -> f64) -> Result<EvaluationTable> {
        let f_plus = self.forward_points().iter().map(&f).collect();
        EvaluationTable::new(f(&self.x0), f_plus, None)
    }

    /// Evaluates `f` at `x⁰` and at `x⁰ ± dⁱ`.
    pub fn evaluate(&self, f: impl Fn(&Vector) -> f64) -> Result<EvaluationTable> {
        let f_plus = self.forward_points().iter().map(&f).collect();
        let f_minus = self.reflected_points().iter().map(&f).collect();
        EvaluationTable::new(f(&self.x0), f_plus, Some(f_minus))
    }
}

/// Function values over a sample set: `f(x⁰)`, `f(x⁰+dⁱ)`, and optionally `f(x⁰−dⁱ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationTable {
    f_x0: f64,
    f_plus: Vec<f64>,
    f_minus: Option<Vec<f64>>,
}

impl EvaluationTable {
    pub fn new(f_x0: f64, f_plus: Vec<f64>, f_minus: Option<Vec<f64>>) -> Result<Self> {
        if f_plus.is_empty() {
            return Err(Error::NoDirections);
        }
        if let Some(minus) = &f_minus {
            if minus.len() != f_plus.len() {
                return Err(Error::DimensionMismatch {
                    context: "reflected values",
                    expected: f_plus.len(),
                    found: minus.len(),
                });
            }
        }
        let all = std::iter::once(&f_x0)
            .chain(&f_plus)
            .chain(f_minus.iter().flatten());
        if let Some(i) = all.into_iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            f_x0,
            f_plus,
            f_minus,
        })
    }

    pub fn f_x0(&self) -> f64 {
        self.f_x0
    }

    pub fn f_plus(&self) -> &[f64] {
        &self.f_plus
    }

    pub fn f_minus(&self) -> Option<&[f64]> {
        self.f_minus.as_deref()
    }

    pub fn len(&self) -> usize {
        self.f_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_plus.is_empty()
    }

    pub fn is_centred(&self) -> bool {
        self.f_minus.is_some()
    }

    pub(crate) fn require_minus(&self) -> Result<&[f64]> {
        self.f_minus.as_deref().ok_or(Error::MissingReflected)
    }

    /// `δˢ`, with component `i` equal to `f(x⁰+dⁱ) − f(x⁰)`.
    pub fn delta_s(&self) -> Vector {
        Vector::from_na(nalgebra::DVector::from_iterator(
            self.len(),
            self.f_plus.iter().map(|v| v - self.f_x0),
        ))
    }

    /// `δᶜ`, with component `i` equal to `½(f(x⁰+dⁱ) − f(x⁰−dⁱ))`.
    pub fn delta_c(&self) -> Result<Vector> {
        let minus = self.require_minus()?;
        Ok(Vector::from_na(nalgebra::DVector::from_iterator(
            self.len(),
            self.f_plus.iter().zip(minus).map(|(p, q)| 0.5 * (p - q)),
        )))
    }

    /// The same data seen from the reflected set `X⁻`.
    pub fn reflected(&self) -> Result<EvaluationTable> {
        let minus = self.require_minus()?;
        Ok(Self {
            f_x0: self.f_x0,
            f_plus: minus.to_vec(),
            f_minus: Some(self.f_plus.clone()),
        })
    }

    /// One-sided table over `⟨x⁰, x⁰+d¹, …, x⁰+dᵐ, x⁰−d¹, …, x⁰−dᵐ⟩`.
    pub fn augmented(&self) -> Result<EvaluationTable> {
        let minus = self.require_minus()?;
        let mut f_plus = self.f_plus.clone();
        f_plus.extend_from_slice(minus);
        Ok(Self {
            f_x0: self.f_x0,
            f_plus,
            f_minus: None,
        })
    }

    /// Pointwise combination of two tables over the same set.
    pub fn zip_with(
        &self,
        other: &EvaluationTable,
        op: impl Fn(f64, f64) -> f64,
    ) -> Result<EvaluationTable> {
        Self::combine(&[self, other], |v| op(v[0], v[1]))
    }

    /// Pointwise combination of several tables over the same set. The result
    /// carries reflected values only when every input does.
    pub fn combine(
        tables: &[&EvaluationTable],
        op: impl Fn(&[f64]) -> f64,
    ) -> Result<EvaluationTable> {
        let first = tables.first().ok_or(Error::TooFewFactors(0))?;
        let m = first.len();
        if let Some(bad) = tables.iter().find(|t| t.len() != m) {
            return Err(Error::DimensionMismatch {
                context: "combined tables",
                expected: m,
                found: bad.len(),
            });
        }
        let at = |pick: &dyn Fn(&EvaluationTable) -> f64| {
            let vals: Vec<f64> = tables.iter().map(|t| pick(t)).collect();
            op(&vals)
        };
        let f_x0 = at(&|t| t.f_x0);
        let f_plus = (0..m).map(|i| at(&|t| t.f_plus[i])).collect();
        let f_minus = if tables.iter().all(|t| t.is_centred()) {
            Some(
                (0..m)
                    .map(|i| at(&|t| t.f_minus.as_ref().expect("checked")[i]))
                    .collect(),
            )
        } else {
            None
        };
        EvaluationTable::new(f_x0, f_plus, f_minus)
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<EvaluationTable> {
        Self::combine(&[self], |v| op(v[0]))
    }

    pub(crate) fn check_matches(&self, xs: &SampleSet) -> Result<()> {
        if self.len() != xs.len() {
            return Err(Error::DimensionMismatch {
                context: "evaluation table length",
                expected: xs.len(),
                found: self.len(),
            });
        }
        Ok(())
    }
}
