//! Error bounds for centred simplex gradients and the calculus-based estimates.
//!
//! Every bound has the shape `C·‖(Ŝᵀ)†‖·Δ²`, with `Ŝ = S/Δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::ChainContext;
use crate::error::{Error, Result};
use crate::matcore::{self, Matrix, Vector};
use crate::sampleset::{Classification, SampleSet};

/// Constants for one component `g_i` of a vector map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComponentLipschitz {
    /// `L_{g_i}`: Lipschitz constant of `g_i`.
    pub lipschitz: f64,
    /// `L_{∇²g_i}`: Lipschitz constant of `∇²g_i`.
    pub hessian_lipschitz: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzData {
    /// Lipschitz constant `L` of `∇²f` on the ball containing the sample set.
    pub hessian_lipschitz: f64,
    pub gradient_at_ref: Option<Vector>,
    pub component_lipschitz: Option<Vec<ComponentLipschitz>>,
}

fn check_constant(name: &str, c: f64) -> Result<f64> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be a nonnegative finite constant, got {c}"
        )));
    }
    Ok(c)
}

impl LipschitzData {
    pub fn new(hessian_lipschitz: f64) -> Result<Self> {
        check_constant("L", hessian_lipschitz)?;
        Ok(Self {
            hessian_lipschitz,
            gradient_at_ref: None,
            component_lipschitz: None,
        })
    }

    pub fn with_gradient(mut self, g: Vector) -> Self {
        self.gradient_at_ref = Some(g);
        self
    }

    pub fn with_components(mut self, c: Vec<ComponentLipschitz>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidArgument("no component constants".into()));
        }
        for ci in &c {
            check_constant("L_g", ci.lipschitz)?;
            check_constant("L_hess_g", ci.hessian_lipschitz)?;
        }
        self.component_lipschitz = Some(c);
        Ok(self)
    }

    /// `L_{g*} = maxᵢ L_{g_i}`.
    pub fn lipschitz_star(&self) -> Option<f64> {
        self.component_lipschitz
            .as_ref()
            .map(|c| c.iter().map(|ci| ci.lipschitz).fold(0.0, f64::max))
    }

    /// `L_{∇²g*} = maxᵢ L_{∇²g_i}`.
    pub fn hessian_lipschitz_star(&self) -> Option<f64> {
        self.component_lipschitz
            .as_ref()
            .map(|c| c.iter().map(|ci| ci.hessian_lipschitz).fold(0.0, f64::max))
    }
}

/// Where the estimate is to be compared: `∇f(x⁰)` or `Proj_U ∇f(x⁰)` with `U = span S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComparisonSpace {
    FullSpace,
    SubspaceU,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundIngredients {
    pub m: usize,
    pub delta: f64,
    /// `‖(Ŝᵀ)†‖`.
    pub pinv_norm: f64,
    pub constants: Vec<(&'static str, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: Option<f64>,
    pub ingredients: BoundIngredients,
    pub applicable: bool,
    pub comparison_space: ComparisonSpace,
}

struct Geometry {
    class: Classification,
    m: usize,
    delta: f64,
    pinv_norm: f64,
}

impl Geometry {
    fn of(xs: &SampleSet) -> Result<Self> {
        let pinv = matcore::pseudoinverse(&xs.scaled_matrix().transpose(), 0.0)?;
        Ok(Self {
            class: xs.classify(0.0),
            m: xs.len(),
            delta: xs.radius(),
            pinv_norm: matcore::spectral_norm(&pinv),
        })
    }

    fn space(&self) -> ComparisonSpace {
        if self.class.is_full_row_rank() {
            ComparisonSpace::FullSpace
        } else {
            ComparisonSpace::SubspaceU
        }
    }

    /// `(√m/6)·‖(Ŝᵀ)†‖·Δ²`, the constant-free part of every bound.
    fn base(&self) -> f64 {
        (self.m as f64).sqrt() / 6.0 * self.pinv_norm * self.delta * self.delta
    }

    fn report(&self, bound: f64, constants: Vec<(&'static str, f64)>) -> BoundReport {
        BoundReport {
            bound: Some(bound),
            ingredients: BoundIngredients {
                m: self.m,
                delta: self.delta,
                pinv_norm: self.pinv_norm,
                constants,
            },
            applicable: true,
            comparison_space: self.space(),
        }
    }
}

/// `‖∇ᶜf(X) − ∇f(x⁰)‖ ≤ (L√m/6)‖(Ŝᵀ)†‖Δ²` for full-row-rank `S`; against
/// `∇f_U(x⁰)` when `S` has full column rank and `m < n`.
///
/// Undetermined sets give a report with `applicable == false` and no bound.
pub fn gcsg_bound(xs: &SampleSet, lip: &LipschitzData) -> Result<BoundReport> {
    let l = check_constant("L", lip.hessian_lipschitz)?;
    let geo = Geometry::of(xs)?;
    let mut report = geo.report(l * geo.base(), vec![("L", l)]);
    if geo.class == Classification::Undetermined {
        report.bound = None;
        report.applicable = false;
    }
    Ok(report)
}

/// `|f(x⁰+d) − f(x⁰−d) − 2∇f(x⁰)ᵀd| ≤ (L/3)‖d‖³`.
pub fn taylor_centred_residual_bound(d_norm: f64, l: f64) -> f64 {
    l * d_norm.powi(3) / 3.0
}

/// Values and constants for [`gcscg_rule_bound`].
#[derive(Clone, Debug, PartialEq)]
pub enum RuleBoundInput {
    Product {
        l_f: f64,
        l_g: f64,
        f0: f64,
        g0: f64,
    },
    /// `lipschitz[i]` and `values[i]` belong to factor `fᵢ`.
    ProductK {
        lipschitz: Vec<f64>,
        values: Vec<f64>,
    },
    Power {
        l: f64,
        f0: f64,
        k: f64,
    },
    Quotient {
        l_f: f64,
        l_g: f64,
        f0: f64,
        g0: f64,
    },
    Exp {
        l: f64,
        f0: f64,
        a: f64,
    },
    Log {
        l: f64,
        f0: f64,
        a: f64,
    },
}

/// Bound on the error of the calculus-based estimate for one rule.
pub fn gcscg_rule_bound(xs: &SampleSet, input: &RuleBoundInput) -> Result<BoundReport> {
    let geo = Geometry::of(xs)?;
    if !geo.class.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    let base = geo.base();
    let (coeff, constants) = match *input {
        RuleBoundInput::Product { l_f, l_g, f0, g0 } => {
            check_constant("L_f", l_f)?;
            check_constant("L_g", l_g)?;
            (
                l_g * f0.abs() + l_f * g0.abs(),
                vec![("L_f", l_f), ("L_g", l_g), ("f(x0)", f0), ("g(x0)", g0)],
            )
        }
        RuleBoundInput::ProductK {
            ref lipschitz,
            ref values,
        } => {
            if lipschitz.len() != values.len() {
                return Err(Error::DimensionMismatch {
                    context: "product factors",
                    expected: values.len(),
                    found: lipschitz.len(),
                });
            }
            if values.len() < 2 {
                return Err(Error::TooFewFactors(values.len()));
            }
            let mut c = 0.0;
            for (i, &li) in lipschitz.iter().enumerate() {
                check_constant("L_i", li)?;
                let others: f64 = values
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, v)| v.abs())
                    .product();
                c += others * li;
            }
            (c, vec![("k", values.len() as f64)])
        }
        RuleBoundInput::Power { l, f0, k } => {
            check_constant("L", l)?;
            if !k.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "exponent {k} must be finite"
                )));
            }
            if k - 1.0 < 0.0 && f0 == 0.0 {
                return Err(Error::ZeroDenominator(
                    "f(x0) must be nonzero when k - 1 < 0",
                ));
            }
            let c = if k == 0.0 {
                0.0
            } else {
                l * k.abs() * f0.abs().powf(k - 1.0)
            };
            (c, vec![("L", l), ("f(x0)", f0), ("k", k)])
        }
        RuleBoundInput::Quotient { l_f, l_g, f0, g0 } => {
            check_constant("L_f", l_f)?;
            check_constant("L_g", l_g)?;
            if g0 == 0.0 {
                return Err(Error::ZeroDenominator("g(x0) must be nonzero"));
            }
            (
                l_f / g0.abs() + l_g * (f0 / (g0 * g0)).abs(),
                vec![("L_f", l_f), ("L_g", l_g), ("f(x0)", f0), ("g(x0)", g0)],
            )
        }
        RuleBoundInput::Exp { l, f0, a } => {
            check_constant("L", l)?;
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::InvalidArgument(format!("base {a} must be positive")));
            }
            (
                (a.powf(f0) * a.ln()).abs() * l,
                vec![("L", l), ("f(x0)", f0), ("a", a)],
            )
        }
        RuleBoundInput::Log { l, f0, a } => {
            check_constant("L", l)?;
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::InvalidArgument(format!("base {a} must be positive")));
            }
            if f0 == 0.0 || a.ln() == 0.0 {
                return Err(Error::ZeroDenominator("f(x0) ln a must be nonzero"));
            }
            (
                (1.0 / (f0 * a.ln())).abs() * l,
                vec![("L", l), ("f(x0)", f0), ("a", a)],
            )
        }
    };
    Ok(geo.report(coeff * base, constants))
}

/// Bound for the chain-rule estimate of `f ∘ g`:
/// `(√m·p/6)(√m·L_{g*}·L_{∇²f}‖(Ŝ_gᵀ)†‖ + ‖∇f(g(x⁰))‖·L_{∇²g*})‖(Ŝᵀ)†‖Δ*²`
/// with `Δ* = max{Δ, Δ_g}`.
///
/// Needs `S` and `S_g` of full rank. When `S_g` lacks full row rank the report
/// is not applicable and carries no bound.
///
/// `lip.hessian_lipschitz` is `L_{∇²f}` and `lip.component_lipschitz` holds the
/// constants of each `g_i`.
pub fn gcscg_chain_bound(
    ctx: &ChainContext,
    lip: &LipschitzData,
    grad_f_at_gx0_norm: f64,
) -> Result<BoundReport> {
    let l_hess_f = check_constant("L_hess_f", lip.hessian_lipschitz)?;
    let grad_norm = check_constant("|grad f(g(x0))|", grad_f_at_gx0_norm)?;
    let comps = lip.component_lipschitz.as_ref().ok_or_else(|| {
        Error::InvalidArgument("chain bound needs constants for every g_i".into())
    })?;
    let p = ctx.codomain_dim();
    if comps.len() != p {
        return Err(Error::DimensionMismatch {
            context: "component constants",
            expected: p,
            found: comps.len(),
        });
    }
    let geo = Geometry::of(ctx.inner_set())?;
    let image = ctx.image_set()?;
    let image_geo = Geometry::of(&image)?;
    if !geo.class.is_full_rank() || !image_geo.class.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    let l_g_star = lip.lipschitz_star().unwrap_or(0.0);
    let l_hess_g_star = lip.hessian_lipschitz_star().unwrap_or(0.0);
    let m = geo.m as f64;
    let delta_star = ctx.combined_radius();
    let bound = m.sqrt() * p as f64 / 6.0
        * (m.sqrt() * l_g_star * l_hess_f * image_geo.pinv_norm + grad_norm * l_hess_g_star)
        * geo.pinv_norm
        * delta_star
        * delta_star;
    let mut report = geo.report(
        bound,
        vec![
            ("p", p as f64),
            ("L_hess_f", l_hess_f),
            ("L_g*", l_g_star),
            ("L_hess_g*", l_hess_g_star),
            ("|grad f(g(x0))|", grad_norm),
            ("image_pinv_norm", image_geo.pinv_norm),
            ("delta_star", delta_star),
        ],
    );
    report.ingredients.delta = delta_star;
    if !image_geo.class.is_full_row_rank() {
        // the estimate then only sees Proj_V ∇f(g(x⁰)), so the Δ*² bound fails against ∇(f∘g)_U
        report.bound = None;
        report.applicable = false;
    }
    Ok(report)
}

/// Sampled lower estimate of the Hessian-Lipschitz constant on `B(center, radius)`:
/// the largest `‖∇²f(a) − ∇²f(b)‖ / ‖a − b‖` over `pairs` random pairs.
///
/// Not certified: the true constant may be larger.
pub fn estimate_hessian_lipschitz(
    hessian: impl Fn(&Vector) -> Matrix,
    center: &Vector,
    radius: f64,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} must be positive"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = center.dim();
    let mut sample = || loop {
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..=radius)).collect();
        let p = Vector::from_vec(p).expect("finite sample");
        if p.norm() <= radius {
            return center + &p;
        }
    };
    let mut best = 0.0f64;
    for _ in 0..pairs {
        let (a, b) = (sample(), sample());
        let dist = (&a - &b).norm();
        if dist > 0.0 {
            let dh = &hessian(&a) - &hessian(&b);
            best = best.max(matcore::spectral_norm(&dh) / dist);
        }
    }
    Ok(best)
}
