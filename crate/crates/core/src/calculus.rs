//! Calculus rules for centred simplex gradients.
//!
//! Each `gcsg_*` function splits the centred simplex gradient of a compound
//! function into the classical calculus formula applied to the centred
//! gradients of its parts plus an exact error term, so that
//! `total == ∇ᶜ(compound)(X)` holds as an identity. The `gcscg_*` functions
//! drop the error term and return the calculus-based estimate alone.
//!
//! All rules work on precomputed [`EvaluationTable`]s; evaluation and caching
//! stay with the caller.

use crate::error::{Error, Result};
use crate::matcore::{self, Matrix, Vector};
use crate::sampleset::{EvaluationTable, SampleSet};
use crate::simplexgrad::{
    apply_pinv_st, centred_difference_matrix, centred_jacobian, gcsg, GradientEstimate, Method,
    Rule,
};

/// A calculus rule written as formula part plus exact error term.
#[derive(Clone, Debug, PartialEq)]
pub struct CalculusDecomposition {
    pub rule_value: Vector,
    pub error_term: Vector,
    pub total: Vector,
}

impl CalculusDecomposition {
    fn plus(rule_value: Vector, error_term: Vector) -> Self {
        let total = &rule_value + &error_term;
        Self {
            rule_value,
            error_term,
            total,
        }
    }

    fn minus(rule_value: Vector, error_term: Vector) -> Self {
        let total = &rule_value - &error_term;
        Self {
            rule_value,
            error_term,
            total,
        }
    }
}

/// Rules whose one-sided error term `Eˢ` is available in closed form.
#[derive(Clone, Copy, Debug)]
pub enum GsgRule<'a> {
    Product {
        f: &'a EvaluationTable,
        g: &'a EvaluationTable,
    },
    ProductK {
        factors: &'a [EvaluationTable],
    },
    Power {
        f: &'a EvaluationTable,
        k: u32,
    },
    NegativePower {
        f: &'a EvaluationTable,
        k: u32,
    },
    Quotient {
        f: &'a EvaluationTable,
        g: &'a EvaluationTable,
    },
}

fn from_iter(len: usize, it: impl Iterator<Item = f64>) -> Vector {
    Vector::from_na(nalgebra::DVector::from_iterator(len, it))
}

/// Product difference vector `δˢ_{f|g}`, with component `i` equal to
/// `(f(x⁰+dⁱ) − f(x⁰))(g(x⁰+dⁱ) − g(x⁰))`.
pub fn product_difference(f: &EvaluationTable, g: &EvaluationTable) -> Result<Vector> {
    same_len(f, g)?;
    Ok(from_iter(
        f.len(),
        f.f_plus()
            .iter()
            .zip(g.f_plus())
            .map(|(fp, gp)| (fp - f.f_x0()) * (gp - g.f_x0())),
    ))
}

fn same_len(a: &EvaluationTable, b: &EvaluationTable) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "paired evaluation tables",
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

fn nonzero_forward(t: &EvaluationTable, what: &'static str) -> Result<()> {
    if t.f_x0() == 0.0 || t.f_plus().contains(&0.0) {
        return Err(Error::ZeroDenominator(what));
    }
    Ok(())
}

fn nonzero_centred(t: &EvaluationTable, what: &'static str) -> Result<()> {
    nonzero_forward(t, what)?;
    if t.require_minus()?.contains(&0.0) {
        return Err(Error::ZeroDenominator(what));
    }
    Ok(())
}

/// One-sided error term `Eˢ` of a simplex-gradient calculus rule over `xs`,
/// using the forward values `f(x⁰)`, `f(x⁰+dⁱ)` of each table.
pub fn gsg_error_term(rule: GsgRule<'_>, xs: &SampleSet) -> Result<Vector> {
    let m = xs.len();
    let inner = match rule {
        GsgRule::Product { f, g } => {
            f.check_matches(xs)?;
            g.check_matches(xs)?;
            product_difference(f, g)?
        }
        GsgRule::ProductK { factors } => {
            if factors.len() < 2 {
                return Err(Error::TooFewFactors(factors.len()));
            }
            for t in factors {
                t.check_matches(xs)?;
            }
            let refs: Vec<&EvaluationTable> = factors.iter().collect();
            let product = EvaluationTable::combine(&refs, |v| v.iter().product())?;
            let mut acc = product.delta_s();
            for (i, fi) in factors.iter().enumerate() {
                let coeff = others_product(factors, i);
                acc = &acc - &fi.delta_s().scale(coeff);
            }
            acc
        }
        GsgRule::Power { f, k } => {
            f.check_matches(xs)?;
            let f0 = f.f_x0();
            let mut acc = Vector::zeros(m);
            for i in 1..k {
                let fi = f.map(|x| x.powi(i as i32))?;
                let coeff = f0.powi((k - 1 - i) as i32);
                acc = &acc + &product_difference(f, &fi)?.scale(coeff);
            }
            acc
        }
        GsgRule::NegativePower { f, k } => {
            f.check_matches(xs)?;
            nonzero_forward(f, "f must be nonzero for a negative power")?;
            let f0 = f.f_x0();
            let recip = f.map(|x| 1.0 / x)?;
            let mut acc = product_difference(&recip, f)?.scale(k as f64);
            for i in 1..k {
                let recip_i = f.map(|x| x.powi(-(i as i32)))?;
                let coeff = f0.powi(1 + i as i32);
                acc = &acc - &product_difference(&recip, &recip_i)?.scale(coeff);
            }
            acc.scale(1.0 / f0.powi(k as i32))
        }
        GsgRule::Quotient { f, g } => {
            f.check_matches(xs)?;
            g.check_matches(xs)?;
            nonzero_forward(g, "g must be nonzero for the quotient rule")?;
            let ratio = f.zip_with(g, |a, b| a / b)?;
            product_difference(&ratio, g)?.scale(1.0 / g.f_x0())
        }
    };
    apply_pinv_st(xs, &inner)
}

fn others_product(factors: &[EvaluationTable], skip: usize) -> f64 {
    factors
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .map(|(_, t)| t.f_x0())
        .product()
}

/// `E^c = ½(Eˢ(X) + Eˢ(X⁻))`.
fn centred_error_term(
    xs: &SampleSet,
    forward: GsgRule<'_>,
    backward: GsgRule<'_>,
) -> Result<Vector> {
    let e_fwd = gsg_error_term(forward, xs)?;
    let e_bwd = gsg_error_term(backward, &xs.reflect())?;
    Ok((&e_fwd + &e_bwd).scale(0.5))
}

fn grad_c(xs: &SampleSet, t: &EvaluationTable) -> Result<Vector> {
    Ok(gcsg(xs, t)?.value)
}

/// `∇ᶜ(fg)(X) = f(x⁰)∇ᶜg(X) + g(x⁰)∇ᶜf(X) + E^c_{fg}(X)`.
pub fn gcsg_product(
    xs: &SampleSet,
    f: &EvaluationTable,
    g: &EvaluationTable,
) -> Result<CalculusDecomposition> {
    let rule_value = product_formula(xs, f, g)?;
    let (fr, gr) = (f.reflected()?, g.reflected()?);
    let error = centred_error_term(
        xs,
        GsgRule::Product { f, g },
        GsgRule::Product { f: &fr, g: &gr },
    )?;
    Ok(CalculusDecomposition::plus(rule_value, error))
}

fn product_formula(xs: &SampleSet, f: &EvaluationTable, g: &EvaluationTable) -> Result<Vector> {
    let gf = grad_c(xs, f)?;
    let gg = grad_c(xs, g)?;
    Ok(&gg.scale(f.f_x0()) + &gf.scale(g.f_x0()))
}

/// `∇ᶜ(f₁⋯f_k)(X) = Σᵢ Π_{j≠i} f_j(x⁰) ∇ᶜfᵢ(X) + E^c`.
pub fn gcsg_product_k(
    xs: &SampleSet,
    factors: &[EvaluationTable],
) -> Result<CalculusDecomposition> {
    let rule_value = product_k_formula(xs, factors)?;
    let reflected = factors
        .iter()
        .map(EvaluationTable::reflected)
        .collect::<Result<Vec<_>>>()?;
    let error = centred_error_term(
        xs,
        GsgRule::ProductK { factors },
        GsgRule::ProductK {
            factors: &reflected,
        },
    )?;
    Ok(CalculusDecomposition::plus(rule_value, error))
}

fn product_k_formula(xs: &SampleSet, factors: &[EvaluationTable]) -> Result<Vector> {
    if factors.len() < 2 {
        return Err(Error::TooFewFactors(factors.len()));
    }
    let mut acc = Vector::zeros(xs.dim());
    for (i, fi) in factors.iter().enumerate() {
        acc = &acc + &grad_c(xs, fi)?.scale(others_product(factors, i));
    }
    Ok(acc)
}

/// Power rule with integer exponent.
///
/// For `k ≥ 0`: `∇ᶜfᵏ = k f(x⁰)^{k−1} ∇ᶜf + E^c`.
/// For `k < 0`, writing `k = −n`: `∇ᶜf⁻ⁿ = −n f(x⁰)^{−n−1} ∇ᶜf − E^c`, which
/// needs `f(x⁰)` and every `f(x⁰ ± dⁱ)` nonzero.
pub fn gcsg_power(xs: &SampleSet, f: &EvaluationTable, k: i32) -> Result<CalculusDecomposition> {
    let gf = grad_c(xs, f)?;
    let fr = f.reflected()?;
    let f0 = f.f_x0();
    if k >= 0 {
        let k = k as u32;
        let rule_value = if k == 0 {
            Vector::zeros(xs.dim())
        } else {
            gf.scale(k as f64 * f0.powi(k as i32 - 1))
        };
        let error = centred_error_term(xs, GsgRule::Power { f, k }, GsgRule::Power { f: &fr, k })?;
        Ok(CalculusDecomposition::plus(rule_value, error))
    } else {
        nonzero_centred(f, "f must be nonzero at x0 and x0 ± d for a negative power")?;
        let n = k.unsigned_abs();
        let rule_value = gf.scale(-(n as f64) * f0.powi(-(n as i32) - 1));
        let error = centred_error_term(
            xs,
            GsgRule::NegativePower { f, k: n },
            GsgRule::NegativePower { f: &fr, k: n },
        )?;
        Ok(CalculusDecomposition::minus(rule_value, error))
    }
}

/// `∇ᶜ(f/g) = [g(x⁰)∇ᶜf − f(x⁰)∇ᶜg]/g(x⁰)² − E^c`; needs `g` nonzero at
/// `x⁰` and every `x⁰ ± dⁱ`.
pub fn gcsg_quotient(
    xs: &SampleSet,
    f: &EvaluationTable,
    g: &EvaluationTable,
) -> Result<CalculusDecomposition> {
    nonzero_centred(
        g,
        "g must be nonzero at x0 and x0 ± d for the quotient rule",
    )?;
    let rule_value = quotient_formula(xs, f, g)?;
    let (fr, gr) = (f.reflected()?, g.reflected()?);
    let error = centred_error_term(
        xs,
        GsgRule::Quotient { f, g },
        GsgRule::Quotient { f: &fr, g: &gr },
    )?;
    Ok(CalculusDecomposition::minus(rule_value, error))
}

fn quotient_formula(xs: &SampleSet, f: &EvaluationTable, g: &EvaluationTable) -> Result<Vector> {
    let g0 = g.f_x0();
    if g0 == 0.0 {
        return Err(Error::ZeroDenominator("g(x0) must be nonzero"));
    }
    let gf = grad_c(xs, f)?;
    let gg = grad_c(xs, g)?;
    Ok((&gf.scale(g0) - &gg.scale(f.f_x0())).scale(1.0 / (g0 * g0)))
}

/// Data for the chain rule of `f ∘ g` with `g: ℝⁿ → ℝᵖ`, `f: ℝᵖ → ℝ`.
///
/// Holds the inner set `X`, centred tables for each component `g_j` over `X`,
/// the image set `g(X) = ⟨g(x⁰), g(x⁰)+h¹, …⟩` with `hⁱ = g(x⁰+dⁱ) − g(x⁰)`,
/// a centred table for `f` over `g(X)` (values at `g(x⁰) ± hⁱ`) and a centred
/// table for `f ∘ g` over `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainContext {
    inner: SampleSet,
    component_tables: Vec<EvaluationTable>,
    image_x0: Vector,
    image_directions: Vec<Vector>,
    outer_table: EvaluationTable,
    composite_table: EvaluationTable,
}

impl ChainContext {
    /// Evaluates `g` over `X ∪ X⁻`, then `f` over `g(X) ∪ g(X)⁻` and `f ∘ g` over `X ∪ X⁻`.
    pub fn evaluate(
        xs: &SampleSet,
        g: impl Fn(&Vector) -> Vector,
        f: impl Fn(&Vector) -> f64,
    ) -> Result<Self> {
        let g_x0 = g(xs.x0());
        let g_plus: Vec<Vector> = xs.forward_points().iter().map(&g).collect();
        let g_minus: Vec<Vector> = xs.reflected_points().iter().map(&g).collect();
        let p = g_x0.dim();
        let component_tables = (0..p)
            .map(|j| {
                EvaluationTable::new(
                    g_x0.get(j),
                    g_plus.iter().map(|v| v.get(j)).collect(),
                    Some(g_minus.iter().map(|v| v.get(j)).collect()),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let h: Vec<Vector> = g_plus.iter().map(|gp| gp - &g_x0).collect();
        let outer_table = EvaluationTable::new(
            f(&g_x0),
            h.iter().map(|hi| f(&(&g_x0 + hi))).collect(),
            Some(h.iter().map(|hi| f(&(&g_x0 - hi))).collect()),
        )?;
        let composite_table = EvaluationTable::new(
            f(&g_x0),
            g_plus.iter().map(&f).collect(),
            Some(g_minus.iter().map(&f).collect()),
        )?;
        Self::from_tables(xs, component_tables, outer_table, composite_table)
    }

    /// Assembles a context from injected tables.
    pub fn from_tables(
        xs: &SampleSet,
        component_tables: Vec<EvaluationTable>,
        outer_table: EvaluationTable,
        composite_table: EvaluationTable,
    ) -> Result<Self> {
        if component_tables.is_empty() {
            return Err(Error::InvalidArgument(
                "g needs at least one component".into(),
            ));
        }
        for t in component_tables
            .iter()
            .chain([&outer_table, &composite_table])
        {
            t.check_matches(xs)?;
            t.require_minus()?;
        }
        let image_x0 = Vector::from_vec(component_tables.iter().map(|t| t.f_x0()).collect())?;
        let image_directions = (0..xs.len())
            .map(|i| {
                Vector::from_vec(
                    component_tables
                        .iter()
                        .map(|t| t.f_plus()[i] - t.f_x0())
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            inner: xs.clone(),
            component_tables,
            image_x0,
            image_directions,
            outer_table,
            composite_table,
        })
    }

    pub fn inner_set(&self) -> &SampleSet {
        &self.inner
    }

    pub fn component_tables(&self) -> &[EvaluationTable] {
        &self.component_tables
    }

    pub fn outer_table(&self) -> &EvaluationTable {
        &self.outer_table
    }

    pub fn composite_table(&self) -> &EvaluationTable {
        &self.composite_table
    }

    /// `g(x⁰)`.
    pub fn image_x0(&self) -> &Vector {
        &self.image_x0
    }

    /// `hⁱ = g(x⁰+dⁱ) − g(x⁰)`.
    pub fn image_directions(&self) -> &[Vector] {
        &self.image_directions
    }

    /// Codomain dimension `p`.
    pub fn codomain_dim(&self) -> usize {
        self.image_x0.dim()
    }

    /// `S_g = [h¹ ⋯ hᵐ]`, a `p × m` matrix.
    pub fn image_matrix(&self) -> Matrix {
        Matrix::from_columns(&self.image_directions).expect("uniform image dimension")
    }

    /// `Δ`.
    pub fn inner_radius(&self) -> f64 {
        self.inner.radius()
    }

    /// `Δ_g = maxᵢ ‖hⁱ‖`.
    pub fn image_radius(&self) -> f64 {
        self.image_directions
            .iter()
            .map(Vector::norm)
            .fold(0.0, f64::max)
    }

    /// `Δ* = max{Δ, Δ_g}`.
    pub fn combined_radius(&self) -> f64 {
        self.inner_radius().max(self.image_radius())
    }

    /// The image set `g(X)` as a validated sample set.
    pub fn image_set(&self) -> Result<SampleSet> {
        SampleSet::new(self.image_x0.clone(), self.image_directions.clone())
            .map_err(|e| Error::DegenerateImage(e.to_string()))
    }

    /// `J^c_g(X)`.
    pub fn jacobian(&self) -> Result<Matrix> {
        Ok(centred_jacobian(&self.inner, &self.component_tables)?.matrix)
    }

    /// `∇ᶜf(g(X)) = (S_gᵀ)†δᶜ_f(g(X))`.
    pub fn outer_gradient(&self) -> Result<Vector> {
        matcore::solve_least_squares(
            &self.image_matrix().transpose(),
            &self.outer_table.delta_c()?,
        )
    }
}

/// `∇ᶜ(f∘g)(X) = J^c_g(X)ᵀ∇ᶜf(g(X)) − E` with
/// `E = (Sᵀ)†δᶜ_g(S_gᵀ)†Ẽ + (Sᵀ)†Êδᶜ_f(g(X)) − (Sᵀ)†ÊẼ`,
/// `Ẽ = δᶜ_f(g(X)) − δᶜ_{f∘g}(X)` and `Ê = δᶜ_g(S_gᵀ)† − Id`.
///
/// `δᶜ_g` is the `m × p` matrix of centred component differences.
pub fn gcsg_chain(ctx: &ChainContext) -> Result<CalculusDecomposition> {
    ctx.image_set()?;
    let xs = ctx.inner_set();
    let m = xs.len();
    let pinv_st = matcore::pseudoinverse(&xs.direction_matrix().transpose(), 0.0)?;
    let pinv_sgt = matcore::pseudoinverse(&ctx.image_matrix().transpose(), 0.0)?;
    let dg = centred_difference_matrix(xs, ctx.component_tables())?;
    let df = ctx.outer_table().delta_c()?;
    let dfg = ctx.composite_table().delta_c()?;

    let mixing = &dg * &pinv_sgt;
    let rule_value = &pinv_st * &(&mixing * &df);
    let e_tilde = &df - &dfg;
    let e_hat = &mixing - &Matrix::identity(m);
    let inner = &(&(&mixing * &e_tilde) + &(&e_hat * &df)) - &(&e_hat * &e_tilde);
    let error = &pinv_st * &inner;
    Ok(CalculusDecomposition::minus(rule_value, error))
}

fn cc_estimate(xs: &SampleSet, value: Vector, rule: Rule, evals: usize) -> GradientEstimate {
    GradientEstimate::new(value, Method::Gcscg(rule), xs, evals)
}

fn evals_per_function(xs: &SampleSet) -> usize {
    2 * xs.len() + 1
}

/// `∇^{cc}(fg)(X) = f(x⁰)∇ᶜg(X) + g(x⁰)∇ᶜf(X)`.
pub fn gcscg_product(
    xs: &SampleSet,
    f: &EvaluationTable,
    g: &EvaluationTable,
) -> Result<GradientEstimate> {
    let value = product_formula(xs, f, g)?;
    Ok(cc_estimate(
        xs,
        value,
        Rule::Product,
        2 * evals_per_function(xs),
    ))
}

/// `∇^{cc}(f₁⋯f_k)(X) = Σᵢ Π_{j≠i} f_j(x⁰) ∇ᶜfᵢ(X)`.
pub fn gcscg_product_k(xs: &SampleSet, factors: &[EvaluationTable]) -> Result<GradientEstimate> {
    let value = product_k_formula(xs, factors)?;
    Ok(cc_estimate(
        xs,
        value,
        Rule::ProductK,
        factors.len() * evals_per_function(xs),
    ))
}

/// `∇^{cc}fᵏ(X) = k f(x⁰)^{k−1} ∇ᶜf(X)` for real `k`; `f(x⁰)` must be
/// nonzero when `k − 1 < 0`.
pub fn gcscg_power(xs: &SampleSet, f: &EvaluationTable, k: f64) -> Result<GradientEstimate> {
    if !k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exponent {k} must be finite"
        )));
    }
    let f0 = f.f_x0();
    if k - 1.0 < 0.0 && f0 == 0.0 {
        return Err(Error::ZeroDenominator(
            "f(x0) must be nonzero when k - 1 < 0",
        ));
    }
    let coeff = if k == 0.0 { 0.0 } else { k * f0.powf(k - 1.0) };
    if !coeff.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "f(x0)^(k-1) undefined for f(x0) = {f0}, k = {k}"
        )));
    }
    let value = grad_c(xs, f)?.scale(coeff);
    Ok(cc_estimate(xs, value, Rule::Power, evals_per_function(xs)))
}

/// `∇^{cc}(f/g)(X) = [g(x⁰)∇ᶜf(X) − f(x⁰)∇ᶜg(X)] / g(x⁰)²`; only `g(x⁰) ≠ 0` is required.
pub fn gcscg_quotient(
    xs: &SampleSet,
    f: &EvaluationTable,
    g: &EvaluationTable,
) -> Result<GradientEstimate> {
    let value = quotient_formula(xs, f, g)?;
    Ok(cc_estimate(
        xs,
        value,
        Rule::Quotient,
        2 * evals_per_function(xs),
    ))
}

/// `∇^{cc}a^{f}(X) = a^{f(x⁰)} ln(a) ∇ᶜf(X)`, `a > 0`.
pub fn gcscg_exp(xs: &SampleSet, f: &EvaluationTable, a: f64) -> Result<GradientEstimate> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidArgument(format!("base {a} must be positive")));
    }
    let coeff = a.powf(f.f_x0()) * a.ln();
    let value = grad_c(xs, f)?.scale(coeff);
    Ok(cc_estimate(xs, value, Rule::Exp, evals_per_function(xs)))
}

/// `∇^{cc}log_a f(X) = ∇ᶜf(X) / (f(x⁰) ln a)`; needs `f(x⁰) ≠ 0`, `a > 0`, `a ≠ 1`.
pub fn gcscg_log(xs: &SampleSet, f: &EvaluationTable, a: f64) -> Result<GradientEstimate> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidArgument(format!("base {a} must be positive")));
    }
    if a.ln() == 0.0 {
        return Err(Error::ZeroDenominator("ln a must be nonzero"));
    }
    if f.f_x0() == 0.0 {
        return Err(Error::ZeroDenominator("f(x0) must be nonzero"));
    }
    let value = grad_c(xs, f)?.scale(1.0 / (f.f_x0() * a.ln()));
    Ok(cc_estimate(xs, value, Rule::Log, evals_per_function(xs)))
}

/// `∇^{cc}(f∘g)(X) = J^c_g(X)ᵀ∇ᶜf(g(X))`.
///
/// A degenerate image set is rejected, except when `J^c_g(X)` vanishes
/// (constant `g`), where the estimate is exactly zero.
pub fn gcscg_chain(ctx: &ChainContext) -> Result<GradientEstimate> {
    let xs = ctx.inner_set();
    let evals = ctx.codomain_dim() * evals_per_function(xs) + 2 * xs.len();
    let jac = ctx.jacobian()?;
    if let Err(e) = ctx.image_set() {
        if jac.max_abs() == 0.0 {
            return Ok(cc_estimate(xs, Vector::zeros(xs.dim()), Rule::Chain, evals));
        }
        return Err(e);
    }
    let value = jac.transpose().mul_vec(&ctx.outer_gradient()?)?;
    Ok(cc_estimate(xs, value, Rule::Chain, evals))
}
