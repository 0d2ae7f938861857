//! The `csg` command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bounds::{
    gcscg_chain_bound, gcscg_rule_bound, gcsg_bound, ComponentLipschitz, LipschitzData,
    RuleBoundInput,
};
use crate::calculus::{
    gcscg_chain, gcscg_exp, gcscg_log, gcscg_power, gcscg_product, gcscg_product_k, gcscg_quotient,
    gcsg_chain, gcsg_power, gcsg_product, gcsg_product_k, gcsg_quotient, CalculusDecomposition,
    ChainContext,
};
use crate::error::{Error, Result};
use crate::harness::{sweep, ConvergenceRecord};
use crate::matcore::{self, Vector};
use crate::oracle::{lookup, lookup_vector, TestFunction, VectorTestFunction};
use crate::sampleset::{EvaluationTable, SampleSet};
use crate::simplexgrad::{gcsg, gsg, GradientEstimate, Method, Rule};
use crate::verify::all_checks;

/// Smallest singular value a generated `Ŝ` may have.
pub const MIN_GENERATED_SINGULAR_VALUE: f64 = 0.1;

pub const DEFAULT_DELTAS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

#[derive(Parser, Debug)]
#[command(
    name = "csg",
    version,
    about = "Generalized (centred) simplex gradients"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Approximate the gradient of a registry function over one sample set.
    Estimate(EstimateArgs),
    /// Compare the calculus rules with direct centred simplex gradients.
    Rules(RulesArgs),
    /// Run a convergence sweep over a list of radii.
    Sweep(SweepArgs),
    /// Run the golden-value and randomized self-checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SetSource {
    /// Sample set as JSON: {"x0": [...], "directions": [[...], ...]}.
    #[arg(long, value_name = "FILE")]
    pub sample_set: Option<PathBuf>,
    /// Random set "n,m,seed" centred at the function's default point.
    #[arg(long, value_name = "N,M,SEED")]
    pub generate: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct GeneratorOptions {
    /// Radius of a generated set.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Generate a rank-one (degenerate) set instead of rejecting ill-conditioned ones.
    #[arg(long)]
    pub degenerate: bool,
}

#[derive(Args, Debug, Clone)]
pub struct OutputOptions {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RuleOperands {
    /// Further factors (product, product_k, quotient).
    #[arg(long = "second", value_name = "NAME")]
    pub second: Vec<String>,
    /// Exponent for the power rule.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub power: f64,
    /// Base for the exp and log rules.
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub base: f64,
    /// Inner map g for the chain rule; the sample set lives in its domain.
    #[arg(long, value_name = "NAME")]
    pub inner: Option<String>,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub function: String,
    #[command(flatten)]
    pub set: SetSource,
    #[command(flatten)]
    pub generator: GeneratorOptions,
    /// gsg, gcsg, or gcscg:RULE with RULE in product, product_k, power, quotient, exp, log, chain.
    #[arg(long, default_value = "gcsg")]
    pub method: Method,
    #[command(flatten)]
    pub operands: RuleOperands,
    #[command(flatten)]
    pub output: OutputOptions,
}

#[derive(Args, Debug)]
pub struct RulesArgs {
    #[arg(long)]
    pub function: String,
    #[command(flatten)]
    pub set: SetSource,
    #[command(flatten)]
    pub generator: GeneratorOptions,
    #[command(flatten)]
    pub operands: RuleOperands,
    #[command(flatten)]
    pub output: OutputOptions,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub function: String,
    #[command(flatten)]
    pub set: SetSource,
    #[command(flatten)]
    pub generator: GeneratorOptions,
    /// Comma-separated methods (gsg, gcsg).
    #[arg(long, default_value = "gsg,gcsg", value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Comma-separated, strictly decreasing radii.
    #[arg(long, value_name = "D1,D2,...")]
    pub deltas: Option<String>,
    #[command(flatten)]
    pub output: OutputOptions,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Randomized cases per property.
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Text produced by a command and whether it succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub success: bool,
    pub out_path: Option<PathBuf>,
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

pub fn parse_deltas(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::EmptyDeltas);
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad delta '{t}'")))
        })
        .collect()
}

/// Parses a generator spec `"n,m,seed"`.
pub fn parse_generator(spec: &str) -> Result<(usize, usize, u64)> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || Error::InvalidArgument(format!("generator spec '{spec}' is not n,m,seed"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let n = parts[0].parse().map_err(|_| bad())?;
    let m = parts[1].parse().map_err(|_| bad())?;
    let seed = parts[2].parse().map_err(|_| bad())?;
    if n == 0 || m == 0 {
        return Err(bad());
    }
    Ok((n, m, seed))
}

/// Random set around `x0` with `m` directions of radius `radius`.
///
/// Sets whose `Ŝ` has a singular value below [`MIN_GENERATED_SINGULAR_VALUE`]
/// are redrawn. With `degenerate`, all directions are distinct multiples of
/// one random vector.
pub fn generate_set(
    x0: &Vector,
    m: usize,
    seed: u64,
    radius: f64,
    degenerate: bool,
) -> Result<SampleSet> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} must be positive"
        )));
    }
    let n = x0.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_vec = |rng: &mut ChaCha8Rng| {
        Vector::from_vec((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("finite")
    };
    for _ in 0..10_000 {
        let dirs: Vec<Vector> = if degenerate {
            let u = random_vec(&mut rng);
            (1..=m).map(|k| u.scale(k as f64 / m as f64)).collect()
        } else {
            (0..m).map(|_| random_vec(&mut rng)).collect()
        };
        let Ok(unit) = SampleSet::new(x0.clone(), dirs) else {
            continue;
        };
        if !degenerate {
            let s = matcore::singular_values(&unit.scaled_matrix());
            if s.last().copied().unwrap_or(0.0) < MIN_GENERATED_SINGULAR_VALUE {
                continue;
            }
        }
        return unit.scaled(radius / unit.radius());
    }
    Err(Error::InvalidArgument(
        "could not generate a well-conditioned sample set".into(),
    ))
}

fn load_set(src: &SetSource, gen: &GeneratorOptions, x0: &Vector) -> Result<SampleSet> {
    let xs = if let Some(path) = &src.sample_set {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MalformedSampleSet(format!("{}: {e}", path.display())))?;
        SampleSet::from_json(&text)?
    } else if let Some(spec) = &src.generate {
        let (n, m, seed) = parse_generator(spec)?;
        if n != x0.dim() {
            return Err(Error::DimensionMismatch {
                context: "generator dimension",
                expected: x0.dim(),
                found: n,
            });
        }
        generate_set(x0, m, seed, gen.radius, gen.degenerate)?
    } else {
        return Err(Error::InvalidArgument(
            "one of --sample-set or --generate is required".into(),
        ));
    };
    if xs.dim() != x0.dim() {
        return Err(Error::DimensionMismatch {
            context: "sample set dimension",
            expected: x0.dim(),
            found: xs.dim(),
        });
    }
    Ok(xs)
}

fn table(xs: &SampleSet, f: &TestFunction) -> Result<EvaluationTable> {
    check_dim(xs, f)?;
    xs.evaluate(f.evaluator())
}

fn check_dim(xs: &SampleSet, f: &TestFunction) -> Result<()> {
    if xs.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            context: "function domain",
            expected: xs.dim(),
            found: f.dim(),
        });
    }
    Ok(())
}

fn lip_at(f: &TestFunction, x0: &Vector, radius: f64) -> Option<f64> {
    f.hessian_lipschitz(x0, radius)
}

fn seconds(ops: &RuleOperands) -> Result<Vec<TestFunction>> {
    ops.second.iter().map(|n| lookup(n)).collect()
}

fn first_second(ops: &RuleOperands) -> Result<TestFunction> {
    let s = seconds(ops)?;
    s.into_iter()
        .next()
        .ok_or_else(|| Error::InvalidArgument("this rule needs --second NAME".into()))
}

fn inner_map(name: &str) -> Result<VectorTestFunction> {
    lookup_vector(name)
}

struct ChainSetup {
    ctx: ChainContext,
    outer: TestFunction,
    inner: VectorTestFunction,
}

fn chain_setup(xs: &SampleSet, f: &TestFunction, inner_name: &str) -> Result<ChainSetup> {
    let inner = inner_map(inner_name)?;
    if xs.dim() != inner.domain_dim() {
        return Err(Error::DimensionMismatch {
            context: "inner map domain",
            expected: xs.dim(),
            found: inner.domain_dim(),
        });
    }
    if f.dim() != inner.codomain_dim() {
        return Err(Error::DimensionMismatch {
            context: "outer function domain",
            expected: inner.codomain_dim(),
            found: f.dim(),
        });
    }
    let ctx = ChainContext::evaluate(xs, |y| inner.eval(y), f.evaluator())?;
    Ok(ChainSetup {
        ctx,
        outer: f.clone(),
        inner,
    })
}

impl ChainSetup {
    fn bound(&self) -> Option<f64> {
        let xs = self.ctx.inner_set();
        let gx0 = self.ctx.image_x0();
        let l_f = lip_at(&self.outer, gx0, self.ctx.image_radius())?;
        let l_star = self.inner.lipschitz_star(xs.x0(), xs.radius());
        let comps = self
            .inner
            .components()
            .iter()
            .map(|c| {
                Some(ComponentLipschitz {
                    lipschitz: l_star,
                    hessian_lipschitz: lip_at(c, xs.x0(), xs.radius())?,
                })
            })
            .collect::<Option<Vec<_>>>()?;
        let lip = LipschitzData::new(l_f).ok()?.with_components(comps).ok()?;
        let grad = self.outer.gradient(gx0).norm();
        gcscg_chain_bound(&self.ctx, &lip, grad).ok()?.bound
    }

    fn truth(&self) -> Result<Vector> {
        let x0 = self.ctx.inner_set().x0();
        let j = self.inner.jacobian(x0);
        j.transpose()
            .mul_vec(&self.outer.gradient(self.ctx.image_x0()))
    }
}

struct EstimateRow {
    label: String,
    estimate: GradientEstimate,
    bound: Option<f64>,
}

fn run_estimate(args: &EstimateArgs) -> Result<(SampleSet, EstimateRow)> {
    let f = lookup(&args.function)?;
    let ops = &args.operands;
    let x0_default = match (&args.method, &ops.inner) {
        (Method::Gcscg(Rule::Chain), Some(g)) => {
            inner_map(g)?.components()[0].default_point().clone()
        }
        _ => f.default_point().clone(),
    };
    let xs = load_set(&args.set, &args.generator, &x0_default)?;
    let x0 = xs.x0().clone();
    let delta = xs.radius();
    let l = |h: &TestFunction| lip_at(h, &x0, delta);
    let rule_bound = |input: Option<RuleBoundInput>| -> Option<f64> {
        gcscg_rule_bound(&xs, &input?).ok()?.bound
    };
    let name = f.name().to_string();

    let row = match args.method {
        Method::Gsg => {
            check_dim(&xs, &f)?;
            let est = gsg(&xs, &xs.evaluate_forward(f.evaluator())?)?;
            EstimateRow {
                label: name,
                estimate: est,
                bound: None,
            }
        }
        Method::Gcsg => {
            let est = gcsg(&xs, &table(&xs, &f)?)?;
            let bound = l(&f)
                .and_then(|l| LipschitzData::new(l).ok())
                .and_then(|lip| gcsg_bound(&xs, &lip).ok()?.bound);
            EstimateRow {
                label: name,
                estimate: est,
                bound,
            }
        }
        Method::Gcscg(rule) => {
            let tf = table(&xs, &f)?;
            let f0 = tf.f_x0();
            match rule {
                Rule::Product => {
                    let g = first_second(ops)?;
                    let tg = table(&xs, &g)?;
                    let input = (|| {
                        Some(RuleBoundInput::Product {
                            l_f: l(&f)?,
                            l_g: l(&g)?,
                            f0,
                            g0: tg.f_x0(),
                        })
                    })();
                    EstimateRow {
                        label: format!("{}*{}", f.name(), g.name()),
                        estimate: gcscg_product(&xs, &tf, &tg)?,
                        bound: rule_bound(input),
                    }
                }
                Rule::ProductK => {
                    let mut fs = vec![f.clone()];
                    fs.extend(seconds(ops)?);
                    let tabs = fs
                        .iter()
                        .map(|h| table(&xs, h))
                        .collect::<Result<Vec<_>>>()?;
                    let input = (|| {
                        Some(RuleBoundInput::ProductK {
                            lipschitz: fs.iter().map(l).collect::<Option<Vec<_>>>()?,
                            values: tabs.iter().map(EvaluationTable::f_x0).collect(),
                        })
                    })();
                    EstimateRow {
                        label: fs
                            .iter()
                            .map(TestFunction::name)
                            .collect::<Vec<_>>()
                            .join("*"),
                        estimate: gcscg_product_k(&xs, &tabs)?,
                        bound: rule_bound(input),
                    }
                }
                Rule::Power => {
                    let k = ops.power;
                    let input = l(&f).map(|l| RuleBoundInput::Power { l, f0, k });
                    EstimateRow {
                        label: format!("{}^{}", f.name(), k),
                        estimate: gcscg_power(&xs, &tf, k)?,
                        bound: rule_bound(input),
                    }
                }
                Rule::Quotient => {
                    let g = first_second(ops)?;
                    let tg = table(&xs, &g)?;
                    let input = (|| {
                        Some(RuleBoundInput::Quotient {
                            l_f: l(&f)?,
                            l_g: l(&g)?,
                            f0,
                            g0: tg.f_x0(),
                        })
                    })();
                    EstimateRow {
                        label: format!("{}/{}", f.name(), g.name()),
                        estimate: gcscg_quotient(&xs, &tf, &tg)?,
                        bound: rule_bound(input),
                    }
                }
                Rule::Exp => {
                    let a = ops.base;
                    let input = l(&f).map(|l| RuleBoundInput::Exp { l, f0, a });
                    EstimateRow {
                        label: format!("{}^{}", a, f.name()),
                        estimate: gcscg_exp(&xs, &tf, a)?,
                        bound: rule_bound(input),
                    }
                }
                Rule::Log => {
                    let a = ops.base;
                    let input = l(&f).map(|l| RuleBoundInput::Log { l, f0, a });
                    EstimateRow {
                        label: format!("log_{}({})", a, f.name()),
                        estimate: gcscg_log(&xs, &tf, a)?,
                        bound: rule_bound(input),
                    }
                }
                Rule::Chain => unreachable!("chain handled below"),
            }
        }
    };
    Ok((xs, row))
}

fn run_estimate_chain(args: &EstimateArgs) -> Result<(SampleSet, EstimateRow)> {
    let f = lookup(&args.function)?;
    let inner_name = args
        .operands
        .inner
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("the chain rule needs --inner NAME".into()))?;
    let inner = inner_map(inner_name)?;
    let x0 = inner.components()[0].default_point().clone();
    let xs = load_set(&args.set, &args.generator, &x0)?;
    let setup = chain_setup(&xs, &f, inner_name)?;
    let estimate = gcscg_chain(&setup.ctx)?;
    Ok((
        xs,
        EstimateRow {
            label: format!("{}({})", f.name(), inner_name),
            estimate,
            bound: setup.bound(),
        },
    ))
}

fn estimate_output(args: &EstimateArgs) -> Result<String> {
    let (xs, row) = if args.method == Method::Gcscg(Rule::Chain) {
        run_estimate_chain(args)?
    } else {
        run_estimate(args)?
    };
    let class = xs.classify(0.0);
    let est = &row.estimate;
    Ok(match args.output.format {
        Format::Csv => {
            let mut s = String::from("method,function,classification,m,delta,eval_count,bound");
            for i in 1..=est.value.dim() {
                write!(s, ",g{i}").expect("string write");
            }
            s.push('\n');
            write!(
                s,
                "{},{},{},{},{},{},{}",
                est.method,
                row.label,
                class,
                est.m,
                fmt_real(est.delta),
                est.eval_count,
                fmt_opt(row.bound)
            )
            .expect("string write");
            for g in est.value.iter() {
                write!(s, ",{}", fmt_real(g)).expect("string write");
            }
            s.push('\n');
            s
        }
        Format::Json => {
            let v = json!({
                "method": est.method.to_string(),
                "function": row.label,
                "classification": class.as_str(),
                "m": est.m,
                "delta": est.delta,
                "eval_count": est.eval_count,
                "bound": row.bound,
                "gradient": est.value.to_vec(),
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("serializable")
            )
        }
    })
}

struct RuleRow {
    rule: &'static str,
    direct: Vector,
    decomposition: Option<CalculusDecomposition>,
    gcscg: Option<Vector>,
    truth: Vector,
}

fn run_rules(args: &RulesArgs) -> Result<Vec<RuleRow>> {
    let f = lookup(&args.function)?;
    let ops = &args.operands;
    if let Some(inner_name) = &ops.inner {
        let inner = inner_map(inner_name)?;
        let x0 = inner.components()[0].default_point().clone();
        let xs = load_set(&args.set, &args.generator, &x0)?;
        let setup = chain_setup(&xs, &f, inner_name)?;
        let direct = gcsg(&xs, setup.ctx.composite_table())?.value;
        let decomposition = gcsg_chain(&setup.ctx).ok();
        let cc = gcscg_chain(&setup.ctx).ok().map(|e| e.value);
        return Ok(vec![RuleRow {
            rule: Rule::Chain.as_str(),
            direct,
            decomposition,
            gcscg: cc,
            truth: setup.truth()?,
        }]);
    }

    let xs = load_set(&args.set, &args.generator, f.default_point())?;
    let x0 = xs.x0().clone();
    let g = match ops.second.first() {
        Some(name) => lookup(name)?,
        None => f.clone(),
    };
    let tf = table(&xs, &f)?;
    let tg = table(&xs, &g)?;
    let (f0, g0) = (tf.f_x0(), tg.f_x0());
    let (df, dg) = (f.gradient(&x0), g.gradient(&x0));
    let direct_of =
        |h: &dyn Fn(&Vector) -> f64| -> Result<Vector> { Ok(gcsg(&xs, &xs.evaluate(h)?)?.value) };
    let mut rows = Vec::new();

    rows.push(RuleRow {
        rule: Rule::Product.as_str(),
        direct: direct_of(&|y| f.eval(y) * g.eval(y))?,
        decomposition: gcsg_product(&xs, &tf, &tg).ok(),
        gcscg: gcscg_product(&xs, &tf, &tg).ok().map(|e| e.value),
        truth: &dg.scale(f0) + &df.scale(g0),
    });

    let factors = [tf.clone(), tg.clone(), tf.clone()];
    rows.push(RuleRow {
        rule: Rule::ProductK.as_str(),
        direct: direct_of(&|y| f.eval(y) * g.eval(y) * f.eval(y))?,
        decomposition: gcsg_product_k(&xs, &factors).ok(),
        gcscg: gcscg_product_k(&xs, &factors).ok().map(|e| e.value),
        truth: &df.scale(2.0 * f0 * g0) + &dg.scale(f0 * f0),
    });

    let k = ops.power;
    let integer_k = (k.fract() == 0.0 && k.abs() <= i32::MAX as f64).then_some(k as i32);
    rows.push(RuleRow {
        rule: Rule::Power.as_str(),
        direct: direct_of(&|y| f.eval(y).powf(k))?,
        decomposition: integer_k.and_then(|k| gcsg_power(&xs, &tf, k).ok()),
        gcscg: gcscg_power(&xs, &tf, k).ok().map(|e| e.value),
        truth: df.scale(k * f0.powf(k - 1.0)),
    });

    rows.push(RuleRow {
        rule: Rule::Quotient.as_str(),
        direct: direct_of(&|y| f.eval(y) / g.eval(y))?,
        decomposition: gcsg_quotient(&xs, &tf, &tg).ok(),
        gcscg: gcscg_quotient(&xs, &tf, &tg).ok().map(|e| e.value),
        truth: (&df.scale(g0) - &dg.scale(f0)).scale(1.0 / (g0 * g0)),
    });

    let a = ops.base;
    rows.push(RuleRow {
        rule: Rule::Exp.as_str(),
        direct: direct_of(&|y| a.powf(f.eval(y)))?,
        decomposition: None,
        gcscg: gcscg_exp(&xs, &tf, a).ok().map(|e| e.value),
        truth: df.scale(a.powf(f0) * a.ln()),
    });

    rows.push(RuleRow {
        rule: Rule::Log.as_str(),
        direct: direct_of(&|y| f.eval(y).ln() / a.ln())?,
        decomposition: None,
        gcscg: gcscg_log(&xs, &tf, a).ok().map(|e| e.value),
        truth: df.scale(1.0 / (f0 * a.ln())),
    });
    Ok(rows)
}

fn rules_output(args: &RulesArgs) -> Result<String> {
    let rows = run_rules(args)?;
    Ok(match args.output.format {
        Format::Csv => {
            let mut s =
                String::from("rule,index,direct,rule_value,error_term,total,gcscg,analytic\n");
            for r in &rows {
                for i in 0..r.direct.dim() {
                    let d = r.decomposition.as_ref();
                    writeln!(
                        s,
                        "{},{},{},{},{},{},{},{}",
                        r.rule,
                        i + 1,
                        fmt_real(r.direct.get(i)),
                        fmt_opt(d.map(|d| d.rule_value.get(i))),
                        fmt_opt(d.map(|d| d.error_term.get(i))),
                        fmt_opt(d.map(|d| d.total.get(i))),
                        fmt_opt(r.gcscg.as_ref().map(|g| g.get(i))),
                        fmt_real(r.truth.get(i)),
                    )
                    .expect("string write");
                }
            }
            s
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "rule": r.rule,
                        "direct": r.direct.to_vec(),
                        "rule_value": r.decomposition.as_ref().map(|d| d.rule_value.to_vec()),
                        "error_term": r.decomposition.as_ref().map(|d| d.error_term.to_vec()),
                        "total": r.decomposition.as_ref().map(|d| d.total.to_vec()),
                        "gcscg": r.gcscg.as_ref().map(Vector::to_vec),
                        "analytic": r.truth.to_vec(),
                    })
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&items).expect("serializable")
            )
        }
    })
}

fn run_sweep(args: &SweepArgs) -> Result<Vec<ConvergenceRecord>> {
    let deltas = match &args.deltas {
        Some(text) => parse_deltas(text)?,
        None => DEFAULT_DELTAS.to_vec(),
    };
    if deltas.is_empty() {
        return Err(Error::EmptyDeltas);
    }
    if args.method.is_empty() {
        return Err(Error::InvalidArgument("no methods given".into()));
    }
    let f = lookup(&args.function)?;
    let template = load_set(&args.set, &args.generator, f.default_point())?;
    args.method
        .iter()
        .map(|&m| sweep(&f, &template, &deltas, m))
        .collect()
}

fn sweep_output(args: &SweepArgs) -> Result<String> {
    let records = run_sweep(args)?;
    Ok(match args.output.format {
        Format::Csv => {
            let mut s = String::from("method,function,delta,error,bound,slope\n");
            for r in &records {
                for p in &r.points {
                    writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        r.method,
                        r.function,
                        fmt_real(p.delta),
                        fmt_real(p.error),
                        fmt_opt(p.bound),
                        fmt_opt(r.fitted_slope)
                    )
                    .expect("string write");
                }
            }
            s
        }
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&records).expect("serializable")
        ),
    })
}

fn verify_output(args: &VerifyArgs) -> (String, bool) {
    let checks = all_checks(args.cases.max(1), args.seed);
    let mut s = String::new();
    let mut ok = true;
    for c in &checks {
        ok &= c.passed;
        writeln!(
            s,
            "{} {}: {} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.description,
            c.detail
        )
        .expect("string write");
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    writeln!(s, "{passed}/{} checks passed", checks.len()).expect("string write");
    (s, ok)
}

/// Runs one command and returns its output text.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let (output, success, out_path) = match &cli.command {
        Command::Estimate(a) => (estimate_output(a)?, true, a.output.out.clone()),
        Command::Rules(a) => (rules_output(a)?, true, a.output.out.clone()),
        Command::Sweep(a) => (sweep_output(a)?, true, a.output.out.clone()),
        Command::Verify(a) => {
            let (s, ok) = verify_output(a);
            (s, ok, None)
        }
    };
    Ok(Outcome {
        output,
        success,
        out_path,
    })
}
