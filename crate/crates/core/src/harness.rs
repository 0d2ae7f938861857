//! Δ-sweeps, log-log order fits and bound-dominance audits.

use serde::Serialize;

use crate::bounds::{gcsg_bound, ComparisonSpace, LipschitzData};
use crate::error::{Error, Result};
use crate::oracle::TestFunction;
use crate::sampleset::{Classification, SampleSet};
use crate::simplexgrad::{comparison_projector, gcsg, gsg, Method};

/// Errors below this are rounding noise and are left out of slope fits.
pub const ERROR_FLOOR: f64 = 1e-14;

/// Minimum number of usable points for a slope fit.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub delta: f64,
    pub error: f64,
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub method: String,
    pub function: String,
    pub geometry: String,
    pub comparison_space: ComparisonSpace,
    pub points: Vec<SweepPoint>,
    pub fitted_slope: Option<f64>,
    /// Largest absolute residual of the log-log fit.
    pub slope_ci: Option<f64>,
}

impl ConvergenceRecord {
    /// True when every attached bound dominates its error.
    pub fn bounds_dominate(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.bound.is_none_or(|b| p.error <= b))
    }
}

/// Least-squares line through `(log₁₀ x, log₁₀ y)`: `(slope, max |residual|)`.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            context: "log-log fit",
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log10()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "log-log fit needs distinct deltas".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok((slope, resid))
}

/// Slope of log₁₀ error against log₁₀ Δ over the points with error ≥ [`ERROR_FLOOR`].
pub fn fit_order(record: &ConvergenceRecord) -> Result<f64> {
    let (d, e): (Vec<f64>, Vec<f64>) = record
        .points
        .iter()
        .filter(|p| p.error >= ERROR_FLOOR)
        .map(|p| (p.delta, p.error))
        .unzip();
    Ok(log_log_fit(&d, &e)?.0)
}

fn check_deltas(deltas: &[f64], radius: f64) -> Result<()> {
    if deltas.is_empty() {
        return Err(Error::EmptyDeltas);
    }
    for &d in deltas {
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "delta {d} must be positive"
            )));
        }
        if d >= radius {
            return Err(Error::DeltaOutsideBall { delta: d, radius });
        }
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::DeltasNotDecreasing);
    }
    Ok(())
}

/// Runs `method` over `template` rescaled to radius Δ for each Δ in `deltas`.
///
/// The template is first normalized to unit radius. The error is measured
/// against `∇f(x⁰)`, or against `Proj_U ∇f(x⁰)` for underdetermined sets. GCSG
/// points carry the theoretical bound when `f` has a Hessian-Lipschitz constant,
/// evaluated once on the ball `B(x⁰, f.ball_radius())`.
pub fn sweep(
    f: &TestFunction,
    template: &SampleSet,
    deltas: &[f64],
    method: Method,
) -> Result<ConvergenceRecord> {
    if template.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            context: "sweep template",
            expected: f.dim(),
            found: template.dim(),
        });
    }
    check_deltas(deltas, f.ball_radius())?;
    let class = template.classify(0.0);
    if class == Classification::Undetermined {
        return Err(Error::RankDeficient);
    }
    if !matches!(method, Method::Gsg | Method::Gcsg) {
        return Err(Error::InvalidArgument(format!(
            "sweeps support gsg and gcsg, not {method}"
        )));
    }
    let r = template.radius();
    let unit = if r == 1.0 {
        template.clone()
    } else {
        template.scaled(1.0 / r)?
    };
    let x0 = unit.x0();
    let grad = f.gradient(x0);
    let target = match comparison_projector(&unit) {
        Some(p) => p.apply(&grad)?,
        None => grad,
    };
    let lip = f
        .hessian_lipschitz(x0, f.ball_radius())
        .map(LipschitzData::new)
        .transpose()?;

    let mut points = Vec::with_capacity(deltas.len());
    let mut space = ComparisonSpace::FullSpace;
    for &delta in deltas {
        let xs = unit.scaled(delta)?;
        let estimate = match method {
            Method::Gsg => gsg(&xs, &xs.evaluate_forward(f.evaluator())?)?,
            _ => gcsg(&xs, &xs.evaluate(f.evaluator())?)?,
        };
        let error = (&estimate.value - &target).norm();
        let bound = match (&lip, method) {
            (Some(lip), Method::Gcsg) => {
                let report = gcsg_bound(&xs, lip)?;
                space = report.comparison_space;
                report.bound
            }
            _ => None,
        };
        points.push(SweepPoint {
            delta,
            error,
            bound,
        });
    }
    if !class.is_full_row_rank() {
        space = ComparisonSpace::SubspaceU;
    }

    let (fitted_slope, slope_ci) = if points.iter().all(|p| p.error > ERROR_FLOOR) {
        let d: Vec<f64> = points.iter().map(|p| p.delta).collect();
        let e: Vec<f64> = points.iter().map(|p| p.error).collect();
        match log_log_fit(&d, &e) {
            Ok((s, ci)) => (Some(s), Some(ci)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };

    Ok(ConvergenceRecord {
        method: method.to_string(),
        function: f.name().to_string(),
        geometry: format!("n={},m={},{}", unit.dim(), unit.len(), class),
        comparison_space: space,
        points,
        fitted_slope,
        slope_ci,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::Vector;
    use crate::oracle::lookup;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    fn record(points: Vec<(f64, f64)>) -> ConvergenceRecord {
        ConvergenceRecord {
            method: "gcsg".into(),
            function: "synthetic".into(),
            geometry: String::new(),
            comparison_space: ComparisonSpace::FullSpace,
            points: points
                .into_iter()
                .map(|(delta, error)| SweepPoint {
                    delta,
                    error,
                    bound: None,
                })
                .collect(),
            fitted_slope: None,
            slope_ci: None,
        }
    }

    const DELTAS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

    #[test]
    fn fit_order_exact_power_laws() {
        let r = record(DELTAS.iter().map(|&d| (d, 3.0 * d * d)).collect());
        assert!((fit_order(&r).unwrap() - 2.0).abs() < 1e-10);
        let r = record(DELTAS.iter().map(|&d| (d, 0.5 * d)).collect());
        assert!((fit_order(&r).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fit_order_skips_floor_points() {
        let mut pts: Vec<(f64, f64)> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&d| (d, d * d))
            .collect();
        pts.push((1e-3, 1e-16));
        pts.push((1e-4, 0.0));
        assert!((fit_order(&record(pts)).unwrap() - 2.0).abs() < 1e-10);

        let pts = vec![(1.0, 1.0), (0.5, 0.25), (0.1, 1e-15), (0.01, 1e-17)];
        assert_eq!(fit_order(&record(pts)), Err(Error::TooFewPoints(2)));
    }

    #[test]
    fn sweep_rejects_bad_deltas() {
        let f = lookup("exp2").unwrap();
        let xs = SampleSet::new(v(&[0.5, 0.25]), vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert_eq!(sweep(&f, &xs, &[], Method::Gcsg), Err(Error::EmptyDeltas));
        assert_eq!(
            sweep(&f, &xs, &[1e-2, 1e-1], Method::Gcsg),
            Err(Error::DeltasNotDecreasing)
        );
        assert!(matches!(
            sweep(&f, &xs, &[10.0, 1e-1], Method::Gcsg),
            Err(Error::DeltaOutsideBall { .. })
        ));
        let flat = SampleSet::new(v(&[0.5, 0.25]), vec![v(&[1.0, 1.0]), v(&[-1.0, -1.0])]).unwrap();
        assert_eq!(
            sweep(&f, &flat, &[1e-1], Method::Gcsg),
            Err(Error::RankDeficient)
        );
    }

    #[test]
    fn gcsg_and_gsg_orders_on_exp_family() {
        let f = lookup("exp2").unwrap();
        let xs = SampleSet::new(v(&[0.5, 0.25]), vec![v(&[1.0, 0.0]), v(&[0.3, 0.8])]).unwrap();
        let deltas = [1e-1, 1e-2, 1e-3, 1e-4];
        let r = sweep(&f, &xs, &deltas, Method::Gcsg).unwrap();
        let slope = r.fitted_slope.unwrap();
        assert!((1.8..=2.2).contains(&slope), "{slope}");
        assert!(r.bounds_dominate());

        // hand fit through the end points
        let (a, b) = (&r.points[0], &r.points[2]);
        let hand = (a.error.log10() - b.error.log10()) / (a.delta.log10() - b.delta.log10());
        assert!((hand - slope).abs() < 0.1);

        let r = sweep(&f, &xs, &deltas, Method::Gsg).unwrap();
        let slope = r.fitted_slope.unwrap();
        assert!((0.8..=1.2).contains(&slope), "{slope}");
        assert!(r.points.iter().all(|p| p.bound.is_none()));
    }

    #[test]
    fn gcsg_is_exact_on_quadratics() {
        let f = lookup("quadratic2").unwrap();
        let xs = SampleSet::new(v(&[0.4, -0.3]), vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        let r = sweep(&f, &xs, &[1e-1, 1e-2, 1e-3, 1e-4], Method::Gcsg).unwrap();
        assert!(r.points.iter().all(|p| p.error <= 1e-12), "{:?}", r.points);
        assert!(r.points.iter().all(|p| p.bound == Some(0.0)));
    }

    #[test]
    fn doubling_deltas_quadruples_bounds() {
        let f = lookup("sin3").unwrap();
        let xs = SampleSet::new(
            v(&[0.2, -0.1, 0.4]),
            vec![
                v(&[1.0, 0.0, 0.0]),
                v(&[0.2, 0.9, 0.0]),
                v(&[0.1, 0.1, 0.7]),
            ],
        )
        .unwrap();
        let a = sweep(&f, &xs, &[4e-2, 2e-2, 1e-2], Method::Gcsg).unwrap();
        let b = sweep(&f, &xs, &[8e-2, 4e-2, 2e-2], Method::Gcsg).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(q.bound.unwrap(), 4.0 * p.bound.unwrap());
        }
    }

    #[test]
    fn underdetermined_sweep_uses_subspace() {
        let f = lookup("sin3").unwrap();
        let xs = SampleSet::new(
            v(&[0.2, -0.1, 0.4]),
            vec![v(&[1.0, 0.0, 0.0]), v(&[0.0, 0.6, 0.8])],
        )
        .unwrap();
        let r = sweep(&f, &xs, &DELTAS, Method::Gcsg).unwrap();
        assert_eq!(r.comparison_space, ComparisonSpace::SubspaceU);
        let slope = r.fitted_slope.unwrap();
        assert!((1.8..=2.2).contains(&slope), "{slope}");
        assert!(r.bounds_dominate());
    }
}
