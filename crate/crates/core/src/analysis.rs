//! Error norms, log-log order fitting and predicted p-rates.

use crate::error::{Error, Result};
use crate::fracfun::{Regularity, SingularSolution};
use crate::mesh::{element_rule, physical_nodes, BrokenField, Mesh1D};

/// Residual (natural-log units) below which a fit counts as asymptotic.
pub const FIT_RESIDUAL: f64 = 0.05;
/// Consecutive error ratios below this flag a floor.
pub const FLOOR_RATIO: f64 = 1.01;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Positive for decaying errors: `error ~ p^-slope`.
    pub slope: f64,
    pub intercept: f64,
    /// Index of the first retained point.
    pub first: usize,
    /// Max absolute residual of `ln(error)` about the fitted line.
    pub residual: f64,
}

fn ols(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(p, _)| p.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Least-squares slope of `ln(error)` against `ln(p)`, sign-flipped.
///
/// Leading points are dropped until the max residual falls below
/// [`FIT_RESIDUAL`], keeping at least three points.
pub fn fit_order(points: &[(f64, f64)]) -> Result<FitResult> {
    check_points(points, 3)?;
    let mut first = 0;
    loop {
        let (slope, intercept, residual) = ols(&points[first..]);
        if residual < FIT_RESIDUAL || points.len() - first == 3 {
            stall(&points[first..])?;
            return Ok(FitResult {
                slope: -slope,
                intercept,
                first,
                residual,
            });
        }
        first += 1;
    }
}

/// How a sweep's errors are reduced to a single slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMethod {
    /// [`fit_order`].
    #[default]
    Plain,
    /// [`fit_order_parity`].
    Parity,
}

impl FitMethod {
    pub fn fit(self, points: &[(f64, f64)]) -> Result<FitResult> {
        match self {
            FitMethod::Plain => fit_order(points),
            FitMethod::Parity => fit_order_parity(points),
        }
    }
}

fn is_odd(p: f64) -> bool {
    (p.round() as i64).rem_euclid(2) == 1
}

/// Pooled slope with one intercept per parity class of `p`.
///
/// Interior singularities make the error alternate between even and odd
/// degrees; each class decays at the same rate but with its own constant.
/// The reported intercept is the even-class one.
fn ols_parity(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut means = [(0.0, 0.0); 2];
    for (class, mean) in means.iter_mut().enumerate() {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|(p, _)| is_odd(*p) == (class == 1))
            .map(|(p, e)| (p.ln(), e.ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|v| v.0).sum::<f64>() / n;
        let my = pts.iter().map(|v| v.1).sum::<f64>() / n;
        sxy += pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>();
        sxx += pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
        *mean = (mx, my);
    }
    let slope = sxy / sxx;
    let icpt = |c: usize| means[c].1 - slope * means[c].0;
    let residual = points
        .iter()
        .map(|(p, e)| (e.ln() - icpt(is_odd(*p) as usize) - slope * p.ln()).abs())
        .fold(0.0, f64::max);
    (slope, icpt(0), residual)
}

fn check_points(points: &[(f64, f64)], min: usize) -> Result<()> {
    if points.len() < min {
        return Err(Error::DegenerateFit(format!(
            "need at least {min} points, got {}",
            points.len()
        )));
    }
    if let Some((p, e)) = points
        .iter()
        .find(|(p, e)| !(*e > 0.0 && e.is_finite() && *p > 0.0))
    {
        return Err(Error::DegenerateFit(format!(
            "non-positive data point ({p}, {e})"
        )));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::DegenerateFit(
            "degrees must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn stall(pts: &[(f64, f64)]) -> Result<()> {
    match pts.windows(2).find(|w| w[0].1 / w[1].1 < FLOOR_RATIO) {
        Some(w) => Err(Error::DegenerateFit(format!(
            "error stalls between p = {} ({:e}) and p = {} ({:e})",
            w[0].0, w[0].1, w[1].0, w[1].1
        ))),
        None => Ok(()),
    }
}

/// Like [`fit_order`] but with separate even/odd intercepts, for sweeps whose
/// errors alternate with the parity of `p`. Needs two points of each parity.
pub fn fit_order_parity(points: &[(f64, f64)]) -> Result<FitResult> {
    check_points(points, 4)?;
    let classes_ok = |pts: &[(f64, f64)]| {
        let odd = pts.iter().filter(|(p, _)| is_odd(*p)).count();
        odd >= 2 && pts.len() - odd >= 2
    };
    if !classes_ok(points) {
        return Err(Error::DegenerateFit(
            "need two degrees of each parity".into(),
        ));
    }
    let mut first = 0;
    loop {
        let tail = &points[first..];
        let (slope, intercept, residual) = ols_parity(tail);
        if residual < FIT_RESIDUAL || !classes_ok(&tail[1..]) {
            for class in [false, true] {
                let pts: Vec<_> = tail
                    .iter()
                    .copied()
                    .filter(|(p, _)| is_odd(*p) == class)
                    .collect();
                stall(&pts)?;
            }
            return Ok(FitResult {
                slope: -slope,
                intercept,
                first,
                residual,
            });
        }
        first += 1;
    }
}

/// Where the dominant singularity sits relative to the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularCase {
    LeftEndpoint,
    FittedInterior,
    UnfittedInterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `d = 0`
    Hyperbolic,
    /// `d > 0`
    Diffusive,
}

impl Regime {
    pub fn of(d: f64) -> Self {
        if d == 0.0 {
            Regime::Hyperbolic
        } else {
            Regime::Diffusive
        }
    }
}

/// Predicted p-convergence exponent of the dominant singular term.
pub fn predicted_order(case: SingularCase, alpha: f64, m: Regularity, regime: Regime) -> f64 {
    let m = m.value();
    match (case, regime) {
        (SingularCase::LeftEndpoint, Regime::Hyperbolic) => {
            (2.0 * alpha + 1.0).min(alpha + m - 0.5)
        }
        (SingularCase::FittedInterior, Regime::Hyperbolic) => {
            (2.0 * alpha + 0.5).min(alpha + m - 0.5)
        }
        (SingularCase::LeftEndpoint | SingularCase::FittedInterior, Regime::Diffusive) => {
            (2.0 * alpha - 1.5).min(alpha + m - 1.5)
        }
        (SingularCase::UnfittedInterior, Regime::Hyperbolic) => alpha + 0.5,
        (SingularCase::UnfittedInterior, Regime::Diffusive) => alpha - 0.5,
    }
}

/// Relative change below which the error quadrature counts as converged.
pub const QUADRATURE_TOLERANCE: f64 = 1e-3;

fn l2_error_sq<G: Fn(f64) -> f64>(
    field: &BrokenField,
    mesh: &Mesh1D,
    singular_points: &[f64],
    exact: &G,
    j: usize,
    degree: usize,
) -> f64 {
    let (lo, hi) = mesh.element(j);
    let rule = element_rule(singular_points, lo, hi, degree);
    let xs = physical_nodes(&rule, &mesh.map(j));
    let coeffs = field.element(j);
    let half = 0.5 * (hi - lo);
    rule.nodes()
        .iter()
        .zip(rule.weights())
        .zip(&xs)
        .map(|((&xi, &w), &x)| {
            let e = coeffs.eval(xi) - exact(x);
            half * w * e * e
        })
        .sum()
}

/// `sqrt(sum_j int_{I_j} (g_h - g)^2)` for an exact profile `g`.
///
/// The quadrature order is doubled until the result moves by less than
/// [`QUADRATURE_TOLERANCE`] (at most four times).
pub fn l2_error_with<G: Fn(f64) -> f64>(
    field: &BrokenField,
    mesh: &Mesh1D,
    singular_points: &[f64],
    exact: G,
) -> f64 {
    let total = |scale: usize| -> f64 {
        (0..mesh.n_elements())
            .map(|j| {
                l2_error_sq(
                    field,
                    mesh,
                    singular_points,
                    &exact,
                    j,
                    2 * scale * mesh.degree(j).max(1),
                )
            })
            .sum::<f64>()
            .sqrt()
    };
    let mut scale = 1;
    let mut prev = total(scale);
    for _ in 0..4 {
        scale *= 2;
        let next = total(scale);
        let converged = (next - prev).abs() <= QUADRATURE_TOLERANCE * next.abs();
        prev = next;
        if converged {
            break;
        }
    }
    prev
}

/// `||u_h(., T) - u(., T)||_{L2(a, b)}`.
pub fn l2_error_at_t(u_h: &BrokenField, s: &SingularSolution, mesh: &Mesh1D, t: f64) -> f64 {
    l2_error_with(u_h, mesh, &s.singular_points(), |x| s.exact_u(x, t))
}

/// `||q_h - q||_{L2(a, b)}` at one time; singular points are never hit by
/// the graded rule, so `q` is finite at every node.
pub fn q_error_at_t(q_h: &BrokenField, s: &SingularSolution, d: f64, mesh: &Mesh1D, t: f64) -> f64 {
    l2_error_with(q_h, mesh, &s.singular_points(), |x| {
        s.exact_q(d, x, t).unwrap_or(f64::NAN)
    })
}

/// Space-time error `||q - q_h||_{Q_T}` from snapshots at uniform times
/// (trapezoidal rule in time).
pub fn q_error_qt(
    snapshots: &[(f64, BrokenField)],
    s: &SingularSolution,
    d: f64,
    mesh: &Mesh1D,
) -> Result<f64> {
    if d == 0.0 {
        return Err(Error::InvalidForHyperbolic);
    }
    let sq: Vec<(f64, f64)> = snapshots
        .iter()
        .map(|(t, q)| (*t, q_error_at_t(q, s, d, mesh, *t).powi(2)))
        .collect();
    Ok(trapezoid(&sq).sqrt())
}

/// Trapezoidal integral of samples `(t, value)`.
pub fn trapezoid(samples: &[(f64, f64)]) -> f64 {
    samples
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub p: usize,
    pub error_u: f64,
    pub error_q: Option<f64>,
    pub dt_used: f64,
    pub audit_pass: Option<bool>,
}

impl ConvergenceRow {
    /// Quantity the sweep is fitted on: `||u - u_h||(T)` when `q` is not
    /// tracked, `||u - u_h||(T) + ||q - q_h||_{Q_T}` otherwise.
    pub fn metric(&self) -> f64 {
        self.error_u + self.error_q.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub experiment: String,
    pub rows: Vec<ConvergenceRow>,
    pub fitted_slope: f64,
    /// Index of the first row used in the fit.
    pub fit_first: usize,
    pub predicted_slope: f64,
    pub tolerance: f64,
    pub margin: f64,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    /// Fits [`ConvergenceRow::metric`] and compares against `predicted`.
    pub fn from_rows(
        experiment: impl Into<String>,
        rows: Vec<ConvergenceRow>,
        predicted: f64,
        tolerance: f64,
        method: FitMethod,
    ) -> Result<Self> {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.p as f64, r.metric())).collect();
        let fit = method.fit(&pts)?;
        let margin = (fit.slope - predicted).abs();
        let audits_ok = rows.iter().all(|r| r.audit_pass != Some(false));
        Ok(Self {
            experiment: experiment.into(),
            rows,
            fitted_slope: fit.slope,
            fit_first: fit.first,
            predicted_slope: predicted,
            tolerance,
            margin,
            passed: margin <= tolerance && audits_ok,
            notes: Vec::new(),
        })
    }
}
