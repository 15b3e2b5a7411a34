//! L2 and Gauss-Radau projections on the reference element.
//!
//! `Pi_p` is the truncated Legendre series. The Gauss-Radau projections
//! `Pi_p^-` / `Pi_p^+` keep the first `p` Legendre coefficients and pick the
//! top coefficient so the projection interpolates at `xi = 1` / `xi = -1`.

use crate::analysis::{fit_order, FitResult};
use crate::error::Result;
use crate::legendre::{legendre_coeffs, CoeffVector};
use crate::quadrature::{QuadratureRule, RefFunction, Singularity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectionKind {
    L2,
    RadauMinus,
    RadauPlus,
}

impl ProjectionKind {
    pub fn project<F: RefFunction + ?Sized>(
        &self,
        f: &F,
        p: usize,
        quad: &QuadratureRule,
    ) -> CoeffVector {
        match self {
            ProjectionKind::L2 => l2_project(f, p, quad),
            ProjectionKind::RadauMinus => gauss_radau_minus(f, p, quad),
            ProjectionKind::RadauPlus => gauss_radau_plus(f, p, quad),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProjectionKind::L2 => "l2",
            ProjectionKind::RadauMinus => "minus",
            ProjectionKind::RadauPlus => "plus",
        }
    }
}

pub fn l2_project<F: RefFunction + ?Sized>(f: &F, p: usize, quad: &QuadratureRule) -> CoeffVector {
    legendre_coeffs(f, p, quad)
}

/// Degree-`p` polynomial orthogonal to `P_{p-1}` that matches `f(1)`.
pub fn gauss_radau_minus<F: RefFunction + ?Sized>(
    f: &F,
    p: usize,
    quad: &QuadratureRule,
) -> CoeffVector {
    assert!(p >= 1, "Gauss-Radau projections need p >= 1");
    let mut c = legendre_coeffs(f, p, quad);
    let head: f64 = c[..p].iter().sum();
    c[p] = f.eval(1.0) - head;
    c
}

/// Degree-`p` polynomial orthogonal to `P_{p-1}` that matches `f(-1)`.
pub fn gauss_radau_plus<F: RefFunction + ?Sized>(
    f: &F,
    p: usize,
    quad: &QuadratureRule,
) -> CoeffVector {
    assert!(p >= 1, "Gauss-Radau projections need p >= 1");
    let mut c = legendre_coeffs(f, p, quad);
    let head: f64 = c[..p]
        .iter()
        .enumerate()
        .map(|(n, v)| if n % 2 == 0 { *v } else { -v })
        .sum();
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    c[p] = sign * (f.eval(-1.0) - head);
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionErrors {
    pub l2_error: f64,
    pub left_trace_error: f64,
    pub right_trace_error: f64,
}

/// `||f - P||_{L2(-1,1)}` and the endpoint errors of the polynomial `P`.
pub fn projection_errors<F: RefFunction + ?Sized>(
    f: &F,
    proj: &CoeffVector,
    quad: &QuadratureRule,
) -> ProjectionErrors {
    let values = quad.sample(f);
    let sq: f64 = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .zip(values)
        .map(|((&xi, &w), v)| {
            let e = v - proj.eval(xi);
            w * e * e
        })
        .sum();
    ProjectionErrors {
        l2_error: sq.sqrt(),
        left_trace_error: (f.eval(-1.0) - proj.left_trace()).abs(),
        right_trace_error: (f.eval(1.0) - proj.right_trace()).abs(),
    }
}

/// Both sides of the two Gauss-Radau error identities for one projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySides {
    /// `||w - Pi_p^{+-} w||^2`
    pub norm_lhs: f64,
    /// `||w - Pi_p w||^2 + 2/(2p+1) (w'_p/(2p+1) -+ w'_{p+1}/(2p+3))^2`
    pub norm_rhs: f64,
    /// `|(w - Pi_p^{+-} w)(+-1)|` at the endpoint opposite to the interpolated one
    pub trace_lhs: f64,
    /// `2 |w'_p| / (2p + 1)`
    pub trace_rhs: f64,
}

impl IdentitySides {
    pub fn norm_residual(&self) -> f64 {
        (self.norm_lhs - self.norm_rhs).abs()
    }

    pub fn trace_residual(&self) -> f64 {
        (self.trace_lhs - self.trace_rhs).abs()
    }

    /// Residuals relative to the left-hand sides.
    pub fn relative(&self) -> (f64, f64) {
        (
            self.norm_residual() / self.norm_lhs.abs(),
            self.trace_residual() / self.trace_lhs.abs(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub minus: IdentitySides,
    pub plus: IdentitySides,
}

/// Evaluates both identities for `Pi_p^-` and `Pi_p^+`.
///
/// The left-hand sides come from the projections of `f` and pointwise
/// quadrature of the error; the right-hand sides come from the `L2` error
/// and the Legendre coefficients of `fprime`.
pub fn radau_identity_check<F, G>(
    f: &F,
    fprime: &G,
    p: usize,
    quad: &QuadratureRule,
) -> IdentityCheck
where
    F: RefFunction + ?Sized,
    G: RefFunction + ?Sized,
{
    let pi = l2_project(f, p, quad);
    let l2_sq = projection_errors(f, &pi, quad).l2_error.powi(2);
    let dc = legendre_coeffs(fprime, p + 1, quad);
    let pf = p as f64;
    let a = dc[p] / (2.0 * pf + 1.0);
    let b = dc[p + 1] / (2.0 * pf + 3.0);
    let scale = 2.0 / (2.0 * pf + 1.0);
    let trace_rhs = 2.0 * dc[p].abs() / (2.0 * pf + 1.0);

    let minus = gauss_radau_minus(f, p, quad);
    let e_minus = projection_errors(f, &minus, quad);
    let plus = gauss_radau_plus(f, p, quad);
    let e_plus = projection_errors(f, &plus, quad);

    IdentityCheck {
        minus: IdentitySides {
            norm_lhs: e_minus.l2_error.powi(2),
            norm_rhs: l2_sq + scale * (a + b).powi(2),
            trace_lhs: e_minus.left_trace_error,
            trace_rhs,
        },
        plus: IdentitySides {
            norm_lhs: e_plus.l2_error.powi(2),
            norm_rhs: l2_sq + scale * (a - b).powi(2),
            trace_lhs: e_plus.right_trace_error,
            trace_rhs,
        },
    }
}

/// Reference functions with a single algebraic singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceSingular {
    /// `(1 + xi)^alpha`
    LeftPower { alpha: f64 },
    /// `(1 - xi)^alpha`
    RightPower { alpha: f64 },
    /// `|xi - theta|^alpha`
    InteriorAbsPower { alpha: f64, theta: f64 },
}

impl ReferenceSingular {
    pub fn alpha(&self) -> f64 {
        match *self {
            ReferenceSingular::LeftPower { alpha }
            | ReferenceSingular::RightPower { alpha }
            | ReferenceSingular::InteriorAbsPower { alpha, .. } => alpha,
        }
    }

    pub fn singularity(&self) -> Singularity {
        match *self {
            ReferenceSingular::LeftPower { .. } => Singularity::Left,
            ReferenceSingular::RightPower { .. } => Singularity::Right,
            ReferenceSingular::InteriorAbsPower { theta, .. } => Singularity::Interior(theta),
        }
    }

    /// Signed distance to the singular point, from the anchored offset when
    /// the rule is graded toward it.
    fn distance(&self, xi: f64, anchor: Option<(f64, f64)>) -> f64 {
        let at = |sing: f64, direct: f64| match anchor {
            Some((a, off)) if a == sing => off,
            _ => direct,
        };
        match *self {
            ReferenceSingular::LeftPower { .. } => at(-1.0, 1.0 + xi),
            ReferenceSingular::RightPower { .. } => -at(1.0, xi - 1.0),
            ReferenceSingular::InteriorAbsPower { theta, .. } => at(theta, xi - theta),
        }
    }

    fn value_at(&self, dist: f64) -> f64 {
        dist.abs().powf(self.alpha())
    }

    fn deriv_at(&self, dist: f64) -> f64 {
        let a = self.alpha();
        let mag = a * dist.abs().powf(a - 1.0);
        match *self {
            ReferenceSingular::LeftPower { .. } => mag,
            ReferenceSingular::RightPower { .. } => -mag,
            ReferenceSingular::InteriorAbsPower { .. } => {
                if dist < 0.0 {
                    -mag
                } else {
                    mag
                }
            }
        }
    }

    pub fn derivative(&self) -> ReferenceDerivative {
        ReferenceDerivative(*self)
    }

    /// Predicted algebraic decay exponent of `||w - P w||_{L2}`.
    pub fn predicted_l2_rate(&self, kind: ProjectionKind) -> f64 {
        let a = self.alpha();
        match (*self, kind) {
            (ReferenceSingular::InteriorAbsPower { .. }, _) => a + 0.5,
            (ReferenceSingular::LeftPower { .. }, ProjectionKind::RadauPlus)
            | (ReferenceSingular::RightPower { .. }, ProjectionKind::RadauMinus) => 2.0 * a + 0.5,
            _ => 2.0 * a + 1.0,
        }
    }

    /// Predicted decay exponent of the trace error at the endpoint a
    /// Gauss-Radau projection does not interpolate.
    pub fn predicted_trace_rate(&self) -> f64 {
        let a = self.alpha();
        match self {
            ReferenceSingular::InteriorAbsPower { .. } => a + 0.5,
            _ => 2.0 * a,
        }
    }
}

impl RefFunction for ReferenceSingular {
    fn eval(&self, xi: f64) -> f64 {
        self.value_at(self.distance(xi, None))
    }

    fn eval_anchored(&self, xi: f64, anchor: f64, offset: f64) -> f64 {
        self.value_at(self.distance(xi, Some((anchor, offset))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceDerivative(ReferenceSingular);

impl RefFunction for ReferenceDerivative {
    fn eval(&self, xi: f64) -> f64 {
        self.0.deriv_at(self.0.distance(xi, None))
    }

    fn eval_anchored(&self, xi: f64, anchor: f64, offset: f64) -> f64 {
        self.0.deriv_at(self.0.distance(xi, Some((anchor, offset))))
    }
}

/// One row of a projection-rate study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSample {
    pub p: usize,
    pub l2_error: f64,
    /// Error at the endpoint not interpolated (larger endpoint error for `L2`).
    pub trace_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionRate {
    pub samples: Vec<ProjectionSample>,
    pub l2_fit: FitResult,
    pub trace_fit: Result<FitResult>,
    pub predicted_l2: f64,
    pub predicted_trace: f64,
}

/// Errors of `kind` applied to `func` for each degree in `p_list`.
pub fn projection_samples(
    func: &ReferenceSingular,
    kind: ProjectionKind,
    p_list: &[usize],
) -> Vec<ProjectionSample> {
    p_list
        .iter()
        .map(|&p| {
            let quad = QuadratureRule::for_singular(func.singularity(), p + 1);
            let proj = kind.project(func, p, &quad);
            let e = projection_errors(func, &proj, &quad);
            let trace_error = match kind {
                ProjectionKind::RadauMinus => e.left_trace_error,
                ProjectionKind::RadauPlus => e.right_trace_error,
                ProjectionKind::L2 => e.left_trace_error.max(e.right_trace_error),
            };
            ProjectionSample {
                p,
                l2_error: e.l2_error,
                trace_error,
            }
        })
        .collect()
}

/// Measures the `L2` and trace decay rates over `p_list`.
///
/// The two smallest degrees are treated as pre-asymptotic and dropped
/// before the least-squares fit.
pub fn measure_projection_rate(
    func: &ReferenceSingular,
    kind: ProjectionKind,
    p_list: &[usize],
) -> Result<ProjectionRate> {
    let samples = projection_samples(func, kind, p_list);
    let skip = if samples.len() >= 5 { 2 } else { 0 };
    let l2: Vec<(f64, f64)> = samples[skip..]
        .iter()
        .map(|s| (s.p as f64, s.l2_error))
        .collect();
    let tr: Vec<(f64, f64)> = samples[skip..]
        .iter()
        .map(|s| (s.p as f64, s.trace_error))
        .collect();
    let l2_fit = fit_order(&l2)?;
    let trace_fit = fit_order(&tr);
    Ok(ProjectionRate {
        samples,
        l2_fit,
        trace_fit,
        predicted_l2: func.predicted_l2_rate(kind),
        predicted_trace: func.predicted_trace_rate(),
    })
}
