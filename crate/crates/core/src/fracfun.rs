//! Manufactured solutions with algebraic singularities.
//!
//! Every solution in the catalog separates as `u(x, t) = X(x) T(t)`, so the
//! forcing `f = u_t + c u_x - d u_xx` is `X T' + T (c X' - d X'')`. The LDG
//! operator exploits this to precompute forcing moments once per mesh.
//!
//! The fractional semi-norms are evaluated from closed-form Caputo
//! derivatives: near a singular point `u = y^alpha g(y)` with `g` entire, and
//! the Caputo derivative of `y^(alpha + j)` is `Gamma(alpha + j + 1)/j! y^j`,
//! so `D^alpha u` is a power series in `y` built from the Taylor
//! coefficients of `g`.

use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// Regularity index `m` of the Caputo derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Finite(u32),
    Unbounded,
}

impl Regularity {
    pub fn value(&self) -> f64 {
        match *self {
            Regularity::Finite(m) => m as f64,
            Regularity::Unbounded => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionKind {
    /// `x^alpha t`
    PowerLeft,
    /// `x^alpha e^{2 + sin x - t}`
    PowerLeftModulated,
    /// `(x^alpha - (x - zeta)_+^alpha) t / Gamma(alpha + 1)`, the
    /// Riemann-Liouville integral of order alpha of `H(zeta - x) t`.
    FracIntHeaviside { zeta: f64 },
    /// `|x - theta|^alpha e^{2 + sin x - t}`
    AbsPowerInterior { theta: f64 },
    /// `sin(2 pi x) e^{-t}`
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeFactor {
    /// `T(t) = t`
    Linear,
    /// `T(t) = e^{-t}`
    Decay,
}

impl TimeFactor {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeFactor::Linear => t,
            TimeFactor::Decay => (-t).exp(),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            TimeFactor::Linear => 1.0,
            TimeFactor::Decay => -(-t).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSolution {
    pub kind: SolutionKind,
    pub alpha: f64,
    pub m: Regularity,
}

/// Which fractional semi-norm a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeminormVariant {
    /// `U_{a+}^{alpha,m}` with the singular point at the element's left end.
    LeftEndpoint,
    /// `U_{b-}^{alpha,m}` with the singular point at the element's right end.
    RightEndpoint,
    /// `U_theta^alpha` for a singular point strictly inside the element.
    Interior,
    /// Integer limit `alpha -> k`: `||u^(k)||_{L1} + sum_{i<k} |u^(i)(a+)|`.
    Sobolev { k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracSeminormValue {
    pub value: f64,
    pub variant: SeminormVariant,
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() < 1e-12
}

impl SingularSolution {
    pub fn new(kind: SolutionKind, alpha: f64) -> Result<Self> {
        let m = match kind {
            SolutionKind::FracIntHeaviside { .. } => Regularity::Finite(1),
            _ => Regularity::Unbounded,
        };
        let s = Self { kind, alpha, m };
        s.validate()?;
        Ok(s)
    }

    pub fn power_left(alpha: f64) -> Result<Self> {
        Self::new(SolutionKind::PowerLeft, alpha)
    }

    pub fn power_left_modulated(alpha: f64) -> Result<Self> {
        Self::new(SolutionKind::PowerLeftModulated, alpha)
    }

    pub fn frac_int_heaviside(alpha: f64, zeta: f64) -> Result<Self> {
        Self::new(SolutionKind::FracIntHeaviside { zeta }, alpha)
    }

    pub fn abs_power_interior(alpha: f64, theta: f64) -> Result<Self> {
        Self::new(SolutionKind::AbsPowerInterior { theta }, alpha)
    }

    pub fn smooth() -> Self {
        Self {
            kind: SolutionKind::Smooth,
            alpha: f64::INFINITY,
            m: Regularity::Unbounded,
        }
    }

    pub fn with_m(mut self, m: Regularity) -> Self {
        self.m = m;
        self
    }

    fn validate(&self) -> Result<()> {
        if matches!(self.kind, SolutionKind::Smooth) {
            return Ok(());
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "singularity exponent must be positive, got {}",
                self.alpha
            )));
        }
        if is_integer(self.alpha) {
            return Err(Error::InvalidProblem(format!(
                "singularity exponent must be non-integer, got {}",
                self.alpha
            )));
        }
        match self.kind {
            SolutionKind::FracIntHeaviside { zeta } if !(zeta > 0.0) => Err(Error::InvalidProblem(
                format!("Heaviside kink must satisfy zeta > 0, got {zeta}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn time_factor(&self) -> TimeFactor {
        match self.kind {
            SolutionKind::PowerLeft | SolutionKind::FracIntHeaviside { .. } => TimeFactor::Linear,
            _ => TimeFactor::Decay,
        }
    }

    /// Points where the spatial profile is not smooth.
    pub fn singular_points(&self) -> Vec<f64> {
        match self.kind {
            SolutionKind::PowerLeft | SolutionKind::PowerLeftModulated => vec![0.0],
            SolutionKind::FracIntHeaviside { zeta } => vec![0.0, zeta],
            SolutionKind::AbsPowerInterior { theta } => vec![theta],
            SolutionKind::Smooth => vec![],
        }
    }

    /// `d^order X / dx^order` for `order <= 2`.
    pub fn spatial(&self, x: f64, order: u32) -> Result<f64> {
        let a = self.alpha;
        match self.kind {
            SolutionKind::PowerLeft => power_deriv(x, a, order),
            SolutionKind::PowerLeftModulated => {
                let (g0, g1, g2) = modulation(x);
                product_deriv(x, a, order, (g0, g1, g2), 1.0)
            }
            SolutionKind::FracIntHeaviside { zeta } => {
                let left = power_deriv(x, a, order)?;
                let right = if x > zeta {
                    power_deriv(x - zeta, a, order)?
                } else if x == zeta {
                    power_deriv(0.0, a, order)
                        .map_err(|_| Error::SingularPointEvaluation { x, order })?
                } else {
                    0.0
                };
                Ok((left - right) / gamma(a + 1.0))
            }
            SolutionKind::AbsPowerInterior { theta } => {
                let (g0, g1, g2) = modulation(x);
                let s = x - theta;
                let sign = if s < 0.0 { -1.0 } else { 1.0 };
                product_deriv(s.abs(), a, order, (g0, g1, g2), sign)
                    .map_err(|_| Error::SingularPointEvaluation { x, order })
            }
            SolutionKind::Smooth => {
                let w = 2.0 * PI;
                Ok(match order {
                    0 => (w * x).sin(),
                    1 => w * (w * x).cos(),
                    2 => -w * w * (w * x).sin(),
                    _ => unreachable!("only derivatives up to order 2 are provided"),
                })
            }
        }
        .map_err(|e| match e {
            Error::SingularPointEvaluation { order, .. } => {
                Error::SingularPointEvaluation { x, order }
            }
            other => other,
        })
    }

    pub fn exact_u(&self, x: f64, t: f64) -> f64 {
        self.spatial(x, 0)
            .expect("solution values are bounded everywhere")
            * self.time_factor().value(t)
    }

    /// `q = sqrt(d) u_x`.
    pub fn exact_q(&self, d: f64, x: f64, t: f64) -> Result<f64> {
        if d == 0.0 {
            return Ok(0.0);
        }
        Ok(d.sqrt() * self.spatial(x, 1)? * self.time_factor().value(t))
    }

    /// `f = u_t + c u_x - d u_xx`.
    pub fn forcing(&self, c: f64, d: f64, x: f64, t: f64) -> Result<f64> {
        let tf = self.time_factor();
        let mut f = self.spatial(x, 0)? * tf.deriv(t);
        let mut flux = 0.0;
        if c != 0.0 {
            flux += c * self.spatial(x, 1)?;
        }
        if d != 0.0 {
            flux -= d * self.spatial(x, 2)?;
        }
        f += flux * tf.value(t);
        Ok(f)
    }

    /// Spatial part of the forcing split as `(X, c X' - d X'')`, so that
    /// `f = T'(t) X + T(t) (c X' - d X'')`.
    pub fn forcing_parts(&self, c: f64, d: f64, x: f64) -> Result<(f64, f64)> {
        let mut flux = 0.0;
        if c != 0.0 {
            flux += c * self.spatial(x, 1)?;
        }
        if d != 0.0 {
            flux -= d * self.spatial(x, 2)?;
        }
        Ok((self.spatial(x, 0)?, flux))
    }

    /// Fractional semi-norm of `u(., t)` on `element = (lo, hi)`.
    ///
    /// The variant follows from where the singular point sits relative to
    /// the element; `NotInSpace` is returned when no variant applies.
    pub fn seminorm(&self, t: f64, element: (f64, f64)) -> Result<FracSeminormValue> {
        let (lo, hi) = element;
        if !(hi > lo) {
            return Err(Error::InvalidMesh(format!("empty element ({lo}, {hi})")));
        }
        let tf = self.time_factor().value(t).abs();
        let a = self.alpha;
        let m_endpoint = match self.m {
            Regularity::Finite(m) => m,
            Regularity::Unbounded => (a + 1.5).ceil() as u32,
        };
        let not_in_space = |why: &str| Err(Error::NotInSpace(format!("{:?}: {why}", self.kind)));
        match self.kind {
            SolutionKind::PowerLeft | SolutionKind::PowerLeftModulated => {
                if lo != 0.0 {
                    return not_in_space(
                        "left-endpoint variant requires the element to start at 0",
                    );
                }
                let taylor = match self.kind {
                    SolutionKind::PowerLeft => {
                        let mut v = vec![0.0; SERIES_TERMS];
                        v[0] = 1.0;
                        v
                    }
                    _ => modulation_taylor(0.0, 1.0),
                };
                let series = caputo_series(a, &taylor);
                Ok(FracSeminormValue {
                    value: tf * endpoint_seminorm(&series, m_endpoint, hi - lo),
                    variant: SeminormVariant::LeftEndpoint,
                })
            }
            SolutionKind::FracIntHeaviside { zeta } => {
                if lo != 0.0 {
                    return not_in_space(
                        "left-endpoint variant requires the element to start at 0",
                    );
                }
                // D^alpha u = H(zeta - x) T(t): piecewise constant with one jump.
                let trace = if zeta > lo { tf } else { 0.0 };
                let jump = if zeta > lo && zeta < hi { tf } else { 0.0 };
                match m_endpoint {
                    0 => Ok(FracSeminormValue {
                        value: tf * (zeta.min(hi) - lo).max(0.0),
                        variant: SeminormVariant::LeftEndpoint,
                    }),
                    1 => Ok(FracSeminormValue {
                        value: jump + trace,
                        variant: SeminormVariant::LeftEndpoint,
                    }),
                    _ if jump == 0.0 => Ok(FracSeminormValue {
                        value: trace,
                        variant: SeminormVariant::LeftEndpoint,
                    }),
                    _ => not_in_space("the Caputo derivative jumps inside the element, so m <= 1"),
                }
            }
            SolutionKind::AbsPowerInterior { theta } => {
                if theta == lo {
                    let series = caputo_series(a, &modulation_taylor(theta, 1.0));
                    Ok(FracSeminormValue {
                        value: tf * endpoint_seminorm(&series, m_endpoint, hi - lo),
                        variant: SeminormVariant::LeftEndpoint,
                    })
                } else if theta == hi {
                    let series = caputo_series(a, &modulation_taylor(theta, -1.0));
                    Ok(FracSeminormValue {
                        value: tf * endpoint_seminorm(&series, m_endpoint, hi - lo),
                        variant: SeminormVariant::RightEndpoint,
                    })
                } else if theta > lo && theta < hi {
                    let left = caputo_series(a, &modulation_taylor(theta, -1.0));
                    let right = caputo_series(a, &modulation_taylor(theta, 1.0));
                    let value = endpoint_seminorm(&left, 1, theta - lo)
                        + endpoint_seminorm(&right, 1, hi - theta);
                    Ok(FracSeminormValue {
                        value: tf * value,
                        variant: SeminormVariant::Interior,
                    })
                } else {
                    not_in_space("the singular point lies outside the element")
                }
            }
            SolutionKind::Smooth => {
                let k = 2u32;
                let quad = QuadratureRule::gauss_legendre(40);
                let half = 0.5 * (hi - lo);
                let l1: f64 = quad
                    .nodes()
                    .iter()
                    .zip(quad.weights())
                    .map(|(&xi, &w)| {
                        w * half * self.spatial(lo + half * (1.0 + xi), k).unwrap().abs()
                    })
                    .sum();
                let traces: f64 = (0..k).map(|i| self.spatial(lo, i).unwrap().abs()).sum();
                Ok(FracSeminormValue {
                    value: tf * (l1 + traces),
                    variant: SeminormVariant::Sobolev { k },
                })
            }
        }
    }
}

/// Left Caputo derivative of a power, `D^alpha_{0+} x^beta`.
///
/// Powers below the integer order `ceil(alpha)` that are integers are
/// annihilated; otherwise `Gamma(beta + 1)/Gamma(beta - alpha + 1) x^(beta - alpha)`.
pub fn caputo_left(beta: f64, alpha: f64, x: f64) -> Result<f64> {
    if !(beta > -1.0) || !(alpha > 0.0) || !(x > 0.0) {
        return Err(Error::FractionalDomain(format!(
            "need beta > -1, alpha > 0, x > 0 (got beta = {beta}, alpha = {alpha}, x = {x})"
        )));
    }
    let k = alpha.ceil();
    if is_integer(beta) && beta.round() < k {
        return Ok(0.0);
    }
    let shifted = beta - alpha + 1.0;
    if shifted <= 0.0 && is_integer(shifted) {
        return Err(Error::FractionalDomain(format!(
            "Gamma({shifted}) has a pole: D^{alpha} x^{beta} is undefined"
        )));
    }
    if !is_integer(beta) && beta <= k - 1.0 && beta <= alpha - 1.0 {
        return Err(Error::FractionalDomain(format!(
            "x^{beta} is not regular enough for a Caputo derivative of order {alpha}"
        )));
    }
    Ok(gamma(beta + 1.0) / gamma(shifted) * x.powf(beta - alpha))
}

/// `d^k/dy^k y^e` for `y >= 0`.
fn power_deriv(y: f64, e: f64, k: u32) -> Result<f64> {
    let mut coeff = 1.0;
    for i in 0..k {
        coeff *= e - i as f64;
    }
    let expo = e - k as f64;
    if y == 0.0 {
        if expo > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::SingularPointEvaluation { x: y, order: k });
    }
    Ok(coeff * y.powf(expo))
}

/// Derivatives of `y^alpha g` where `y = |x - theta|`, `g` given with its
/// derivatives in x and `sign = dy/dx`.
fn product_deriv(y: f64, alpha: f64, order: u32, g: (f64, f64, f64), sign: f64) -> Result<f64> {
    let (g0, g1, g2) = g;
    Ok(match order {
        0 => power_deriv(y, alpha, 0)? * g0,
        1 => sign * power_deriv(y, alpha, 1)? * g0 + power_deriv(y, alpha, 0)? * g1,
        2 => {
            power_deriv(y, alpha, 2)? * g0
                + 2.0 * sign * power_deriv(y, alpha, 1)? * g1
                + power_deriv(y, alpha, 0)? * g2
        }
        _ => unreachable!("only derivatives up to order 2 are provided"),
    })
}

/// `g = e^{2 + sin x}` with its first two derivatives.
fn modulation(x: f64) -> (f64, f64, f64) {
    let g = (2.0 + x.sin()).exp();
    let c = x.cos();
    (g, c * g, (c * c - x.sin()) * g)
}

const SERIES_TERMS: usize = 48;

/// Taylor coefficients in `y` of `e^{2 + sin(x0 + dir * y)}`.
fn modulation_taylor(x0: f64, dir: f64) -> Vec<f64> {
    let n = SERIES_TERMS;
    // sin(x0 + dir y) = sin x0 cos(dir y) + cos x0 sin(dir y)
    let (sx, cx) = x0.sin_cos();
    let mut fact = 1.0;
    let mut s: Vec<f64> = (0..n)
        .map(|j| {
            if j > 0 {
                fact *= j as f64;
            }
            let v = match j % 4 {
                0 => sx,
                1 => cx,
                2 => -sx,
                _ => -cx,
            };
            v * dir.powi(j as i32) / fact
        })
        .collect();
    s[0] += 2.0;
    // h = exp(s): h_0 = e^{s_0}, n h_n = sum_{k=1}^{n} k s_k h_{n-k}
    let mut h = vec![0.0; n];
    h[0] = s[0].exp();
    for j in 1..n {
        let acc: f64 = (1..=j).map(|k| k as f64 * s[k] * h[j - k]).sum();
        h[j] = acc / j as f64;
    }
    h
}

/// Coefficients `b_j` of `D^alpha (y^alpha sum a_j y^j) = sum_j b_j y^j`.
fn caputo_series(alpha: f64, taylor: &[f64]) -> Vec<f64> {
    taylor
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let jf = j as f64;
            a * (ln_gamma(alpha + jf + 1.0) - ln_gamma(jf + 1.0)).exp()
        })
        .collect()
}

/// `||D^m P||_{L1(0, len)} + sum_{i<m} |D^i P(0)|` for the series `P`.
fn endpoint_seminorm(series: &[f64], m: u32, len: f64) -> f64 {
    let mut poly = series.to_vec();
    let mut traces = 0.0;
    for _ in 0..m {
        traces += poly.first().copied().unwrap_or(0.0).abs();
        poly = poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| j as f64 * c)
            .collect();
    }
    if poly.is_empty() {
        return traces;
    }
    let quad = QuadratureRule::gauss_legendre(40);
    let panels = 8;
    let width = len / panels as f64;
    let mut l1 = 0.0;
    for k in 0..panels {
        let lo = k as f64 * width;
        for (&xi, &w) in quad.nodes().iter().zip(quad.weights()) {
            let y = lo + 0.5 * width * (1.0 + xi);
            let v = poly.iter().rev().fold(0.0, |acc, c| acc * y + c);
            l1 += 0.5 * width * w * v.abs();
        }
    }
    l1 + traces
}
