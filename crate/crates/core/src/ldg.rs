//! Semi-discrete LDG operator for `u_t + (c u - d u_x)_x = f`.
//!
//! With `q = sqrt(d) u_x`, on each element `I_j` and for every test mode
//! `L_n`:
//!
//! ```text
//! (q, v)   = -sqrt(d) (u, v_x) - [h_q v]
//! (u_t, v) = (f, v) + (c u - sqrt(d) q, v_x) - [h_u v]
//! ```
//!
//! where `[g v]` is `g(x_j) v(x_j^-) - g(x_{j-1}) v(x_{j-1}^+)`. The traces
//! are upwind in `u` and downwind in `q`. The mass matrix is diagonal and
//! `(w, L_n')` only couples lower modes of opposite parity, so both
//! equations are solved in closed form in `O(p)` per element.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fracfun::{SingularSolution, TimeFactor};
use crate::mesh::{project_function, BrokenField, Mesh1D};
use crate::projection::ProjectionKind;

/// Function of time.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Function of space.
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Function of space and time.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Source term `f(x, t)`.
#[derive(Clone)]
pub enum Forcing {
    Zero,
    /// `f = T'(t) X(x) + T(t) G(x)` with `X`, `G` stored as their elementwise
    /// `L2` projections.
    Separable {
        time: TimeFactor,
        x_part: BrokenField,
        g_part: BrokenField,
    },
    /// General source, projected at every evaluation.
    Pointwise {
        f: SpaceTimeFn,
        singular_points: Vec<f64>,
    },
}

impl fmt::Debug for Forcing {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Zero => write!(fm, "Zero"),
            Forcing::Separable { time, .. } => write!(fm, "Separable({time:?})"),
            Forcing::Pointwise {
                singular_points, ..
            } => write!(fm, "Pointwise({singular_points:?})"),
        }
    }
}

impl Forcing {
    /// Adds the `L2` coefficients of `f(., t)` to `out`.
    fn add_coefficients(&self, mesh: &Mesh1D, t: f64, out: &mut BrokenField) {
        match self {
            Forcing::Zero => {}
            Forcing::Separable {
                time,
                x_part,
                g_part,
            } => {
                out.axpy(time.deriv(t), x_part);
                out.axpy(time.value(t), g_part);
            }
            Forcing::Pointwise { f, singular_points } => {
                let proj = project_function(mesh, singular_points, ProjectionKind::L2, |x| f(x, t));
                out.axpy(1.0, &proj);
            }
        }
    }
}

/// Convection-diffusion problem on a fixed mesh.
#[derive(Clone)]
pub struct LdgProblem {
    pub c: f64,
    pub d: f64,
    pub t_final: f64,
    pub mesh: Mesh1D,
    pub g_a: TimeFn,
    /// Unused when `d = 0`.
    pub g_b: TimeFn,
    pub u_ic: SpaceFn,
    /// Points where `u_ic` is not smooth (used for quadrature grading).
    pub ic_singular_points: Vec<f64>,
    pub forcing: Forcing,
}

impl fmt::Debug for LdgProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LdgProblem")
            .field("c", &self.c)
            .field("d", &self.d)
            .field("t_final", &self.t_final)
            .field("mesh", &self.mesh)
            .field("forcing", &self.forcing)
            .finish_non_exhaustive()
    }
}

impl LdgProblem {
    /// Problem with zero data; set the fields to customize.
    pub fn new(c: f64, d: f64, t_final: f64, mesh: Mesh1D) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "convection speed must be positive, got {c}"
            )));
        }
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "diffusion must be non-negative, got {d}"
            )));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "final time must be positive, got {t_final}"
            )));
        }
        Ok(Self {
            c,
            d,
            t_final,
            mesh,
            g_a: Arc::new(|_| 0.0),
            g_b: Arc::new(|_| 0.0),
            u_ic: Arc::new(|_| 0.0),
            ic_singular_points: Vec::new(),
            forcing: Forcing::Zero,
        })
    }

    /// Manufactured problem whose exact solution is `s`.
    pub fn from_solution(
        s: &SingularSolution,
        c: f64,
        d: f64,
        t_final: f64,
        mesh: Mesh1D,
    ) -> Result<Self> {
        let mut prob = Self::new(c, d, t_final, mesh)?;
        if d > 0.0 && s.alpha <= 1.0 {
            return Err(Error::InvalidProblem(format!(
                "u_xx is not integrable for alpha = {} <= 1 when d > 0",
                s.alpha
            )));
        }
        let (a, b) = (prob.mesh.a(), prob.mesh.b());
        let sing = s.singular_points();
        let time = s.time_factor();
        let s0 = *s;
        let x_part = project_function(&prob.mesh, &sing, ProjectionKind::L2, |x| {
            s0.forcing_parts(c, d, x).map(|v| v.0).unwrap_or(f64::NAN)
        });
        let g_part = project_function(&prob.mesh, &sing, ProjectionKind::L2, |x| {
            s0.forcing_parts(c, d, x).map(|v| v.1).unwrap_or(f64::NAN)
        });
        if !x_part.is_finite() || !g_part.is_finite() {
            return Err(Error::InvalidProblem(
                "forcing could not be integrated".into(),
            ));
        }
        let xa = s.spatial(a, 0)?;
        let xb = s.spatial(b, 0)?;
        prob.g_a = Arc::new(move |t| xa * time.value(t));
        prob.g_b = Arc::new(move |t| xb * time.value(t));
        prob.u_ic = Arc::new(move |x| s0.exact_u(x, 0.0));
        prob.ic_singular_points = sing;
        prob.forcing = Forcing::Separable {
            time,
            x_part,
            g_part,
        };
        Ok(prob)
    }

    fn sqrt_d(&self) -> f64 {
        self.d.sqrt()
    }

    pub fn flux_state(&self) -> FluxState {
        let m = self.mesh.n_elements() - 1;
        FluxState {
            c11: penalty_c11(self.c, self.d, self.mesh.degree(m), self.mesh.width(m)),
        }
    }
}

/// Boundary penalty of the outflow flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxState {
    pub c11: f64,
}

/// `c11(b) = max{c/2, max{1, p_M} d / h_M}`.
pub fn penalty_c11(c: f64, d: f64, p_m: usize, h_m: f64) -> f64 {
    (0.5 * c).max(p_m.max(1) as f64 * d / h_m)
}

/// `out_n += scale * (2n + 1) * sum_{m < n, m + n odd} 2 w_m`, i.e. the
/// stiffness pairing `(w, L_n')` on the reference element.
fn add_stiffness(w: &[f64], scale: f64, out: &mut [f64]) {
    let (mut even, mut odd) = (0.0, 0.0);
    for n in 0..out.len() {
        let s = if n % 2 == 0 { odd } else { even };
        out[n] += scale * (2 * n + 1) as f64 * 2.0 * s;
        if n < w.len() {
            if n % 2 == 0 {
                even += w[n];
            } else {
                odd += w[n];
            }
        }
    }
}

/// `out_n -= scale * (2n + 1) * (right - left (-1)^n)`.
fn add_boundary(left: f64, right: f64, scale: f64, out: &mut [f64]) {
    for (n, o) in out.iter_mut().enumerate() {
        let l = if n % 2 == 0 { left } else { -left };
        *o -= scale * (2 * n + 1) as f64 * (right - l);
    }
}

/// Auxiliary variable `q_h` for the state `u` at time `t`.
pub fn recover_q(u: &BrokenField, prob: &LdgProblem, t: f64) -> BrokenField {
    let mesh = &prob.mesh;
    let mut q = BrokenField::zeros(mesh);
    if prob.d == 0.0 {
        return q;
    }
    let sd = prob.sqrt_d();
    let last = mesh.n_elements() - 1;
    for j in 0..=last {
        let scale = 1.0 / mesh.width(j);
        // h_q = -sqrt(d) * (u from the left, with boundary data at the ends)
        let left = if j == 0 {
            (prob.g_a)(t)
        } else {
            u.right_trace(j - 1)
        };
        let right = if j == last {
            (prob.g_b)(t)
        } else {
            u.right_trace(j)
        };
        let out = q.element_mut(j);
        add_stiffness(u.element(j), -sd * scale, out);
        add_boundary(-sd * left, -sd * right, scale, out);
    }
    q
}

/// `du_h/dt` for the state `u` at time `t`.
pub fn rhs(u: &BrokenField, prob: &LdgProblem, t: f64) -> BrokenField {
    let q = recover_q(u, prob, t);
    rhs_with_q(u, &q, prob, t)
}

/// As [`rhs`], with a precomputed `q_h`.
pub fn rhs_with_q(u: &BrokenField, q: &BrokenField, prob: &LdgProblem, t: f64) -> BrokenField {
    let mesh = &prob.mesh;
    let (c, sd) = (prob.c, prob.sqrt_d());
    let last = mesh.n_elements() - 1;
    let mut out = BrokenField::zeros(mesh);
    prob.forcing.add_coefficients(mesh, t, &mut out);

    // h_u at node i (0..=M).
    let flux_at = |i: usize| -> f64 {
        if i == 0 {
            c * (prob.g_a)(t) - sd * q.left_trace(0)
        } else if i == last + 1 {
            let ub = u.right_trace(last);
            let u_hat = if prob.d == 0.0 {
                c * ub
            } else {
                c * ub - prob.flux_state().c11 * ((prob.g_b)(t) - ub)
            };
            u_hat - sd * q.right_trace(last)
        } else {
            c * u.right_trace(i - 1) - sd * q.left_trace(i)
        }
    };

    let mut w = Vec::new();
    let mut left = flux_at(0);
    for j in 0..=last {
        let right = flux_at(j + 1);
        let scale = 1.0 / mesh.width(j);
        w.clear();
        w.extend(
            u.element(j)
                .iter()
                .zip(q.element(j).iter())
                .map(|(a, b)| c * a - sd * b),
        );
        let o = out.element_mut(j);
        add_stiffness(&w, scale, o);
        add_boundary(left, right, scale, o);
        left = right;
    }
    out
}

/// Elementwise `L2` projection of the initial data.
pub fn project_initial(prob: &LdgProblem) -> BrokenField {
    let f = prob.u_ic.clone();
    project_function(
        &prob.mesh,
        &prob.ic_singular_points,
        ProjectionKind::L2,
        move |x| f(x),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::{eval_legendre, eval_legendre_deriv, CoeffVector};
    use crate::quadrature::QuadratureRule;

    fn single(p: usize, c: f64, d: f64) -> LdgProblem {
        LdgProblem::new(c, d, 1.0, Mesh1D::uniform(0.0, 1.0, 1, p).unwrap()).unwrap()
    }

    fn field(mesh: &Mesh1D, v: &[f64]) -> BrokenField {
        let mut f = BrokenField::zeros(mesh);
        for (a, b) in f.coeffs_mut().zip(v) {
            *a = *b;
        }
        f
    }

    #[test]
    fn hyperbolic_q_is_zero() {
        let prob = single(3, 1.0, 0.0);
        let u = field(&prob.mesh, &[1.0, -2.0, 0.5, 3.0]);
        assert!(recover_q(&u, &prob, 0.0).coeffs().all(|v| *v == 0.0));
    }

    #[test]
    fn q_of_linear_profile() {
        let mut prob = single(2, 1.0, 1.0);
        prob.g_a = Arc::new(|_| 0.0);
        prob.g_b = Arc::new(|_| 1.0);
        let u = field(&prob.mesh, &[0.5, 0.5, 0.0]);
        let q = recover_q(&u, &prob, 0.0);
        let want = [1.0, 0.0, 0.0];
        for (a, b) in q.coeffs().zip(want) {
            assert!((a - b).abs() < 1e-14, "{q:?}");
        }
    }

    #[test]
    fn q_of_constant_is_zero() {
        let mut prob =
            LdgProblem::new(1.0, 1.0, 1.0, Mesh1D::uniform(0.0, 1.0, 3, 2).unwrap()).unwrap();
        prob.g_a = Arc::new(|_| 2.5);
        prob.g_b = Arc::new(|_| 2.5);
        let mut u = BrokenField::zeros(&prob.mesh);
        for j in 0..3 {
            u.element_mut(j)[0] = 2.5;
        }
        assert!(recover_q(&u, &prob, 0.0).coeffs().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn constant_inflow_is_steady() {
        let mut prob =
            LdgProblem::new(0.7, 0.0, 1.0, Mesh1D::uniform(0.0, 1.0, 4, 3).unwrap()).unwrap();
        prob.g_a = Arc::new(|_| 1.3);
        let mut u = BrokenField::zeros(&prob.mesh);
        for j in 0..4 {
            u.element_mut(j)[0] = 1.3;
        }
        assert!(rhs(&u, &prob, 0.0).coeffs().all(|v| v.abs() < 1e-14));
    }

    /// Dense assembly with the basis evaluated by quadrature on (0, 1).
    #[test]
    fn single_element_hand_assembly() {
        let prob = single(1, 1.0, 0.0);
        let u = field(&prob.mesh, &[1.0, 1.0]);
        let got = rhs(&u, &prob, 0.0);
        let q = QuadratureRule::gauss_legendre(4);
        // phi_k(x) = L_k(2x - 1) on (0, 1); M_kn = int phi_k phi_n,
        // K_kn = int phi_k phi_n'
        let mut m = [[0.0; 2]; 2];
        let mut k = [[0.0; 2]; 2];
        for (&xi, &w) in q.nodes().iter().zip(q.weights()) {
            for a in 0..2 {
                for b in 0..2 {
                    m[a][b] += 0.5 * w * eval_legendre(a, xi) * eval_legendre(b, xi);
                    k[a][b] += 0.5 * w * eval_legendre(a, xi) * 2.0 * eval_legendre_deriv(b, xi);
                }
            }
        }
        // (u_t, v) = (u, v_x) - u(1^-) v(1) + g_a v(0); g_a = 0.
        let u_right = 2.0;
        let mut b = [0.0; 2];
        for n in 0..2 {
            b[n] = k[0][n] * 1.0 + k[1][n] * 1.0 - u_right * 1.0;
        }
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let x0 = (b[0] * m[1][1] - m[0][1] * b[1]) / det;
        let x1 = (m[0][0] * b[1] - m[1][0] * b[0]) / det;
        assert!((got.element(0)[0] - x0).abs() < 1e-13 && (got.element(0)[1] - x1).abs() < 1e-13);
        assert!((x0 + 2.0).abs() < 1e-13 && x1.abs() < 1e-13);
    }

    #[test]
    fn upwind_locality() {
        let prob =
            LdgProblem::new(1.0, 0.0, 1.0, Mesh1D::uniform(0.0, 1.0, 4, 3).unwrap()).unwrap();
        let vals: Vec<f64> = (0..16).map(|k| (k as f64 * 0.37).sin()).collect();
        let u = field(&prob.mesh, &vals);
        let base = rhs(&u, &prob, 0.0);
        let mut v = u.clone();
        for c in v.element_mut(3).iter_mut() {
            *c += 0.5;
        }
        let pert = rhs(&v, &prob, 0.0);
        for j in 0..3 {
            assert_eq!(base.element(j), pert.element(j));
        }
        assert_ne!(base.element(3), pert.element(3));
    }

    #[test]
    fn linear_in_the_state() {
        let prob =
            LdgProblem::new(0.4, 0.2, 1.0, Mesh1D::uniform(0.0, 1.0, 3, 4).unwrap()).unwrap();
        let a: Vec<f64> = (0..15).map(|k| (k as f64 * 0.71).cos()).collect();
        let b: Vec<f64> = (0..15).map(|k| (k as f64 * 1.3).sin()).collect();
        let (ua, ub) = (field(&prob.mesh, &a), field(&prob.mesh, &b));
        let mut comb = ua.clone();
        comb.lincomb(2.0, -3.0, &ub);
        let mut want = rhs(&ua, &prob, 0.0);
        want.lincomb(2.0, -3.0, &rhs(&ub, &prob, 0.0));
        for (x, y) in rhs(&comb, &prob, 0.0).coeffs().zip(want.coeffs()) {
            assert!((x - y).abs() < 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn penalty_is_monotone() {
        assert_eq!(penalty_c11(1.0, 0.0, 5, 0.25), 0.5);
        let mut prev = 0.0;
        for p in 0..10 {
            let v = penalty_c11(0.1, 0.1, p, 0.25);
            assert!(v >= prev && v >= 0.05);
            prev = v;
        }
        assert!(penalty_c11(0.1, 0.2, 4, 0.25) >= penalty_c11(0.1, 0.1, 4, 0.25));
    }

    #[test]
    fn consistent_for_smooth_solution() {
        let s = SingularSolution::smooth();
        for d in [0.0, 0.1] {
            let mesh = Mesh1D::uniform(0.0, 1.0, 4, 12).unwrap();
            let prob = LdgProblem::from_solution(&s, 1.0, d, 1.0, mesh.clone()).unwrap();
            let t = 0.4;
            let u = crate::mesh::project_exact(&s, &mesh, t, ProjectionKind::L2).unwrap();
            let got = rhs(&u, &prob, t);
            // u_t = -u for the decaying time factor
            let mut want = u.clone();
            want.scale(-1.0);
            let mut diff = got.clone();
            diff.axpy(-1.0, &want);
            assert!(
                diff.l2_norm(&mesh) < 1e-8,
                "d = {d}: {}",
                diff.l2_norm(&mesh)
            );
        }
    }

    #[test]
    fn initial_projection() {
        let mut prob = single(3, 1.0, 0.0);
        assert!(project_initial(&prob).coeffs().all(|v| *v == 0.0));
        prob.u_ic = Arc::new(|x| 1.0 + x * x);
        let c = CoeffVector(project_initial(&prob).element(0).to_vec());
        // 1 + x^2 with x = (1 + xi)/2
        for &xi in &[-0.8, 0.1, 0.9] {
            let x: f64 = 0.5 * (1.0 + xi);
            assert!((c.eval(xi) - (1.0 + x * x)).abs() < 1e-14);
        }
        let s = SingularSolution::power_left(std::f64::consts::PI).unwrap();
        let p =
            LdgProblem::from_solution(&s, 0.1, 0.0, 1.0, Mesh1D::uniform(0.0, 1.0, 4, 6).unwrap())
                .unwrap();
        assert!(project_initial(&p).coeffs().all(|v| *v == 0.0));
    }
}
