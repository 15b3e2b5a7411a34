//! Third-order TVD Runge-Kutta time stepping.

use crate::error::{Error, Result};
use crate::ldg::{project_initial, recover_q, rhs, LdgProblem};
use crate::mesh::BrokenField;

/// Default safety factor of the step rule.
pub const DEFAULT_CFL: f64 = 0.5;
/// Relative change in the final error that the halving audit tolerates.
pub const AUDIT_TOLERANCE: f64 = 0.01;

/// State that the Runge-Kutta stages can combine.
pub trait RkState: Clone {
    /// `self = a * self + b * other`
    fn lincomb(&mut self, a: f64, b: f64, other: &Self);
    fn all_finite(&self) -> bool;
}

impl RkState for BrokenField {
    fn lincomb(&mut self, a: f64, b: f64, other: &Self) {
        BrokenField::lincomb(self, a, b, other);
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl RkState for f64 {
    fn lincomb(&mut self, a: f64, b: f64, other: &Self) {
        *self = a * *self + b * other;
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl RkState for Vec<f64> {
    fn lincomb(&mut self, a: f64, b: f64, other: &Self) {
        for (x, y) in self.iter_mut().zip(other) {
            *x = a * *x + b * y;
        }
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// One Shu-Osher step; stages are evaluated at `t`, `t + dt`, `t + dt/2`.
pub fn tvd_rk3_step<S, L>(u: &S, t: f64, dt: f64, op: L) -> Result<S>
where
    S: RkState,
    L: Fn(&S, f64) -> S,
{
    assert!(dt > 0.0, "time step must be positive");
    let mut u1 = u.clone();
    u1.lincomb(1.0, dt, &op(u, t));

    let mut u2 = u1.clone();
    u2.lincomb(1.0, dt, &op(&u1, t + dt));
    u2.lincomb(0.25, 0.75, u);

    let mut next = u2.clone();
    next.lincomb(1.0, dt, &op(&u2, t + 0.5 * dt));
    next.lincomb(2.0 / 3.0, 1.0 / 3.0, u);

    if !next.all_finite() {
        return Err(Error::NonFinite { step: 0, t: t + dt });
    }
    Ok(next)
}

/// Uniform steps covering `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStepPlan {
    pub dt: f64,
    pub n_steps: usize,
    pub cfl: f64,
    pub t_final: f64,
}

impl TimeStepPlan {
    /// Largest stable step `cfl / (c p^2 / h + d p^4 / h^2)`, rounded down
    /// so that a whole number of steps reaches `T`.
    pub fn for_problem(prob: &LdgProblem, cfl: f64) -> Self {
        assert!(cfl > 0.0 && cfl <= 1.0, "cfl must lie in (0, 1]");
        let p = prob.mesh.p_max() as f64;
        let h = prob.mesh.h_min();
        let bound = cfl / (prob.c * p * p / h + prob.d * p.powi(4) / (h * h));
        Self::with_steps(
            prob.t_final,
            (prob.t_final / bound).ceil().max(1.0) as usize,
            cfl,
        )
    }

    pub fn with_steps(t_final: f64, n_steps: usize, cfl: f64) -> Self {
        assert!(n_steps >= 1);
        Self {
            dt: t_final / n_steps as f64,
            n_steps,
            cfl,
            t_final,
        }
    }

    pub fn halved(&self) -> Self {
        Self::with_steps(self.t_final, 2 * self.n_steps, self.cfl * 0.5)
    }

    /// Rounds the step count up to a multiple of `k`.
    pub fn multiple_of(&self, k: usize) -> Self {
        let n = self.n_steps.div_ceil(k) * k;
        Self::with_steps(self.t_final, n, self.cfl)
    }

    fn time(&self, step: usize) -> f64 {
        if step == self.n_steps {
            self.t_final
        } else {
            step as f64 * self.dt
        }
    }
}

/// Final state and optional `q_h` snapshots.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub u: BrokenField,
    pub q_snapshots: Vec<(f64, BrokenField)>,
    pub plan: TimeStepPlan,
}

/// Integrates from the projected initial data to `T`.
///
/// With `snapshots = Some(k)`, `q_h` is recorded at `k + 1` uniformly spaced
/// times including `0` and `T` (the step count is rounded up to a multiple
/// of `k`).
pub fn integrate(
    prob: &LdgProblem,
    plan: TimeStepPlan,
    snapshots: Option<usize>,
) -> Result<Trajectory> {
    let plan = match snapshots {
        Some(k) if k > 0 => plan.multiple_of(k),
        _ => plan,
    };
    let stride = snapshots.filter(|&k| k > 0).map(|k| plan.n_steps / k);
    let mut u = project_initial(prob);
    let mut q_snapshots = Vec::new();
    if stride.is_some() {
        q_snapshots.push((0.0, recover_q(&u, prob, 0.0)));
    }
    for step in 0..plan.n_steps {
        let t = plan.time(step);
        let dt = plan.time(step + 1) - t;
        u = tvd_rk3_step(&u, t, dt, |v, s| rhs(v, prob, s)).map_err(|e| match e {
            Error::NonFinite { t, .. } => Error::NonFinite { step: step + 1, t },
            other => other,
        })?;
        if let Some(k) = stride {
            if (step + 1) % k == 0 {
                let t1 = plan.time(step + 1);
                q_snapshots.push((t1, recover_q(&u, prob, t1)));
            }
        }
    }
    Ok(Trajectory {
        u,
        q_snapshots,
        plan,
    })
}

/// Result of an integration checked by step halving.
#[derive(Debug, Clone)]
pub struct AuditedRun {
    pub trajectory: Trajectory,
    pub error: f64,
    /// Relative change of the error under the last halving.
    pub audit_change: f64,
    pub audit_pass: bool,
    /// Extra halvings applied to the initial plan before the audit passed.
    pub refinements: usize,
}

/// Integrates with `plan` and with `plan.halved()`; while the measured error
/// changes by more than [`AUDIT_TOLERANCE`] the plan is halved again, up to
/// `max_refinements` times. The finer of the last pair is reported.
pub fn integrate_audited<M>(
    prob: &LdgProblem,
    plan: TimeStepPlan,
    snapshots: Option<usize>,
    max_refinements: usize,
    measure: M,
) -> Result<AuditedRun>
where
    M: Fn(&Trajectory) -> f64,
{
    let mut coarse = integrate(prob, plan, snapshots)?;
    let mut e_coarse = measure(&coarse);
    let mut refinements = 0;
    loop {
        let fine = integrate(prob, coarse.plan.halved(), snapshots)?;
        let e_fine = measure(&fine);
        let change = (e_coarse - e_fine).abs() / e_fine.abs();
        let pass = change < AUDIT_TOLERANCE;
        if pass || refinements == max_refinements {
            return Ok(AuditedRun {
                trajectory: fine,
                error: e_fine,
                audit_change: change,
                audit_pass: pass,
                refinements,
            });
        }
        refinements += 1;
        coarse = fine;
        e_coarse = e_fine;
    }
}
