//! CSV emission. Rows first, then `#`-prefixed summary lines.

use crate::config::ExperimentConfig;
use crate::suite::ProjectionReport;
use pldg_core::analysis::ConvergenceReport;
use std::fmt::Write;

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn convergence_csv(report: &ConvergenceReport, cfg: &ExperimentConfig) -> String {
    let mut out = String::from("p,error_u,error_q,dt_used,audit_pass\n");
    for r in &report.rows {
        let eq = r.error_q.map(|v| format!("{v:e}")).unwrap_or_default();
        let audit = r.audit_pass.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{:e},{},{:e},{}",
            r.p, r.error_u, eq, r.dt_used, audit
        )
        .unwrap();
    }
    let metric = if cfg.pde.d > 0.0 {
        "u_at_T+q_QT"
    } else {
        "u_at_T"
    };
    writeln!(
        out,
        "# experiment={} metric={} fit={} fitted_slope={:.4} predicted_slope={:.4} tolerance={} margin={:.4} fit_first_p={} seed={} status={}",
        report.experiment,
        metric,
        cfg.sweep.fit.name(),
        report.fitted_slope,
        report.predicted_slope,
        report.tolerance,
        report.margin,
        report.rows[report.fit_first].p,
        cfg.run.seed,
        status(report.passed)
    )
    .unwrap();
    for note in &report.notes {
        writeln!(out, "# {note}").unwrap();
    }
    out
}

pub fn projection_csv(report: &ProjectionReport) -> String {
    let mut out = String::from("p,l2_error,trace_error\n");
    for s in &report.samples {
        writeln!(out, "{},{:e},{:e}", s.p, s.l2_error, s.trace_error).unwrap();
    }
    if report.exact {
        writeln!(
            out,
            "# experiment={} projection={} errors at round-off, no rate to fit status=PASS-exact",
            report.experiment,
            report.kind.name()
        )
        .unwrap();
    }
    for c in &report.checks {
        writeln!(
            out,
            "# experiment={} projection={} quantity={} fitted_slope={:.4} predicted_slope={:.4} tolerance={} margin={:.4} status={}",
            report.experiment,
            report.kind.name(),
            c.quantity,
            c.fitted,
            c.predicted,
            c.tolerance,
            c.margin(),
            status(c.passed())
        )
        .unwrap();
    }
    out
}
