//! Builtin experiments: LDG sweeps and reference-element projection studies.

use crate::config::*;
use std::f64::consts::PI;

const LDG_TOLERANCE: f64 = 0.3;
const PROJECTION_TOLERANCE: f64 = 0.15;
const PROJECTION_DEGREES: [usize; 7] = [8, 12, 16, 24, 32, 48, 64];

fn ldg(name: &str, solution: SolutionSpec, d: f64, fit: FitSpec) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        mode: Mode::Converge,
        solution,
        pde: PdeSpec {
            c: 0.1,
            d,
            t_final: 1.0,
        },
        mesh: MeshSpec::default(),
        sweep: SweepSpec {
            p_range: PRange::Range {
                min: 4,
                max: 16,
                step: 1,
            },
            fit,
            tolerance: LDG_TOLERANCE,
            predicted: None,
            projection: ProjectionSpec::default(),
        },
        run: RunSpec::default(),
    }
}

fn projection(name: String, solution: SolutionSpec, kind: ProjectionSpec) -> ExperimentConfig {
    ExperimentConfig {
        name,
        mode: Mode::Project,
        solution,
        pde: PdeSpec::default(),
        mesh: MeshSpec::default(),
        sweep: SweepSpec {
            p_range: PRange::List(PROJECTION_DEGREES.to_vec()),
            fit: FitSpec::Plain,
            tolerance: PROJECTION_TOLERANCE,
            predicted: None,
            projection: kind,
        },
        run: RunSpec::default(),
    }
}

fn alpha_label(alpha: f64) -> String {
    if alpha == PI {
        "pi".into()
    } else {
        alpha.to_string()
    }
}

/// All builtin presets, in display order.
pub fn presets() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    // The kink of the Heaviside example and the unfitted interior point sit at
    // the midpoint of the first element; the fitted one at its right node.
    let mid = 0.125;
    let node = 0.25;
    for (suffix, d) in [("d0", 0.0), ("d01", 0.1)] {
        out.push(ldg(
            &format!("fig1-right-{suffix}"),
            SolutionSpec::PowerLeft { alpha: PI },
            d,
            FitSpec::Plain,
        ));
        out.push(ldg(
            &format!("fig2-left-{suffix}"),
            SolutionSpec::PowerLeftModulated { alpha: PI },
            d,
            FitSpec::Plain,
        ));
        out.push(ldg(
            &format!("fig2-right-{suffix}"),
            SolutionSpec::FracIntHeaviside {
                alpha: PI,
                zeta: mid,
            },
            d,
            FitSpec::Parity,
        ));
        out.push(ldg(
            &format!("fig3-fitted-{suffix}"),
            SolutionSpec::AbsPowerInterior {
                alpha: PI,
                theta: node,
            },
            d,
            FitSpec::Plain,
        ));
        out.push(ldg(
            &format!("fig3-unfitted-{suffix}"),
            SolutionSpec::AbsPowerInterior {
                alpha: PI,
                theta: mid,
            },
            d,
            FitSpec::Parity,
        ));
    }
    for alpha in [0.5, 1.2, PI] {
        for (label, kind) in [
            ("minus", ProjectionSpec::RadauMinus),
            ("plus", ProjectionSpec::RadauPlus),
        ] {
            out.push(projection(
                format!("proj-left-{}-{label}", alpha_label(alpha)),
                SolutionSpec::LeftPower { alpha },
                kind,
            ));
        }
    }
    for alpha in [0.5, 1.2, PI] {
        out.push(projection(
            format!("proj-interior-{}", alpha_label(alpha)),
            SolutionSpec::InteriorPower { alpha, theta: 0.0 },
            ProjectionSpec::RadauMinus,
        ));
    }
    let mut poly = projection(
        "proj-polynomial".into(),
        SolutionSpec::Polynomial { degree: 5 },
        ProjectionSpec::RadauMinus,
    );
    poly.sweep.p_range = PRange::List(vec![5, 6, 8, 12]);
    out.push(poly);
    out
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    presets().into_iter().find(|p| p.name == name)
}
