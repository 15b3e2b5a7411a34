//! Experiment configuration (TOML, one experiment per file).

use crate::CliError;
use pldg_core::analysis::FitMethod;
use pldg_core::fracfun::SingularSolution;
use pldg_core::projection::{ProjectionKind, ReferenceSingular};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// LDG time-dependent sweep over `p`.
    #[default]
    Converge,
    /// Reference-element projection sweep (no PDE).
    Project,
}

/// Exact solutions for `converge` and reference functions for `project`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolutionSpec {
    PowerLeft {
        alpha: f64,
    },
    PowerLeftModulated {
        alpha: f64,
    },
    FracIntHeaviside {
        alpha: f64,
        zeta: f64,
    },
    AbsPowerInterior {
        alpha: f64,
        theta: f64,
    },
    Smooth,
    /// `(1 + xi)^alpha` on the reference element.
    LeftPower {
        alpha: f64,
    },
    /// `(1 - xi)^alpha` on the reference element.
    RightPower {
        alpha: f64,
    },
    /// `|xi - theta|^alpha` on the reference element.
    InteriorPower {
        alpha: f64,
        theta: f64,
    },
    /// `(1 + xi)^degree`; projections of degree `>= degree` are exact.
    Polynomial {
        degree: u32,
    },
}

impl SolutionSpec {
    pub fn solution(&self) -> Result<SingularSolution, CliError> {
        let s = match *self {
            SolutionSpec::PowerLeft { alpha } => SingularSolution::power_left(alpha),
            SolutionSpec::PowerLeftModulated { alpha } => {
                SingularSolution::power_left_modulated(alpha)
            }
            SolutionSpec::FracIntHeaviside { alpha, zeta } => {
                SingularSolution::frac_int_heaviside(alpha, zeta)
            }
            SolutionSpec::AbsPowerInterior { alpha, theta } => {
                SingularSolution::abs_power_interior(alpha, theta)
            }
            SolutionSpec::Smooth => Ok(SingularSolution::smooth()),
            other => {
                return Err(CliError::Config(format!(
                    "{other:?} is a reference function; use mode = \"project\""
                )))
            }
        };
        s.map_err(|e| CliError::Config(e.to_string()))
    }

    /// `None` for the polynomial (handled separately).
    pub fn reference(&self) -> Result<Option<ReferenceSingular>, CliError> {
        match *self {
            SolutionSpec::LeftPower { alpha } => Ok(Some(ReferenceSingular::LeftPower { alpha })),
            SolutionSpec::RightPower { alpha } => Ok(Some(ReferenceSingular::RightPower { alpha })),
            SolutionSpec::InteriorPower { alpha, theta } => {
                if !(theta > -1.0 && theta < 1.0) {
                    return Err(CliError::Config(format!(
                        "theta must lie in (-1, 1), got {theta}"
                    )));
                }
                Ok(Some(ReferenceSingular::InteriorAbsPower { alpha, theta }))
            }
            SolutionSpec::Polynomial { .. } => Ok(None),
            other => Err(CliError::Config(format!(
                "{other:?} is a PDE solution; use mode = \"converge\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeSpec {
    pub c: f64,
    pub d: f64,
    pub t_final: f64,
}

impl Default for PdeSpec {
    fn default() -> Self {
        Self {
            c: 0.1,
            d: 0.0,
            t_final: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    pub a: f64,
    pub b: f64,
    pub elements: usize,
    /// When false, `nodes` gives the element boundaries.
    #[serde(default = "yes")]
    pub uniform: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<f64>,
}

fn yes() -> bool {
    true
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            elements: 4,
            uniform: true,
            nodes: Vec::new(),
        }
    }
}

impl MeshSpec {
    pub fn node_positions(&self) -> Vec<f64> {
        if self.uniform {
            let h = (self.b - self.a) / self.elements as f64;
            (0..=self.elements).map(|j| self.a + j as f64 * h).collect()
        } else {
            self.nodes.clone()
        }
    }
}

/// Degrees to sweep: an explicit list or an inclusive stepped range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PRange {
    List(Vec<usize>),
    Range {
        min: usize,
        max: usize,
        #[serde(default = "one")]
        step: usize,
    },
}

fn one() -> usize {
    1
}

impl PRange {
    pub fn degrees(&self) -> Vec<usize> {
        match self {
            PRange::List(v) => v.clone(),
            PRange::Range { min, max, step } => (*min..=*max).step_by((*step).max(1)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FitSpec {
    #[default]
    Plain,
    /// Shared slope, one intercept per parity of `p`.
    Parity,
}

impl FitSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FitSpec::Plain => "plain",
            FitSpec::Parity => "parity",
        }
    }
}

impl From<FitSpec> for FitMethod {
    fn from(f: FitSpec) -> Self {
        match f {
            FitSpec::Plain => FitMethod::Plain,
            FitSpec::Parity => FitMethod::Parity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionSpec {
    #[default]
    RadauMinus,
    RadauPlus,
    L2,
}

impl From<ProjectionSpec> for ProjectionKind {
    fn from(p: ProjectionSpec) -> Self {
        match p {
            ProjectionSpec::RadauMinus => ProjectionKind::RadauMinus,
            ProjectionSpec::RadauPlus => ProjectionKind::RadauPlus,
            ProjectionSpec::L2 => ProjectionKind::L2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub p_range: PRange,
    #[serde(default)]
    pub fit: FitSpec,
    /// Allowed `|fitted - predicted|`.
    pub tolerance: f64,
    /// Overrides the rate derived from the solution and mesh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted: Option<f64>,
    /// Projection used in `project` mode.
    #[serde(default)]
    pub projection: ProjectionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "yes")]
    pub audit: bool,
    #[serde(default = "default_refinements")]
    pub max_refinements: usize,
    /// `q_h` is recorded at the ends of this many equal time intervals (d > 0).
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Recorded in the report; the sweeps themselves are deterministic.
    #[serde(default)]
    pub seed: u64,
}

fn default_cfl() -> f64 {
    pldg_core::timestep::DEFAULT_CFL
}

fn default_refinements() -> usize {
    3
}

fn default_snapshots() -> usize {
    20
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            cfl: default_cfl(),
            audit: true,
            max_refinements: default_refinements(),
            snapshots: default_snapshots(),
            output: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub mode: Mode,
    pub solution: SolutionSpec,
    #[serde(default)]
    pub pde: PdeSpec,
    #[serde(default)]
    pub mesh: MeshSpec,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub run: RunSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(format!("{}: {m}", self.name)));
        let ps = self.sweep.p_range.degrees();
        if ps.is_empty() {
            return bad("p_range is empty".into());
        }
        if ps.windows(2).any(|w| w[1] <= w[0]) {
            return bad("p_range must be strictly increasing".into());
        }
        if !(self.sweep.tolerance >= 0.0) {
            return bad("tolerance must be non-negative".into());
        }
        match self.mode {
            Mode::Converge => {
                if self.mesh.elements < 1 {
                    return bad("element count must be at least 1".into());
                }
                if !self.mesh.uniform && self.mesh.nodes.len() != self.mesh.elements + 1 {
                    return bad("non-uniform mesh needs elements + 1 nodes".into());
                }
                if !(self.pde.c > 0.0) {
                    return bad(format!("c must be positive, got {}", self.pde.c));
                }
                if !(self.pde.d >= 0.0) {
                    return bad(format!("d must be non-negative, got {}", self.pde.d));
                }
                if !(self.pde.t_final > 0.0) {
                    return bad(format!(
                        "t_final must be positive, got {}",
                        self.pde.t_final
                    ));
                }
                if !(self.run.cfl > 0.0 && self.run.cfl <= 1.0) {
                    return bad(format!("cfl must lie in (0, 1], got {}", self.run.cfl));
                }
                if ps[0] < 1 {
                    return bad("degrees must be at least 1".into());
                }
                self.solution.solution()?;
            }
            Mode::Project => {
                if ps[0] < 1 {
                    return bad("Gauss-Radau projections need p >= 1".into());
                }
                self.solution.reference()?;
            }
        }
        Ok(())
    }
}
