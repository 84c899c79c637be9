//! Scenario files: TOML with one table per block, every key optional at the
//! syntax level and checked in a single validation pass.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::operators::{DiagonalSectorialOperator, FracParams, SpectralField};
use crate::solver::{GrowthBounds, NonlocalPoint, ProblemSpec, SolverConfig};

/// Name of the built-in heat-equation scenario.
pub const BUILTIN_EXAMPLE: &str = "example-sec5";

/// Right-hand side family of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// `g = y cos z + int_0^t e^{-(t-s)} sin z ds`.
    Heat,
    /// `g = 0`.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardBlock {
    pub max_iter: usize,
    pub tol: f64,
    pub relaxation: f64,
    pub radius_r: f64,
    pub residual_cap: f64,
    pub quadrature_order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputBlock {
    /// Interior sample points `y_p = p pi / (P + 1)` written to the CSV.
    pub points: usize,
    pub csv: String,
    pub report: String,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: ProblemKind,
    /// Sine coefficients of `u0`; missing trailing modes are zero.
    pub u0: Vec<f64>,
    pub params: FracParams,
    pub modes: usize,
    pub shift: f64,
    pub nodes: usize,
    pub grading: f64,
    pub picard: PicardBlock,
    pub nonlocal: Vec<NonlocalPoint>,
    pub bounds: GrowthBounds,
    pub output: OutputBlock,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    problem: Option<RawProblem>,
    fracparams: Option<RawFracParams>,
    operator: Option<RawOperator>,
    mesh: Option<RawMesh>,
    picard: Option<RawPicard>,
    nonlocal: Option<RawNonlocal>,
    bounds: Option<RawBounds>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    kind: Option<ProblemKind>,
    u0: Option<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFracParams {
    alpha: Option<f64>,
    gamma: Option<f64>,
    beta: Option<f64>,
    #[serde(rename = "T")]
    horizon: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    modes: Option<i64>,
    shift: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    nodes: Option<i64>,
    grading: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPicard {
    max_iter: Option<i64>,
    tol: Option<f64>,
    relaxation: Option<f64>,
    radius_r: Option<f64>,
    residual_cap: Option<f64>,
    quadrature_order: Option<i64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNonlocal {
    t: Option<Vec<f64>>,
    c: Option<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    k1: Option<f64>,
    k2: Option<f64>,
    delta_decay: Option<f64>,
    k_bound_h3: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    points: Option<i64>,
    csv: Option<String>,
    report: Option<String>,
}

/// Reads a required key, recording its absence.
fn required<T>(v: Option<T>, key: &str, problems: &mut Vec<String>) -> Option<T> {
    if v.is_none() {
        problems.push(format!("missing required key {key}"));
    }
    v
}

/// Converts a TOML integer to a count, recording negatives.
fn count(v: Option<i64>, key: &str, default: usize, problems: &mut Vec<String>) -> usize {
    match v {
        None => default,
        Some(n) if n >= 0 => n as usize,
        Some(n) => {
            problems.push(format!("{key} must be non-negative (got {n})"));
            default
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl Scenario {
    /// The heat-equation example on `[0, pi]` with `alpha = 3/4`, `gamma = 1/2`.
    pub fn example() -> Self {
        let defaults = SolverConfig::default();
        Scenario {
            name: BUILTIN_EXAMPLE.into(),
            kind: ProblemKind::Heat,
            u0: vec![1.0],
            params: FracParams { alpha: 0.75, gamma: 0.5, beta: -0.5, horizon: 1.0 },
            modes: 32,
            shift: 0.0,
            nodes: 200,
            grading: 2.0,
            picard: PicardBlock {
                max_iter: defaults.max_iterations,
                tol: defaults.tolerance,
                relaxation: defaults.relaxation,
                radius_r: defaults.radius_r,
                residual_cap: defaults.residual_cap,
                quadrature_order: defaults.quadrature_order,
            },
            nonlocal: vec![NonlocalPoint { t: 0.3, c: 0.05 }, NonlocalPoint { t: 0.6, c: 0.05 }],
            bounds: GrowthBounds::default(),
            output: OutputBlock { points: 64, csv: "trajectory.csv".into(), report: "report.txt".into() },
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        (name == BUILTIN_EXAMPLE).then(Self::example)
    }

    /// A built-in name or a path to a scenario file.
    pub fn load(path_or_name: &str) -> Result<Self> {
        if let Some(s) = Self::builtin(path_or_name) {
            return Ok(s);
        }
        let text = std::fs::read_to_string(Path::new(path_or_name))
            .map_err(|e| Error::Config(vec![format!("cannot read scenario {path_or_name}: {e}")]))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawScenario) -> Result<Self> {
        let base = Self::example();
        let mut problems = Vec::new();

        let problem = raw.problem.unwrap_or_default();
        let kind = problem.kind.unwrap_or(ProblemKind::Heat);
        let u0 = problem.u0.unwrap_or_else(|| vec![1.0]);

        let fp = raw.fracparams.unwrap_or_default();
        let alpha = required(fp.alpha, "fracparams.alpha", &mut problems);
        let gamma = required(fp.gamma, "fracparams.gamma", &mut problems);
        let beta = required(fp.beta, "fracparams.beta", &mut problems);
        let params = FracParams {
            alpha: alpha.unwrap_or(f64::NAN),
            gamma: gamma.unwrap_or(f64::NAN),
            beta: beta.unwrap_or(f64::NAN),
            horizon: fp.horizon.unwrap_or(1.0),
        };
        let params_given = alpha.is_some() && gamma.is_some() && beta.is_some();

        let op = raw.operator.unwrap_or_default();
        let modes = count(required(op.modes, "operator.modes", &mut problems), "operator.modes", 0, &mut problems);
        let shift = op.shift.unwrap_or(0.0);

        let mesh = raw.mesh.unwrap_or_default();
        let nodes = count(required(mesh.nodes, "mesh.nodes", &mut problems), "mesh.nodes", 0, &mut problems);
        let grading = mesh.grading.unwrap_or(base.grading);

        let pc = raw.picard.unwrap_or_default();
        let picard = PicardBlock {
            max_iter: count(pc.max_iter, "picard.max_iter", base.picard.max_iter, &mut problems),
            tol: pc.tol.unwrap_or(base.picard.tol),
            relaxation: pc.relaxation.unwrap_or(base.picard.relaxation),
            radius_r: pc.radius_r.unwrap_or(base.picard.radius_r),
            residual_cap: pc.residual_cap.unwrap_or(base.picard.residual_cap),
            quadrature_order: count(
                pc.quadrature_order,
                "picard.quadrature_order",
                base.picard.quadrature_order,
                &mut problems,
            ),
        };

        let nl = raw.nonlocal.unwrap_or_default();
        let (ts, cs) = (nl.t.unwrap_or_default(), nl.c.unwrap_or_default());
        if ts.len() != cs.len() {
            problems.push(format!("nonlocal.t has {} entries but nonlocal.c has {}", ts.len(), cs.len()));
        }
        let nonlocal = ts.iter().zip(&cs).map(|(&t, &c)| NonlocalPoint { t, c }).collect();

        let b = raw.bounds.unwrap_or_default();
        let bounds = GrowthBounds {
            k1: b.k1.unwrap_or(base.bounds.k1),
            k2: b.k2.unwrap_or(base.bounds.k2),
            delta: b.delta_decay.unwrap_or(base.bounds.delta),
            k_bound_h3: b.k_bound_h3.unwrap_or(base.bounds.k_bound_h3),
        };

        let out = raw.output.unwrap_or_default();
        let output = OutputBlock {
            points: count(out.points, "output.points", base.output.points, &mut problems),
            csv: out.csv.unwrap_or(base.output.csv),
            report: out.report.unwrap_or(base.output.report),
        };

        let scenario = Scenario {
            name: raw.name.unwrap_or_else(|| "scenario".into()),
            kind,
            u0,
            params,
            modes,
            shift,
            nodes,
            grading,
            picard,
            nonlocal,
            bounds,
            output,
        };
        // a missing parameter is already reported; skip its NaN placeholder
        problems.extend(scenario.violations().into_iter().filter(|v| params_given || !v.contains("(got NaN)")));
        if problems.is_empty() {
            Ok(scenario)
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Every violated invariant of the scenario and of the problem and
    /// solver configuration built from it.
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.params.violations();
        if self.modes == 0 {
            v.push("operator.modes must be >= 1".into());
        }
        if !(self.shift >= 0.0 && self.shift.is_finite()) {
            v.push(format!("operator.shift must be >= 0 (got {})", self.shift));
        }
        if self.u0.len() > self.modes.max(1) {
            v.push(format!("problem.u0 has {} coefficients for {} modes", self.u0.len(), self.modes));
        }
        if self.u0.iter().any(|c| !c.is_finite()) {
            v.push("problem.u0 has non-finite coefficients".into());
        }
        for (i, p) in self.nonlocal.iter().enumerate() {
            if !(p.t > 0.0 && p.t <= self.params.horizon) {
                v.push(format!("nonlocal.t[{i}] = {} must lie in (0, T]", p.t));
            }
            if !p.c.is_finite() {
                v.push(format!("nonlocal.c[{i}] is not finite"));
            }
        }
        let b = &self.bounds;
        if !(b.k1 >= 0.0 && b.k2 >= 0.0 && b.delta >= 0.0 && b.k_bound_h3 >= 0.0) {
            v.push("bounds k1, k2, delta_decay, k_bound_h3 must be >= 0".into());
        }
        v.extend(self.solver_config(Exec::default()).violations());
        if self.output.points < self.modes {
            v.push(format!("output.points ({}) must be >= operator.modes ({})", self.output.points, self.modes));
        }
        if self.output.csv.is_empty() || self.output.report.is_empty() {
            v.push("output.csv and output.report must be non-empty".into());
        }
        v
    }

    pub fn is_linear(&self) -> bool {
        self.kind == ProblemKind::Linear && self.nonlocal.is_empty()
    }

    pub fn operator(&self) -> Result<DiagonalSectorialOperator> {
        DiagonalSectorialOperator::dirichlet_laplacian(self.modes, self.shift)
    }

    pub fn initial_field(&self) -> SpectralField {
        let mut coeffs = vec![0.0; self.modes];
        for (c, v) in coeffs.iter_mut().zip(&self.u0) {
            *c = *v;
        }
        SpectralField { coeffs }
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let op = self.operator()?;
        let mut spec = match self.kind {
            ProblemKind::Heat => ProblemSpec::heat_example(self.params, op, self.nonlocal.clone()),
            ProblemKind::Linear => {
                let mut s = ProblemSpec::linear(self.params, op, SpectralField::zeros(self.modes));
                s.nonlocal = self.nonlocal.clone();
                s
            }
        };
        spec.u0 = self.initial_field();
        spec.bounds = self.bounds;
        spec.validate()?;
        Ok(spec)
    }

    pub fn solver_config(&self, exec: Exec) -> SolverConfig {
        SolverConfig {
            max_iterations: self.picard.max_iter,
            tolerance: self.picard.tol,
            relaxation: self.picard.relaxation,
            quadrature_order: self.picard.quadrature_order,
            radius_r: self.picard.radius_r,
            residual_cap: self.picard.residual_cap,
            intervals: self.nodes,
            grading: self.grading,
            transform_points: 0,
            exec,
        }
    }

    /// The same scenario on a mesh with `nodes` intervals.
    pub fn with_nodes(&self, nodes: usize) -> Self {
        Scenario { nodes, ..self.clone() }
    }

    /// Canonical TOML with every key written out.
    pub fn to_toml(&self) -> String {
        let raw = RawScenario {
            name: Some(self.name.clone()),
            problem: Some(RawProblem { kind: Some(self.kind), u0: Some(self.u0.clone()) }),
            fracparams: Some(RawFracParams {
                alpha: Some(self.params.alpha),
                gamma: Some(self.params.gamma),
                beta: Some(self.params.beta),
                horizon: Some(self.params.horizon),
            }),
            operator: Some(RawOperator { modes: Some(self.modes as i64), shift: Some(self.shift) }),
            mesh: Some(RawMesh { nodes: Some(self.nodes as i64), grading: Some(self.grading) }),
            picard: Some(RawPicard {
                max_iter: Some(self.picard.max_iter as i64),
                tol: Some(self.picard.tol),
                relaxation: Some(self.picard.relaxation),
                radius_r: Some(self.picard.radius_r),
                residual_cap: Some(self.picard.residual_cap),
                quadrature_order: Some(self.picard.quadrature_order as i64),
            }),
            nonlocal: Some(RawNonlocal {
                t: Some(self.nonlocal.iter().map(|p| p.t).collect()),
                c: Some(self.nonlocal.iter().map(|p| p.c).collect()),
            }),
            bounds: Some(RawBounds {
                k1: Some(self.bounds.k1),
                k2: Some(self.bounds.k2),
                delta_decay: Some(self.bounds.delta),
                k_bound_h3: Some(self.bounds.k_bound_h3),
            }),
            output: Some(RawOutput {
                points: Some(self.output.points as i64),
                csv: Some(self.output.csv.clone()),
                report: Some(self.output.report.clone()),
            }),
        };
        toml::to_string(&raw).expect("scenario serializes")
    }

    /// SHA-256 of the canonical TOML.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
