use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::exec::Exec;
use crate::operators::SineTransform;
use crate::solver::{ResidualReport, Solver, Trajectory};

use super::scenario::Scenario;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output of one `run`.
#[derive(Debug, Clone)]
pub struct RunArtifact {
    pub csv_path: PathBuf,
    pub report_path: PathBuf,
    pub config_hash: String,
    pub trajectory: Trajectory,
    pub report: ResidualReport,
}

/// Solves the scenario without writing anything.
pub fn execute(scenario: &Scenario, exec: Exec) -> Result<(Trajectory, ResidualReport)> {
    let solver = Solver::new(scenario.problem_spec()?, scenario.solver_config(exec))?;
    solver.solve()
}

/// `t, weighted_norm, z@y_1 .. z@y_P`, one row per node. Row 0 holds the
/// weighted limit `t^w z` at `t = 0`, which is `z(0, .)` itself when `gamma = 1`.
pub fn trajectory_csv(scenario: &Scenario, traj: &Trajectory) -> Result<String> {
    let points = scenario.output.points;
    let synth = SineTransform::new(traj.modes(), points)?;
    let mut out = String::with_capacity(traj.states.len() * (points + 2) * 24);
    out.push_str("t,weighted_norm");
    for p in 1..=points {
        let _ = write!(out, ",z@y_{p}");
    }
    out.push('\n');
    for (j, state) in traj.states.iter().enumerate() {
        let _ = write!(out, "{:.16e},{:.16e}", traj.grid.t(j), traj.weighted_norm(j));
        for z in synth.synthesize(state) {
            let _ = write!(out, ",{z:.16e}");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Flat `key=value` report with a provenance header.
pub fn report_text(scenario: &Scenario, report: &ResidualReport) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k}={v}");
    };
    kv("version", VERSION.into());
    kv("config_hash", scenario.config_hash());
    kv("scenario", scenario.name.clone());
    kv("nodes", scenario.nodes.to_string());
    kv("modes", scenario.modes.to_string());
    kv("converged", report.converged.to_string());
    kv("iterations_used", report.iterations_used.to_string());
    kv("final_update_norm", format!("{:.6e}", report.final_update_norm));
    kv("mild_self_consistency", format!("{:.6e}", report.mild_self_consistency));
    kv("volterra_residual_weighted", format!("{:.6e}", report.volterra_residual_weighted));
    kv("modal_tail_estimate", format!("{:.6e}", report.modal_tail_estimate));
    kv("max_iterate_norm", format!("{:.6e}", report.max_iterate_norm));
    kv("radius_violations", report.radius_violations.to_string());
    kv("nonlocal_snap_error", format!("{:.6e}", report.nonlocal_snap_error));
    kv("convolution_crosscheck", report.convolution_crosscheck.map_or_else(|| "none".into(), |v| format!("{v:.6e}")));
    for c in &report.hypothesis_checks {
        kv(&format!("hypothesis.{}", c.name), if c.passed { "pass" } else { "fail" }.into());
        kv(&format!("hypothesis.{}.value", c.name), format!("{:.6e}", c.value));
        kv(&format!("hypothesis.{}.bound", c.name), format!("{:.6e}", c.bound));
    }
    kv("under_resolved", report.under_resolved.to_string());
    kv("warnings", report.warnings.len().to_string());
    for (i, w) in report.warnings.iter().enumerate() {
        kv(&format!("warning.{i}"), w.clone());
    }
    s
}

/// Solves the scenario and writes the CSV and report into `out_dir`.
pub fn run(scenario: &Scenario, out_dir: &Path, exec: Exec) -> Result<RunArtifact> {
    let (trajectory, report) = execute(scenario, exec)?;
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(&scenario.output.csv);
    let report_path = out_dir.join(&scenario.output.report);
    std::fs::write(&csv_path, trajectory_csv(scenario, &trajectory)?)?;
    std::fs::write(&report_path, report_text(scenario, &report))?;
    Ok(RunArtifact { csv_path, report_path, config_hash: scenario.config_hash(), trajectory, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::oracle::linear_solution_oracle;
    use crate::harness::ProblemKind;

    fn linear() -> Scenario {
        Scenario {
            kind: ProblemKind::Linear,
            nonlocal: Vec::new(),
            u0: vec![1.0, 0.0, 0.3],
            modes: 4,
            nodes: 60,
            output: crate::harness::OutputBlock { points: 5, ..Scenario::example().output },
            ..Scenario::example()
        }
    }

    #[test]
    fn csv_shape_and_format() {
        let s = linear();
        let (traj, _) = execute(&s, Exec::Sequential).unwrap();
        let csv = trajectory_csv(&s, &traj).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 61);
        assert_eq!(lines[0], "t,weighted_norm,z@y_1,z@y_2,z@y_3,z@y_4,z@y_5");
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 7));
    }

    #[test]
    fn linear_csv_matches_oracle() {
        let s = linear();
        let (traj, _) = execute(&s, Exec::Sequential).unwrap();
        let csv = trajectory_csv(&s, &traj).unwrap();
        let op = s.operator().unwrap();
        let synth = SineTransform::new(4, 5).unwrap();
        for line in csv.lines().skip(2) {
            let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            let want = linear_solution_oracle(&s.params, op.eigenvalues(), &s.initial_field(), v[0]).unwrap();
            for (got, w) in v[2..].iter().zip(synth.synthesize(&want)) {
                assert!((got - w).abs() < 1e-5, "t = {}: {got} {w}", v[0]);
            }
        }
    }

    #[test]
    fn degenerate_mesh_is_flagged() {
        let s = Scenario::example().with_nodes(2);
        let dir = tempfile::tempdir().unwrap();
        let art = run(&s, dir.path(), Exec::Sequential).unwrap();
        assert!(art.report.under_resolved);
        let text = std::fs::read_to_string(&art.report_path).unwrap();
        assert!(text.contains("under_resolved=true"));
        assert!(text.contains("warning.") && text.contains("under-resolved"));
        assert_eq!(std::fs::read_to_string(&art.csv_path).unwrap().lines().count(), 1 + 3);
    }

    #[test]
    fn report_has_provenance() {
        let s = linear();
        let (_, report) = execute(&s, Exec::Sequential).unwrap();
        let text = report_text(&s, &report);
        assert!(text.starts_with(&format!("version={VERSION}\nconfig_hash={}\n", s.config_hash())));
        assert!(text.contains("converged=true"));
        assert!(text.lines().all(|l| l.contains('=')));
    }
}
