use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::solver::Trajectory;

use super::artifact::execute;
use super::oracle::linear_solution_oracle;
use super::scenario::Scenario;

/// One refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub nodes: usize,
    /// Weighted sup error against the Laplace-inversion oracle (linear scenarios only).
    pub error: Option<f64>,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

fn orders(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

impl ConvergenceTable {
    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual).collect()
    }

    pub fn errors(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.error).collect()
    }

    /// `log2(e_i / e_{i+1})` of the residuals.
    pub fn residual_orders(&self) -> Vec<f64> {
        orders(&self.residuals())
    }

    pub fn error_orders(&self) -> Option<Vec<f64>> {
        self.errors().map(|e| orders(&e))
    }

    /// Residuals strictly decrease from level to level.
    pub fn monotone(&self) -> bool {
        self.residuals().windows(2).all(|w| w[1] < w[0])
    }

    pub fn min_residual_order(&self) -> f64 {
        self.residual_orders().into_iter().fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let linear = self.rows.iter().all(|r| r.error.is_some());
        if linear {
            writeln!(f, "{:>8} {:>14} {:>8} {:>14} {:>8} {:>6}", "M", "error", "order", "residual", "order", "iters")?;
        } else {
            writeln!(f, "{:>8} {:>14} {:>8} {:>6}", "M", "residual", "order", "iters")?;
        }
        let ro = self.residual_orders();
        let eo = self.error_orders();
        for (i, r) in self.rows.iter().enumerate() {
            let order = |o: Option<&f64>| o.map_or("-".to_string(), |v| format!("{v:.3}"));
            let r_ord = order(i.checked_sub(1).and_then(|k| ro.get(k)));
            let flag = if r.converged { "" } else { " (not converged)" };
            if linear {
                let e_ord = order(i.checked_sub(1).and_then(|k| eo.as_ref()?.get(k)));
                writeln!(
                    f,
                    "{:>8} {:>14.6e} {:>8} {:>14.6e} {:>8} {:>6}{flag}",
                    r.nodes,
                    r.error.unwrap_or(f64::NAN),
                    e_ord,
                    r.residual,
                    r_ord,
                    r.iterations
                )?;
            } else {
                writeln!(f, "{:>8} {:>14.6e} {:>8} {:>6}{flag}", r.nodes, r.residual, r_ord, r.iterations)?;
            }
        }
        Ok(())
    }
}

/// `sup_j t_j^w ||u(t_j) - S_{a,g}(t_j) u0||` over the positive nodes, with the
/// reference from [`linear_solution_oracle`].
pub fn oracle_error(scenario: &Scenario, traj: &Trajectory) -> Result<f64> {
    let op = scenario.operator()?;
    let u0 = scenario.initial_field();
    let mut worst = 0.0f64;
    for j in 1..traj.grid.len() {
        let want = linear_solution_oracle(&scenario.params, op.eigenvalues(), &u0, traj.grid.t(j))?;
        worst = worst.max(traj.weight(j) * traj.states[j].sub(&want).l2_norm());
    }
    Ok(worst)
}

/// Solves at `M, 2M, 4M, ...` for `levels` levels, starting from the
/// scenario's node count.
pub fn converge(scenario: &Scenario, levels: usize, exec: Exec) -> Result<ConvergenceTable> {
    if levels < 2 {
        return Err(Error::Usage(format!("converge needs at least 2 levels (got {levels})")));
    }
    let mut rows = Vec::with_capacity(levels);
    for k in 0..levels {
        let s = scenario.with_nodes(scenario.nodes << k);
        let (traj, report) = execute(&s, exec)?;
        let error = if s.is_linear() { Some(oracle_error(&s, &traj)?) } else { None };
        rows.push(ConvergenceRow {
            nodes: s.nodes,
            error,
            residual: report.volterra_residual_weighted,
            converged: report.converged,
            iterations: report.iterations_used,
        });
    }
    Ok(ConvergenceTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ProblemKind;

    #[test]
    fn one_level_is_a_usage_error() {
        assert!(matches!(converge(&Scenario::example(), 1, Exec::Sequential), Err(Error::Usage(_))));
    }

    #[test]
    fn linear_levels() {
        let s = Scenario {
            kind: ProblemKind::Linear,
            nonlocal: Vec::new(),
            modes: 8,
            nodes: 50,
            u0: vec![1.0, -0.5, 0.25],
            ..Scenario::example()
        };
        let table = converge(&s, 3, Exec::Sequential).unwrap();
        assert_eq!(table.rows.iter().map(|r| r.nodes).collect::<Vec<_>>(), [50, 100, 200]);
        assert!(table.errors().unwrap().iter().all(|e| *e < 1e-8), "{table}");
        assert!(table.monotone() && table.min_residual_order() >= 0.7, "{table}");
        let text = table.to_string();
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains("error"));
    }
}
