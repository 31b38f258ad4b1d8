//! Trajectory CSV: `t,p_1..p_d,q_1..q_d,err_*,err_sol,iters`.

use std::io::{self, Write};

use csprk::{HamiltonianSystem, Trajectory};

/// Seventeen significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory(
    out: &mut dyn Write,
    system: &dyn HamiltonianSystem,
    trajectory: &Trajectory,
) -> io::Result<()> {
    let d = system.dim();
    let s0 = system.initial_state();
    let invariants: Vec<_> = system
        .invariants()
        .iter()
        .copied()
        .filter(|&inv| system.invariant(inv, &s0.p, &s0.q).is_some())
        .collect();
    let with_solution = trajectory
        .points
        .first()
        .is_some_and(|p| p.solution_error.is_some());

    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("p_{i}")));
    header.extend((1..=d).map(|i| format!("q_{i}")));
    header.extend(invariants.iter().map(|inv| format!("err_{}", inv.label())));
    if with_solution {
        header.push("err_sol".into());
    }
    header.push("iters".into());
    writeln!(out, "{}", header.join(","))?;

    for point in &trajectory.points {
        let s = &point.state;
        let mut row = vec![num(s.t)];
        row.extend(s.p.iter().chain(&s.q).map(|&x| num(x)));
        for inv in &invariants {
            let err = point
                .invariant_errors
                .iter()
                .find(|(which, _)| which == inv)
                .map_or(f64::NAN, |(_, e)| *e);
            row.push(num(err));
        }
        if with_solution {
            row.push(num(point.solution_error.unwrap_or(f64::NAN)));
        }
        row.push(point.iterations.to_string());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
