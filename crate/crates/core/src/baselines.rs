//! Classical one-step methods used as reference points.

use std::fmt;
use std::str::FromStr;

use crate::integrator::{
    integrate_with, IntegrationFailure, SolverOptions, State, StepError, StepOutcome, Trajectory,
};
use crate::problems::HamiltonianSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineMethod {
    ExplicitEuler,
    ImplicitEuler,
    /// `p` explicit, `q` implicit.
    SymplecticEuler1,
    /// `p` implicit, `q` explicit.
    SymplecticEuler2,
    ImplicitMidpoint,
    /// Kick-drift-kick leapfrog; separable Hamiltonians only.
    StormerVerlet,
    /// Two-stage Gauss-Legendre Runge-Kutta.
    Glrk4,
}

impl BaselineMethod {
    pub const ALL: [BaselineMethod; 7] = [
        BaselineMethod::ExplicitEuler,
        BaselineMethod::ImplicitEuler,
        BaselineMethod::SymplecticEuler1,
        BaselineMethod::SymplecticEuler2,
        BaselineMethod::ImplicitMidpoint,
        BaselineMethod::StormerVerlet,
        BaselineMethod::Glrk4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineMethod::ExplicitEuler => "explicit_euler",
            BaselineMethod::ImplicitEuler => "implicit_euler",
            BaselineMethod::SymplecticEuler1 => "symplectic_euler_1",
            BaselineMethod::SymplecticEuler2 => "symplectic_euler_2",
            BaselineMethod::ImplicitMidpoint => "implicit_midpoint",
            BaselineMethod::StormerVerlet => "stormer_verlet",
            BaselineMethod::Glrk4 => "glrk4",
        }
    }

    pub fn order(self) -> usize {
        match self {
            BaselineMethod::ExplicitEuler
            | BaselineMethod::ImplicitEuler
            | BaselineMethod::SymplecticEuler1
            | BaselineMethod::SymplecticEuler2 => 1,
            BaselineMethod::ImplicitMidpoint | BaselineMethod::StormerVerlet => 2,
            BaselineMethod::Glrk4 => 4,
        }
    }

    /// Whether the method needs a nonlinear solve for general Hamiltonians.
    pub fn implicit(self) -> bool {
        !matches!(
            self,
            BaselineMethod::ExplicitEuler | BaselineMethod::StormerVerlet
        )
    }

    pub fn symplectic(self) -> bool {
        !matches!(
            self,
            BaselineMethod::ExplicitEuler | BaselineMethod::ImplicitEuler
        )
    }
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.trim().to_ascii_lowercase().replace('-', "_");
        BaselineMethod::ALL
            .into_iter()
            .find(|m| m.name() == normalized)
            .ok_or_else(|| format!("unknown baseline method `{s}`"))
    }
}

struct Field<'a> {
    system: &'a dyn HamiltonianSystem,
    d: usize,
}

impl Field<'_> {
    fn grad_p(&self, p: &[f64], q: &[f64]) -> Result<Vec<f64>, StepError> {
        let mut out = vec![0.0; self.d];
        self.system.grad_p(p, q, &mut out);
        finite(out)
    }

    fn grad_q(&self, p: &[f64], q: &[f64]) -> Result<Vec<f64>, StepError> {
        let mut out = vec![0.0; self.d];
        self.system.grad_q(p, q, &mut out);
        finite(out)
    }
}

fn finite(v: Vec<f64>) -> Result<Vec<f64>, StepError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(StepError::NonFiniteGradient)
    }
}

/// `x + a * y`
fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| xi + a * yi).collect()
}

fn midpoint(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect()
}

/// Plain fixed-point iteration `x ← map(x)` with a max-norm update criterion.
fn fixed_point<F>(
    init: Vec<f64>,
    opts: &SolverOptions,
    mut map: F,
) -> Result<(Vec<f64>, usize, f64), StepError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, StepError>,
{
    let mut x = init;
    let mut update = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let next = map(&x)?;
        update = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(
                0.0,
                |acc: f64, v| if v.is_nan() { f64::NAN } else { acc.max(v) },
            );
        x = next;
        if update.is_nan() || update <= opts.tolerance {
            break;
        }
    }
    if update <= opts.tolerance {
        Ok((x, iterations, update))
    } else {
        Err(StepError::NoConvergence {
            iterations,
            residual: update,
        })
    }
}

fn split(z: &[f64], d: usize) -> (&[f64], &[f64]) {
    z.split_at(d)
}

fn join(p: Vec<f64>, mut q: Vec<f64>) -> Vec<f64> {
    let mut z = p;
    z.append(&mut q);
    z
}

const SQRT3: f64 = 1.732_050_807_568_877_2;
const GAUSS4_A: [[f64; 2]; 2] = [[0.25, 0.25 - SQRT3 / 6.0], [0.25 + SQRT3 / 6.0, 0.25]];

/// One step of `method`.
pub fn baseline_step(
    method: BaselineMethod,
    system: &dyn HamiltonianSystem,
    state: &State,
    h: f64,
    opts: &SolverOptions,
) -> Result<StepOutcome, StepError> {
    let d = system.dim();
    if state.p.len() != d || state.q.len() != d {
        return Err(StepError::DimensionMismatch {
            expected: d,
            got: state.p.len().max(state.q.len()),
        });
    }
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(StepError::InvalidTolerance);
    }
    let f = Field { system, d };
    let (p0, q0) = (&state.p[..], &state.q[..]);
    let separable = system.is_separable();

    let (p1, q1, iterations, residual) = match method {
        BaselineMethod::ExplicitEuler => {
            let gq = f.grad_q(p0, q0)?;
            let gp = f.grad_p(p0, q0)?;
            (axpy(p0, -h, &gq), axpy(q0, h, &gp), 1, 0.0)
        }
        BaselineMethod::ImplicitEuler | BaselineMethod::ImplicitMidpoint => {
            let mid = method == BaselineMethod::ImplicitMidpoint;
            let z0 = join(p0.to_vec(), q0.to_vec());
            let (z1, it, res) = fixed_point(z0.clone(), opts, |z| {
                let (p, q) = split(z, d);
                let (pe, qe) = if mid {
                    (midpoint(p0, p), midpoint(q0, q))
                } else {
                    (p.to_vec(), q.to_vec())
                };
                Ok(join(
                    axpy(p0, -h, &f.grad_q(&pe, &qe)?),
                    axpy(q0, h, &f.grad_p(&pe, &qe)?),
                ))
            })?;
            let (p, q) = split(&z1, d);
            (p.to_vec(), q.to_vec(), it, res)
        }
        BaselineMethod::SymplecticEuler1 => {
            let (q1, it, res) = if separable {
                (axpy(q0, h, &f.grad_p(p0, q0)?), 1, 0.0)
            } else {
                fixed_point(q0.to_vec(), opts, |q| Ok(axpy(q0, h, &f.grad_p(p0, q)?)))?
            };
            let p1 = axpy(p0, -h, &f.grad_q(p0, &q1)?);
            (p1, q1, it, res)
        }
        BaselineMethod::SymplecticEuler2 => {
            let (p1, it, res) = if separable {
                (axpy(p0, -h, &f.grad_q(p0, q0)?), 1, 0.0)
            } else {
                fixed_point(p0.to_vec(), opts, |p| Ok(axpy(p0, -h, &f.grad_q(p, q0)?)))?
            };
            let q1 = axpy(q0, h, &f.grad_p(&p1, q0)?);
            (p1, q1, it, res)
        }
        BaselineMethod::StormerVerlet => {
            if !separable {
                return Err(StepError::NotSeparable("stormer_verlet"));
            }
            let half = axpy(p0, -0.5 * h, &f.grad_q(p0, q0)?);
            let q1 = axpy(q0, h, &f.grad_p(&half, q0)?);
            let p1 = axpy(&half, -0.5 * h, &f.grad_q(&half, &q1)?);
            (p1, q1, 1, 0.0)
        }
        BaselineMethod::Glrk4 => {
            // Unknowns: stage slopes (kp_1, kq_1, kp_2, kq_2).
            let slope = |p: &[f64], q: &[f64]| -> Result<Vec<f64>, StepError> {
                let gq = f.grad_q(p, q)?;
                Ok(join(gq.iter().map(|g| -g).collect(), f.grad_p(p, q)?))
            };
            let k0 = slope(p0, q0)?;
            let init = [k0.clone(), k0].concat();
            let (k, it, res) = fixed_point(init, opts, |k| {
                let (k1, k2) = k.split_at(2 * d);
                let mut out = Vec::with_capacity(4 * d);
                for row in GAUSS4_A {
                    let p: Vec<f64> = (0..d)
                        .map(|i| p0[i] + h * (row[0] * k1[i] + row[1] * k2[i]))
                        .collect();
                    let q: Vec<f64> = (0..d)
                        .map(|i| q0[i] + h * (row[0] * k1[d + i] + row[1] * k2[d + i]))
                        .collect();
                    out.extend(slope(&p, &q)?);
                }
                Ok(out)
            })?;
            let (k1, k2) = k.split_at(2 * d);
            let p1 = (0..d).map(|i| p0[i] + 0.5 * h * (k1[i] + k2[i])).collect();
            let q1 = (0..d)
                .map(|i| q0[i] + 0.5 * h * (k1[d + i] + k2[d + i]))
                .collect();
            (p1, q1, it, res)
        }
    };

    Ok(StepOutcome {
        state: State::new(p1, q1, state.t + h),
        iterations,
        residual,
    })
}

pub fn integrate_baseline(
    method: BaselineMethod,
    system: &dyn HamiltonianSystem,
    initial: &State,
    h: f64,
    n_steps: usize,
    opts: &SolverOptions,
) -> Result<Trajectory, IntegrationFailure> {
    integrate_with(system, initial, h, n_steps, |state| {
        baseline_step(method, system, state, h, opts)
    })
}
