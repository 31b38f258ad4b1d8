//! The quadrature-discretized csPRK step and trajectory integration.
//!
//! With a `k`-point rule `(b_m, c_m)` the stage polynomials satisfy
//!
//! ```text
//! P(τ) = p0 - h Σ_m b_m A(τ, c_m) ∇_q H(P(c_m), Q(c_m))
//! Q(τ) = q0 + h Σ_m b_m Â(τ, c_m) ∇_p H(P(c_m), Q(c_m))
//! ```
//!
//! `P` has degree `s` and `Q` degree `r`, so the unknowns are their Legendre
//! coefficients `λ` (`(s+1) × d`) and `μ` (`(r+1) × d`). The size of the
//! nonlinear system does not depend on `k`.

use thiserror::Error;

use crate::coefficients::{CsprkTableau, TensorKernel};
use crate::polynomials::{legendre_integral_expansion, legendre_values};
use crate::problems::{HamiltonianSystem, Invariant};
use crate::quadrature::{gauss_legendre, Quadrature};

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: f64,
}

impl State {
    pub fn new(p: Vec<f64>, q: Vec<f64>, t: f64) -> Self {
        Self { p, q, t }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// `max(|p - other.p|, |q - other.q|)` componentwise.
    pub fn max_distance(&self, other: &State) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .chain(self.q.iter().zip(&other.q))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialGuess {
    /// `P ≡ p0`, `Q ≡ q0`.
    #[default]
    Constant,
    /// The previous step's stage polynomials, shifted to the new initial values.
    PreviousStep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub guess: InitialGuess,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-14,
            max_iterations: 100,
            guess: InitialGuess::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error(
        "stage iteration did not converge in {iterations} iterations (last update {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("non-finite gradient encountered")]
    NonFiniteGradient,
    #[error("state has dimension {got}, system expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("solver tolerance must be positive")]
    InvalidTolerance,
    #[error("{0} requires a separable Hamiltonian")]
    NotSeparable(&'static str),
}

/// Converged stage polynomials in the Legendre basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSolution {
    /// `lambda[n]` multiplies `L_n` in `P(τ)`.
    pub lambda: Vec<Vec<f64>>,
    /// `mu[n]` multiplies `L_n` in `Q(τ)`.
    pub mu: Vec<Vec<f64>>,
    pub iterations: usize,
    /// Max-norm of the fixed-point map residual at the returned coefficients.
    pub residual: f64,
}

fn legendre_series(coeffs: &[Vec<f64>], tau: f64) -> Vec<f64> {
    let l = legendre_values(coeffs.len() - 1, tau);
    let d = coeffs[0].len();
    let mut out = vec![0.0; d];
    for (row, ln) in coeffs.iter().zip(&l) {
        for (o, c) in out.iter_mut().zip(row) {
            *o += ln * c;
        }
    }
    out
}

/// Matrix `E[j][i] = ∫_0^1 L_j(τ) L_i(1 + τ) dτ` re-expanding `τ ↦ P(1 + τ)`
/// in the Legendre basis.
fn continuation(degree: usize) -> Vec<Vec<f64>> {
    let quad = gauss_legendre(degree + 1).expect("stage degree is far below the node cap");
    let mut e = vec![vec![0.0; degree + 1]; degree + 1];
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        let shifted = legendre_values(degree, 1.0 + x);
        for (row, lj) in e.iter_mut().zip(legendre_values(degree, x)) {
            for (entry, li) in row.iter_mut().zip(&shifted) {
                *entry += w * lj * li;
            }
        }
    }
    e
}

/// Continues the previous stage series past `τ = 1`, then shifts the constant
/// term so it starts at `x0`.
fn continue_series(e: &[Vec<f64>], prev: &[Vec<f64>], x0: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = e
        .iter()
        .map(|row| {
            let mut acc = vec![0.0; x0.len()];
            for (eji, coeffs) in row.iter().zip(prev) {
                for (a, c) in acc.iter_mut().zip(coeffs) {
                    *a += eji * c;
                }
            }
            acc
        })
        .collect();
    let start = legendre_series(&out, 0.0);
    for ((c, s), x) in out[0].iter_mut().zip(&start).zip(x0) {
        *c += x - s;
    }
    out
}

impl StageSolution {
    pub fn p_at(&self, tau: f64) -> Vec<f64> {
        legendre_series(&self.lambda, tau)
    }

    pub fn q_at(&self, tau: f64) -> Vec<f64> {
        legendre_series(&self.mu, tau)
    }
}

/// One row of length `d` per quadrature node.
type NodeValues = Vec<Vec<f64>>;

/// Precomputed linear maps of a tableau discretized by a quadrature rule.
#[derive(Debug, Clone)]
pub struct CsprkScheme {
    tableau: CsprkTableau,
    quad: Quadrature,
    /// `(s+1) × k`: node gradients to Legendre coefficients of `P - p0`.
    p_map: Vec<Vec<f64>>,
    q_map: Vec<Vec<f64>>,
    /// `k × (s+1)`: `L_n(c_m)`.
    p_eval: Vec<Vec<f64>>,
    q_eval: Vec<Vec<f64>>,
    /// `b_m B(c_m)` and `b_m B̂(c_m)`.
    p_update: Vec<f64>,
    q_update: Vec<f64>,
    /// Warm-start continuation matrices.
    p_continue: Vec<Vec<f64>>,
    q_continue: Vec<Vec<f64>>,
}

fn projection(kernel: &TensorKernel, quad: &Quadrature) -> Vec<Vec<f64>> {
    let degree = kernel.rows();
    let mut map = vec![vec![0.0; quad.len()]; degree + 1];
    for (m, (&c, &b)) in quad.nodes().iter().zip(quad.weights()).enumerate() {
        let l = legendre_values(kernel.cols() - 1, c);
        for i in 0..kernel.rows() {
            let weight: f64 = (0..kernel.cols()).map(|j| kernel.coeff(i, j) * l[j]).sum();
            for (n, e) in legendre_integral_expansion(i) {
                map[n][m] += b * weight * e;
            }
        }
    }
    map
}

fn evaluation(degree: usize, quad: &Quadrature) -> Vec<Vec<f64>> {
    quad.nodes()
        .iter()
        .map(|&c| legendre_values(degree, c))
        .collect()
}

impl CsprkScheme {
    pub fn new(tableau: CsprkTableau, quad: Quadrature) -> Self {
        let p_map = projection(tableau.a(), &quad);
        let q_map = projection(tableau.ahat(), &quad);
        let p_eval = evaluation(tableau.p_degree(), &quad);
        let q_eval = evaluation(tableau.q_degree(), &quad);
        let p_update = quad
            .nodes()
            .iter()
            .zip(quad.weights())
            .map(|(&c, &b)| b * tableau.b().eval(c))
            .collect();
        let q_update = quad
            .nodes()
            .iter()
            .zip(quad.weights())
            .map(|(&c, &b)| b * tableau.bhat().eval(c))
            .collect();
        Self {
            p_continue: continuation(tableau.p_degree()),
            q_continue: continuation(tableau.q_degree()),
            tableau,
            quad,
            p_map,
            q_map,
            p_eval,
            q_eval,
            p_update,
            q_update,
        }
    }

    pub fn tableau(&self) -> &CsprkTableau {
        &self.tableau
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    fn initial_coefficients(
        &self,
        state: &State,
        opts: &SolverOptions,
        warm: Option<&StageSolution>,
    ) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let d = state.dim();
        let constant = |degree: usize, x0: &[f64]| {
            let mut c = vec![vec![0.0; d]; degree + 1];
            c[0].copy_from_slice(x0);
            c
        };
        let mut lambda = constant(self.p_map.len() - 1, &state.p);
        let mut mu = constant(self.q_map.len() - 1, &state.q);
        if let (InitialGuess::PreviousStep, Some(prev)) = (opts.guess, warm) {
            if prev.lambda.len() == lambda.len() && prev.mu.len() == mu.len() {
                lambda = continue_series(&self.p_continue, &prev.lambda, &state.p);
                mu = continue_series(&self.q_continue, &prev.mu, &state.q);
            }
        }
        (lambda, mu)
    }

    /// Evaluates gradients at the nodes for the given coefficients.
    fn node_gradients(
        &self,
        system: &dyn HamiltonianSystem,
        lambda: &[Vec<f64>],
        mu: &[Vec<f64>],
        grad_q: &mut [Vec<f64>],
        grad_p: &mut [Vec<f64>],
    ) -> Result<(), StepError> {
        let d = lambda[0].len();
        let mut pm = vec![0.0; d];
        let mut qm = vec![0.0; d];
        for m in 0..self.quad.len() {
            pm.iter_mut().for_each(|v| *v = 0.0);
            qm.iter_mut().for_each(|v| *v = 0.0);
            for (row, l) in lambda.iter().zip(&self.p_eval[m]) {
                pm.iter_mut().zip(row).for_each(|(v, c)| *v += l * c);
            }
            for (row, l) in mu.iter().zip(&self.q_eval[m]) {
                qm.iter_mut().zip(row).for_each(|(v, c)| *v += l * c);
            }
            system.grad_q(&pm, &qm, &mut grad_q[m]);
            system.grad_p(&pm, &qm, &mut grad_p[m]);
            if grad_q[m]
                .iter()
                .chain(grad_p[m].iter())
                .any(|g| !g.is_finite())
            {
                return Err(StepError::NonFiniteGradient);
            }
        }
        Ok(())
    }

    /// Applies the fixed-point map, returning the new coefficients.
    fn apply_map(map: &[Vec<f64>], x0: &[f64], scale: f64, grads: &[Vec<f64>]) -> Vec<Vec<f64>> {
        map.iter()
            .enumerate()
            .map(|(n, row)| {
                let mut out = if n == 0 {
                    x0.to_vec()
                } else {
                    vec![0.0; x0.len()]
                };
                for (w, g) in row.iter().zip(grads) {
                    let f = scale * w;
                    out.iter_mut().zip(g).for_each(|(o, gi)| *o += f * gi);
                }
                out
            })
            .collect()
    }

    fn max_update(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(
                0.0,
                |acc: f64, v| if v.is_nan() { f64::NAN } else { acc.max(v) },
            )
    }

    fn validate(
        system: &dyn HamiltonianSystem,
        state: &State,
        opts: &SolverOptions,
    ) -> Result<(), StepError> {
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
        Ok(())
    }

    /// Fixed-point iteration on the stage coefficients.
    pub fn solve_stages(
        &self,
        system: &dyn HamiltonianSystem,
        state: &State,
        h: f64,
        opts: &SolverOptions,
        warm: Option<&StageSolution>,
    ) -> Result<StageSolution, StepError> {
        Self::validate(system, state, opts)?;
        self.iterate(system, state, h, opts, warm)
            .map(|(solution, _, _)| solution)
    }

    // Returns the solution and the node gradients `(∇_q H, ∇_p H)` at the
    // final coefficients.
    fn iterate(
        &self,
        system: &dyn HamiltonianSystem,
        state: &State,
        h: f64,
        opts: &SolverOptions,
        warm: Option<&StageSolution>,
    ) -> Result<(StageSolution, NodeValues, NodeValues), StepError> {
        let d = state.dim();
        let k = self.quad.len();
        let (mut lambda, mut mu) = self.initial_coefficients(state, opts, warm);
        let mut grad_q = vec![vec![0.0; d]; k];
        let mut grad_p = vec![vec![0.0; d]; k];

        let mut iterations = 0;
        let mut update = f64::INFINITY;
        while iterations < opts.max_iterations {
            iterations += 1;
            self.node_gradients(system, &lambda, &mu, &mut grad_q, &mut grad_p)?;
            let next_lambda = Self::apply_map(&self.p_map, &state.p, -h, &grad_q);
            let next_mu = Self::apply_map(&self.q_map, &state.q, h, &grad_p);
            update = Self::max_update(&next_lambda, &lambda).max(Self::max_update(&next_mu, &mu));
            lambda = next_lambda;
            mu = next_mu;
            if update.is_nan() {
                break;
            }
            if update <= opts.tolerance {
                break;
            }
        }
        if update.is_nan() || update > opts.tolerance {
            return Err(StepError::NoConvergence {
                iterations,
                residual: update,
            });
        }

        self.node_gradients(system, &lambda, &mu, &mut grad_q, &mut grad_p)?;
        let residual = Self::max_update(
            &Self::apply_map(&self.p_map, &state.p, -h, &grad_q),
            &lambda,
        )
        .max(Self::max_update(
            &Self::apply_map(&self.q_map, &state.q, h, &grad_p),
            &mu,
        ));
        Ok((
            StageSolution {
                lambda,
                mu,
                iterations,
                residual,
            },
            grad_q,
            grad_p,
        ))
    }

    /// One step of size `h` (either sign).
    pub fn step(
        &self,
        system: &dyn HamiltonianSystem,
        state: &State,
        h: f64,
        opts: &SolverOptions,
        warm: Option<&StageSolution>,
    ) -> Result<(State, StageSolution), StepError> {
        Self::validate(system, state, opts)?;
        let (solution, grad_q, grad_p) = self.iterate(system, state, h, opts, warm)?;
        let mut p = state.p.clone();
        let mut q = state.q.clone();
        for m in 0..self.quad.len() {
            let fp = -h * self.p_update[m];
            let fq = h * self.q_update[m];
            p.iter_mut().zip(&grad_q[m]).for_each(|(x, g)| *x += fp * g);
            q.iter_mut().zip(&grad_p[m]).for_each(|(x, g)| *x += fq * g);
        }
        Ok((State::new(p, q, state.t + h), solution))
    }

    pub fn integrate(
        &self,
        system: &dyn HamiltonianSystem,
        initial: &State,
        h: f64,
        n_steps: usize,
        opts: &SolverOptions,
    ) -> Result<Trajectory, IntegrationFailure> {
        let mut warm: Option<StageSolution> = None;
        integrate_with(system, initial, h, n_steps, |state| {
            let (next, solution) = self.step(system, state, h, opts, warm.as_ref())?;
            let outcome = StepOutcome {
                state: next,
                iterations: solution.iterations,
                residual: solution.residual,
            };
            warm = Some(solution);
            Ok(outcome)
        })
    }
}

/// One csPRK step; see [`CsprkScheme::step`].
pub fn step(
    system: &dyn HamiltonianSystem,
    tableau: &CsprkTableau,
    quad: &Quadrature,
    state: &State,
    h: f64,
    opts: &SolverOptions,
) -> Result<(State, StageSolution), StepError> {
    CsprkScheme::new(tableau.clone(), quad.clone()).step(system, state, h, opts, None)
}

pub fn solve_stages(
    system: &dyn HamiltonianSystem,
    tableau: &CsprkTableau,
    quad: &Quadrature,
    state: &State,
    h: f64,
    opts: &SolverOptions,
) -> Result<StageSolution, StepError> {
    CsprkScheme::new(tableau.clone(), quad.clone()).solve_stages(system, state, h, opts, None)
}

/// `n_steps` csPRK steps from `initial`.
pub fn integrate(
    system: &dyn HamiltonianSystem,
    tableau: &CsprkTableau,
    quad: &Quadrature,
    initial: &State,
    h: f64,
    n_steps: usize,
    opts: &SolverOptions,
) -> Result<Trajectory, IntegrationFailure> {
    CsprkScheme::new(tableau.clone(), quad.clone()).integrate(system, initial, h, n_steps, opts)
}

/// Result of a single step of any one-step method.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: State,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub state: State,
    /// `|I(t_n) - I(t_0)|` in max norm, in the order of `system.invariants()`.
    pub invariant_errors: Vec<(Invariant, f64)>,
    /// Max-norm distance to the exact solution, when known.
    pub solution_error: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    pub fn states(&self) -> impl Iterator<Item = &State> {
        self.points.iter().map(|pt| &pt.state)
    }

    /// Error series of one invariant; `None` if it is not tracked.
    pub fn invariant_errors(&self, which: Invariant) -> Option<Vec<f64>> {
        self.points
            .iter()
            .map(|pt| {
                pt.invariant_errors
                    .iter()
                    .find(|(inv, _)| *inv == which)
                    .map(|(_, e)| *e)
            })
            .collect()
    }

    pub fn max_invariant_error(&self, which: Invariant) -> Option<f64> {
        self.invariant_errors(which)
            .map(|v| v.into_iter().fold(0.0, f64::max))
    }

    pub fn solution_errors(&self) -> Option<Vec<f64>> {
        self.points.iter().map(|pt| pt.solution_error).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("step {step} failed: {error}")]
pub struct IntegrationFailure {
    /// Zero-based index of the failing step.
    pub step: usize,
    pub error: StepError,
    /// Everything computed before the failure.
    pub partial: Trajectory,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Drives any one-step map, recording invariant and solution errors.
///
/// Solution errors are recorded only when `initial` is the system's own
/// initial state, since that is the orbit the exact solution describes.
pub fn integrate_with<F>(
    system: &dyn HamiltonianSystem,
    initial: &State,
    h: f64,
    n_steps: usize,
    mut advance: F,
) -> Result<Trajectory, IntegrationFailure>
where
    F: FnMut(&State) -> Result<StepOutcome, StepError>,
{
    let reference: Vec<(Invariant, Vec<f64>)> = system
        .invariants()
        .iter()
        .filter_map(|&inv| Some((inv, system.invariant(inv, &initial.p, &initial.q)?)))
        .collect();
    let own_orbit = {
        let s0 = system.initial_state();
        s0.p == initial.p && s0.q == initial.q && initial.t == 0.0
    };
    let record = |state: State, iterations: usize, residual: f64| {
        let invariant_errors = reference
            .iter()
            .map(|(inv, v0)| {
                let v = system
                    .invariant(*inv, &state.p, &state.q)
                    .expect("invariant was defined at the initial state");
                (*inv, max_abs_diff(&v, v0))
            })
            .collect();
        let solution_error = if own_orbit {
            system
                .exact_solution(state.t)
                .map(|exact| exact.max_distance(&state))
        } else {
            None
        };
        TrajectoryPoint {
            state,
            invariant_errors,
            solution_error,
            iterations,
            residual,
        }
    };

    let mut trajectory = Trajectory {
        points: Vec::with_capacity(n_steps + 1),
    };
    trajectory.points.push(record(initial.clone(), 0, 0.0));
    for n in 0..n_steps {
        let current = &trajectory.points[n].state;
        match advance(current) {
            Ok(StepOutcome {
                mut state,
                iterations,
                residual,
            }) => {
                state.t = initial.t + (n + 1) as f64 * h;
                trajectory.points.push(record(state, iterations, residual));
            }
            Err(error) => {
                return Err(IntegrationFailure {
                    step: n,
                    error,
                    partial: trajectory,
                })
            }
        }
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{build_tableau, preset};
    use crate::problems::{henon_heiles, kepler, LinearSystem};
    use crate::quadrature::gauss_legendre;

    struct Constant;

    impl HamiltonianSystem for Constant {
        fn name(&self) -> &str {
            "constant"
        }
        fn dim(&self) -> usize {
            2
        }
        fn energy(&self, _p: &[f64], _q: &[f64]) -> f64 {
            1.0
        }
        fn grad_p(&self, _p: &[f64], _q: &[f64], out: &mut [f64]) {
            out.fill(0.0);
        }
        fn grad_q(&self, _p: &[f64], _q: &[f64], out: &mut [f64]) {
            out.fill(0.0);
        }
        fn initial_state(&self) -> State {
            State::new(vec![0.3, -0.1], vec![1.0, 2.0], 0.0)
        }
    }

    fn scheme(name: &str, params: &[f64], k: usize) -> CsprkScheme {
        let t = build_tableau(&preset(name, params).unwrap()).unwrap();
        CsprkScheme::new(t, gauss_legendre(k).unwrap())
    }

    // (I - hL/2)^{-1} (I + hL/2) z for the 2×2 matrix L.
    fn midpoint_oracle(sys: &LinearSystem, z: [f64; 2], h: f64) -> [f64; 2] {
        let l = sys.matrix();
        let m = [
            [1.0 - 0.5 * h * l[0][0], -0.5 * h * l[0][1]],
            [-0.5 * h * l[1][0], 1.0 - 0.5 * h * l[1][1]],
        ];
        let rhs = [
            z[0] + 0.5 * h * (l[0][0] * z[0] + l[0][1] * z[1]),
            z[1] + 0.5 * h * (l[1][0] * z[0] + l[1][1] * z[1]),
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        [
            (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det,
            (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
        ]
    }

    #[test]
    fn zero_step_is_identity() {
        let sys = henon_heiles();
        let s0 = sys.initial_state();
        let (s1, sol) = scheme("ex33", &[1.0, 1.0], 6)
            .step(&sys, &s0, 0.0, &SolverOptions::default(), None)
            .unwrap();
        assert_eq!(s1.p, s0.p);
        assert_eq!(s1.q, s0.q);
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn zero_vector_field() {
        let sys = Constant;
        let s0 = sys.initial_state();
        let sol = scheme("ex32", &[1.0, 1.0], 5)
            .solve_stages(&sys, &s0, 0.3, &SolverOptions::default(), None)
            .unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.lambda[0], s0.p);
        assert_eq!(sol.mu[0], s0.q);
        assert!(sol.lambda[1..].iter().flatten().all(|&c| c == 0.0));
        assert_eq!(sol.p_at(0.7), s0.p);
    }

    #[test]
    fn avf_on_linear_is_implicit_midpoint() {
        let sys = LinearSystem::default();
        let s0 = sys.initial_state();
        let h = 0.1;
        let scheme = scheme("avf", &[], 2);
        let (s1, sol) = scheme
            .step(&sys, &s0, h, &SolverOptions::default(), None)
            .unwrap();
        let oracle = midpoint_oracle(&sys, [s0.p[0], s0.q[0]], h);
        assert!((s1.p[0] - oracle[0]).abs() < 1e-12);
        assert!((s1.q[0] - oracle[1]).abs() < 1e-12);
        // Stage polynomial is the chord between the endpoints.
        for tau in [0.0, 0.25, 0.5, 1.0] {
            let p = s0.p[0] + tau * (oracle[0] - s0.p[0]);
            let q = s0.q[0] + tau * (oracle[1] - s0.q[0]);
            assert!((sol.p_at(tau)[0] - p).abs() < 1e-12);
            assert!((sol.q_at(tau)[0] - q).abs() < 1e-12);
        }
    }

    #[test]
    fn stage_polynomials_start_at_initial_values() {
        let sys = kepler();
        let s0 = sys.initial_state();
        let opts = SolverOptions::default();
        let (s1, sol) = scheme("ex33", &[1.0, 0.0], 6)
            .step(&sys, &s0, 0.1, &opts, None)
            .unwrap();
        for (a, b) in sol.p_at(0.0).iter().zip(&s0.p) {
            assert!((a - b).abs() < 1e-13);
        }
        for (a, b) in sol.q_at(1.0).iter().zip(&s1.q) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(sol.iterations < 100);
        assert!(sol.residual <= 1e-13);
    }

    #[test]
    fn henon_heiles_step_is_energy_exact() {
        let sys = henon_heiles();
        let s0 = sys.initial_state();
        let (s1, _) = scheme("ex32", &[1.0, 0.0], 5)
            .step(&sys, &s0, 0.1, &SolverOptions::default(), None)
            .unwrap();
        let e0 = sys.energy(&s0.p, &s0.q);
        assert!((sys.energy(&s1.p, &s1.q) - e0).abs() <= 1e-12);
    }

    #[test]
    fn warm_start_matches_cold_start() {
        let sys = kepler();
        let s0 = sys.initial_state();
        let sch = scheme("ex33", &[1.0, 0.0], 6);
        let cold = sch
            .integrate(&sys, &s0, 0.1, 50, &SolverOptions::default())
            .unwrap();
        let warm_opts = SolverOptions {
            guess: InitialGuess::PreviousStep,
            ..SolverOptions::default()
        };
        let warm = sch.integrate(&sys, &s0, 0.1, 50, &warm_opts).unwrap();
        let a = cold.last().unwrap();
        let b = warm.last().unwrap();
        assert!(a.state.max_distance(&b.state) < 1e-12);
        let cold_iters: usize = cold.points.iter().map(|p| p.iterations).sum();
        let warm_iters: usize = warm.points.iter().map(|p| p.iterations).sum();
        assert!(warm_iters < cold_iters, "{warm_iters} vs {cold_iters}");
    }

    #[test]
    fn non_convergence_is_reported() {
        let sys = henon_heiles();
        let s0 = sys.initial_state();
        let opts = SolverOptions {
            max_iterations: 2,
            ..SolverOptions::default()
        };
        let err = scheme("avf", &[], 3)
            .step(&sys, &s0, 0.1, &opts, None)
            .unwrap_err();
        assert!(matches!(
            err,
            StepError::NoConvergence { iterations: 2, .. }
        ));
    }

    #[test]
    fn singular_gradient_is_reported() {
        let sys = kepler();
        let s0 = State::new(vec![0.0, 0.0], vec![0.0, 0.0], 0.0);
        let err = scheme("avf", &[], 2)
            .step(&sys, &s0, 0.1, &SolverOptions::default(), None)
            .unwrap_err();
        assert_eq!(err, StepError::NonFiniteGradient);
    }

    #[test]
    fn dimension_and_tolerance_checks() {
        let sys = kepler();
        let bad = State::new(vec![0.0], vec![1.0], 0.0);
        let sch = scheme("avf", &[], 2);
        assert!(matches!(
            sch.step(&sys, &bad, 0.1, &SolverOptions::default(), None),
            Err(StepError::DimensionMismatch { expected: 2, .. })
        ));
        let opts = SolverOptions {
            tolerance: 0.0,
            ..SolverOptions::default()
        };
        assert_eq!(
            sch.step(&sys, &sys.initial_state(), 0.1, &opts, None),
            Err(StepError::InvalidTolerance)
        );
    }

    #[test]
    fn trajectory_bookkeeping() {
        let sys = kepler();
        let s0 = sys.initial_state();
        let sch = scheme("avf", &[], 4);
        let traj = sch
            .integrate(&sys, &s0, 0.1, 0, &SolverOptions::default())
            .unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.points[0].solution_error, Some(0.0));
        assert_eq!(traj.max_invariant_error(Invariant::RungeLenz), Some(0.0));

        let traj = sch
            .integrate(&sys, &s0, 0.1, 10, &SolverOptions::default())
            .unwrap();
        assert_eq!(traj.len(), 11);
        assert!((traj.last().unwrap().state.t - 1.0).abs() < 1e-15);
        assert!(traj.points.windows(2).all(|w| w[1].state.t > w[0].state.t));
        assert_eq!(
            traj.invariant_errors(Invariant::AngularMomentum)
                .unwrap()
                .len(),
            11
        );
    }

    #[test]
    fn failure_keeps_partial_trajectory() {
        let sys = kepler();
        let s0 = sys.initial_state();
        let mut calls = 0;
        let err = integrate_with(&sys, &s0, 0.1, 5, |state| {
            calls += 1;
            if calls == 3 {
                return Err(StepError::NonFiniteGradient);
            }
            Ok(StepOutcome {
                state: state.clone(),
                iterations: 1,
                residual: 0.0,
            })
        })
        .unwrap_err();
        assert_eq!(err.step, 2);
        assert_eq!(err.partial.len(), 3);
    }
}
