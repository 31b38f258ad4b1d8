//! A uniform handle over csPRK schemes and baselines, plus convergence studies.

use std::fmt;
use std::thread;

use serde::Serialize;
use thiserror::Error;

use crate::baselines::{integrate_baseline, BaselineMethod};
use crate::integrator::{CsprkScheme, IntegrationFailure, SolverOptions, State, Trajectory};
use crate::problems::HamiltonianSystem;

#[derive(Debug, Clone)]
pub enum Method {
    Csprk(Box<CsprkScheme>),
    Baseline(BaselineMethod),
}

impl Method {
    pub fn integrate(
        &self,
        system: &dyn HamiltonianSystem,
        initial: &State,
        h: f64,
        n_steps: usize,
        opts: &SolverOptions,
    ) -> Result<Trajectory, IntegrationFailure> {
        match self {
            Method::Csprk(scheme) => scheme.integrate(system, initial, h, n_steps, opts),
            Method::Baseline(m) => integrate_baseline(*m, system, initial, h, n_steps, opts),
        }
    }
}

impl From<CsprkScheme> for Method {
    fn from(scheme: CsprkScheme) -> Self {
        Method::Csprk(Box::new(scheme))
    }
}

impl From<BaselineMethod> for Method {
    fn from(m: BaselineMethod) -> Self {
        Method::Baseline(m)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Csprk(s) => write!(
                f,
                "csprk(s={}, r={}, k={})",
                s.tableau().a().rows(),
                s.tableau().a().cols(),
                s.quadrature().len()
            ),
            Method::Baseline(m) => write!(f, "{m}"),
        }
    }
}

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

/// Errors at a fixed end time for a ladder of step sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub t_end: f64,
    pub h: Vec<f64>,
    pub error: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub fitted_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvergenceError {
    #[error("system `{0}` has no exact solution")]
    NoExactSolution(String),
    #[error("need at least two positive step sizes")]
    TooFewSteps,
    #[error("step size {h} does not divide t_end = {t_end}")]
    NonDividingStep { h: f64, t_end: f64 },
    #[error("integration with h = {h} failed: {failure}")]
    Integration { h: f64, failure: IntegrationFailure },
}

/// Runs `method` to `t_end` for every `h` (concurrently) and fits the slope.
pub fn convergence_study(
    method: &Method,
    system: &dyn HamiltonianSystem,
    hs: &[f64],
    t_end: f64,
    opts: &SolverOptions,
) -> Result<ConvergenceStudy, ConvergenceError> {
    if system.exact_solution(t_end).is_none() {
        return Err(ConvergenceError::NoExactSolution(system.name().into()));
    }
    if hs.len() < 2 || hs.iter().any(|&h| h.is_nan() || h <= 0.0) {
        return Err(ConvergenceError::TooFewSteps);
    }
    let mut steps = Vec::with_capacity(hs.len());
    for &h in hs {
        let n = (t_end / h).round();
        if n < 1.0 || (n * h - t_end).abs() > 1e-9 * t_end.abs().max(1.0) {
            return Err(ConvergenceError::NonDividingStep { h, t_end });
        }
        steps.push(n as usize);
    }

    let initial = system.initial_state();
    let results: Vec<Result<f64, ConvergenceError>> = thread::scope(|scope| {
        let handles: Vec<_> = hs
            .iter()
            .zip(&steps)
            .map(|(&h, &n)| {
                let initial = &initial;
                scope.spawn(move || {
                    let traj = method
                        .integrate(system, initial, h, n, opts)
                        .map_err(|failure| ConvergenceError::Integration { h, failure })?;
                    let last = traj.last().expect("trajectory is never empty");
                    let exact = system.exact_solution(last.state.t).expect("checked above");
                    Ok(exact.max_distance(&last.state))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence worker panicked"))
            .collect()
    });
    let error = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let log_h: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let log_e: Vec<f64> = error.iter().map(|e| e.ln()).collect();
    let fitted_slope = least_squares(&log_h, &log_e).slope;
    Ok(ConvergenceStudy {
        t_end,
        h: hs.to_vec(),
        error,
        fitted_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{henon_heiles, LinearSystem};

    #[test]
    fn exact_line_fit() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let fit = least_squares(&x, &y);
        assert!((fit.slope - 2.0).abs() < 1e-15);
        assert!((fit.intercept - 1.0).abs() < 1e-15);
        assert!((fit.r_squared - 1.0).abs() < 1e-15);
    }

    #[test]
    fn explicit_euler_is_first_order() {
        let study = convergence_study(
            &BaselineMethod::ExplicitEuler.into(),
            &LinearSystem::default(),
            &[0.1, 0.05, 0.025, 0.0125],
            1.0,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!((study.fitted_slope - 1.0).abs() < 0.15, "{study:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let euler: Method = BaselineMethod::ExplicitEuler.into();
        let opts = SolverOptions::default();
        assert!(matches!(
            convergence_study(&euler, &henon_heiles(), &[0.1, 0.05], 1.0, &opts),
            Err(ConvergenceError::NoExactSolution(_))
        ));
        assert!(matches!(
            convergence_study(&euler, &LinearSystem::default(), &[0.3, 0.1], 1.0, &opts),
            Err(ConvergenceError::NonDividingStep { .. })
        ));
        assert_eq!(
            convergence_study(&euler, &LinearSystem::default(), &[0.1], 1.0, &opts),
            Err(ConvergenceError::TooFewSteps)
        );
    }
}
