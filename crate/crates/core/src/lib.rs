//! Energy-preserving continuous-stage partitioned Runge-Kutta (csPRK)
//! integrators for Hamiltonian systems.
//!
//! Methods are generated from a Legendre-coefficient matrix `α`
//! ([`coefficients`]), discretized with a quadrature rule ([`quadrature`]) and
//! advanced by fixed-point iteration on the stage-polynomial coefficients
//! ([`integrator`]). Classical reference methods live in [`baselines`] and the
//! benchmark systems in [`problems`].

pub mod baselines;
pub mod coefficients;
pub mod integrator;
pub mod method;
pub mod polynomials;
pub mod problems;
pub mod quadrature;

pub use baselines::{baseline_step, integrate_baseline, BaselineMethod};
pub use coefficients::{
    build_tableau, check_energy_condition, estimate_order, order_certificate, preset,
    verify_simplifying_c, verify_simplifying_d, AlphaTableau, ConditionReport, CsprkTableau,
    OrderCertificate, Preset, TableauError, TensorKernel,
};
pub use integrator::{
    integrate, integrate_with, solve_stages, step, CsprkScheme, InitialGuess, IntegrationFailure,
    SolverOptions, StageSolution, State, StepError, StepOutcome, Trajectory, TrajectoryPoint,
};
pub use method::{convergence_study, ConvergenceStudy, Method};
pub use polynomials::{legendre, legendre_integral, xi, PolyError, UnitPolynomial};
pub use problems::{
    henon_heiles, kepler, linear_system, HamiltonianSystem, HenonHeiles, Invariant, Kepler,
    LinearSystem,
};
pub use quadrature::{gauss_legendre, interpolatory, min_nodes_for_exact_energy, Quadrature};
