//! Benchmark Hamiltonian systems.

use std::fmt;

use crate::integrator::State;

/// A first integral tracked along trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Invariant {
    /// The Hamiltonian `H`.
    Energy,
    /// `I = q_1 p_2 - q_2 p_1`.
    AngularMomentum,
    /// Runge-Lenz-Pauli vector, stored with three components.
    RungeLenz,
}

impl Invariant {
    pub fn label(self) -> &'static str {
        match self {
            Invariant::Energy => "H",
            Invariant::AngularMomentum => "I",
            Invariant::RungeLenz => "L",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `ṗ = -∇_q H(p, q)`, `q̇ = ∇_p H(p, q)` with `d` degrees of freedom.
pub trait HamiltonianSystem: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn energy(&self, p: &[f64], q: &[f64]) -> f64;

    /// Writes `∇_p H(p, q)` into `out`.
    fn grad_p(&self, p: &[f64], q: &[f64], out: &mut [f64]);

    /// Writes `∇_q H(p, q)` into `out`.
    fn grad_q(&self, p: &[f64], q: &[f64], out: &mut [f64]);

    fn initial_state(&self) -> State;

    /// Invariants reported along trajectories; always starts with the energy.
    fn invariants(&self) -> &[Invariant] {
        &[Invariant::Energy]
    }

    /// Value of `which`, or `None` when the system does not define it.
    fn invariant(&self, which: Invariant, p: &[f64], q: &[f64]) -> Option<Vec<f64>> {
        match which {
            Invariant::Energy => Some(vec![self.energy(p, q)]),
            _ => None,
        }
    }

    /// Exact solution through [`HamiltonianSystem::initial_state`], if known.
    fn exact_solution(&self, _t: f64) -> Option<State> {
        None
    }

    /// Total degree `ν` of a polynomial Hamiltonian.
    fn poly_degree(&self) -> Option<usize> {
        None
    }

    /// True when `∇_p H` depends on `p` only and `∇_q H` on `q` only.
    fn is_separable(&self) -> bool {
        false
    }
}

/// `H = ½ a p² + ½ c q² - b p q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSystem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p0: f64,
    pub q0: f64,
}

pub fn linear_system(a: f64, b: f64, c: f64, p0: f64, q0: f64) -> LinearSystem {
    LinearSystem { a, b, c, p0, q0 }
}

impl LinearSystem {
    /// `ω = sqrt(ac - b²)` when the motion is periodic.
    pub fn omega(&self) -> Option<f64> {
        let disc = self.a * self.c - self.b * self.b;
        (disc > 0.0).then(|| disc.sqrt())
    }

    /// The matrix of `ż = L z` for `z = (p, q)`, row-major.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.b, -self.c], [self.a, -self.b]]
    }
}

impl Default for LinearSystem {
    fn default() -> Self {
        linear_system(1.0, -1.0, 2.0, 0.5, 0.0)
    }
}

impl HamiltonianSystem for LinearSystem {
    fn name(&self) -> &str {
        "linear"
    }

    fn dim(&self) -> usize {
        1
    }

    fn energy(&self, p: &[f64], q: &[f64]) -> f64 {
        0.5 * self.a * p[0] * p[0] + 0.5 * self.c * q[0] * q[0] - self.b * p[0] * q[0]
    }

    fn grad_p(&self, p: &[f64], q: &[f64], out: &mut [f64]) {
        out[0] = self.a * p[0] - self.b * q[0];
    }

    fn grad_q(&self, p: &[f64], q: &[f64], out: &mut [f64]) {
        out[0] = self.c * q[0] - self.b * p[0];
    }

    fn initial_state(&self) -> State {
        State::new(vec![self.p0], vec![self.q0], 0.0)
    }

    fn exact_solution(&self, t: f64) -> Option<State> {
        let w = self.omega()?;
        let (sin, cos) = (w * t).sin_cos();
        let p = (cos + self.b / w * sin) * self.p0 - self.c / w * sin * self.q0;
        let q = self.a / w * sin * self.p0 + (cos - self.b / w * sin) * self.q0;
        Some(State::new(vec![p], vec![q], t))
    }

    fn poly_degree(&self) -> Option<usize> {
        Some(2)
    }

    fn is_separable(&self) -> bool {
        self.b == 0.0
    }
}

/// `H = ½|p|² + ½|q|² + q_1² q_2 - q_2³/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HenonHeiles {
    pub initial: [f64; 4],
}

pub fn henon_heiles() -> HenonHeiles {
    HenonHeiles::default()
}

impl Default for HenonHeiles {
    /// `(p_1, p_2, q_1, q_2) = (0, 0, 0.1, -0.5)`, a chaotic orbit.
    fn default() -> Self {
        Self {
            initial: [0.0, 0.0, 0.1, -0.5],
        }
    }
}

impl HamiltonianSystem for HenonHeiles {
    fn name(&self) -> &str {
        "henon-heiles"
    }

    fn dim(&self) -> usize {
        2
    }

    fn energy(&self, p: &[f64], q: &[f64]) -> f64 {
        0.5 * (p[0] * p[0] + p[1] * p[1]) + 0.5 * (q[0] * q[0] + q[1] * q[1]) + q[0] * q[0] * q[1]
            - q[1].powi(3) / 3.0
    }

    fn grad_p(&self, p: &[f64], _q: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&p[..2]);
    }

    fn grad_q(&self, _p: &[f64], q: &[f64], out: &mut [f64]) {
        out[0] = q[0] + 2.0 * q[0] * q[1];
        out[1] = q[1] + q[0] * q[0] - q[1] * q[1];
    }

    fn initial_state(&self) -> State {
        let [p1, p2, q1, q2] = self.initial;
        State::new(vec![p1, p2], vec![q1, q2], 0.0)
    }

    fn poly_degree(&self) -> Option<usize> {
        Some(3)
    }

    fn is_separable(&self) -> bool {
        true
    }
}

/// `H = ½|p|² - 1/|q|` with angular momentum and the Runge-Lenz-Pauli vector.
///
/// The exact solution is the unit circular orbit through
/// `(p, q) = ((0, 1), (1, 0))`. The origin is singular.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Kepler;

pub fn kepler() -> Kepler {
    Kepler
}

impl Kepler {
    pub fn angular_momentum(p: &[f64], q: &[f64]) -> f64 {
        q[0] * p[1] - q[1] * p[0]
    }

    /// `(p, 0) × (0, 0, I) - (q, 0)/|q|`.
    pub fn runge_lenz(p: &[f64], q: &[f64]) -> [f64; 3] {
        let i = Self::angular_momentum(p, q);
        let r = q[0].hypot(q[1]);
        [p[1] * i - q[0] / r, -p[0] * i - q[1] / r, 0.0]
    }
}

impl HamiltonianSystem for Kepler {
    fn name(&self) -> &str {
        "kepler"
    }

    fn dim(&self) -> usize {
        2
    }

    fn energy(&self, p: &[f64], q: &[f64]) -> f64 {
        0.5 * (p[0] * p[0] + p[1] * p[1]) - 1.0 / q[0].hypot(q[1])
    }

    fn grad_p(&self, p: &[f64], _q: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&p[..2]);
    }

    fn grad_q(&self, _p: &[f64], q: &[f64], out: &mut [f64]) {
        let r2 = q[0] * q[0] + q[1] * q[1];
        let r3 = r2 * r2.sqrt();
        out[0] = q[0] / r3;
        out[1] = q[1] / r3;
    }

    fn initial_state(&self) -> State {
        State::new(vec![0.0, 1.0], vec![1.0, 0.0], 0.0)
    }

    fn invariants(&self) -> &[Invariant] {
        &[
            Invariant::Energy,
            Invariant::AngularMomentum,
            Invariant::RungeLenz,
        ]
    }

    fn invariant(&self, which: Invariant, p: &[f64], q: &[f64]) -> Option<Vec<f64>> {
        Some(match which {
            Invariant::Energy => vec![self.energy(p, q)],
            Invariant::AngularMomentum => vec![Self::angular_momentum(p, q)],
            Invariant::RungeLenz => Self::runge_lenz(p, q).to_vec(),
        })
    }

    fn exact_solution(&self, t: f64) -> Option<State> {
        let (sin, cos) = t.sin_cos();
        Some(State::new(vec![-sin, cos], vec![cos, sin], t))
    }

    fn is_separable(&self) -> bool {
        true
    }
}

/// Looks up a benchmark by its command-line name with default parameters.
pub fn by_name(name: &str) -> Option<Box<dyn HamiltonianSystem>> {
    match name {
        "linear" => Some(Box::new(LinearSystem::default())),
        "henon-heiles" | "henon_heiles" => Some(Box::new(henon_heiles())),
        "kepler" => Some(Box::new(kepler())),
        _ => None,
    }
}
