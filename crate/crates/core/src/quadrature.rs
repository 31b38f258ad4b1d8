//! Quadrature rules on `[0, 1]` used to discretize the stage integrals.

use thiserror::Error;

pub const MAX_GAUSS_NODES: usize = 64;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;
const EXACTNESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("number of Gauss nodes must be in 1..={MAX_GAUSS_NODES}, got {0}")]
    NodeCountOutOfRange(usize),
    #[error("quadrature needs at least one node")]
    Empty,
    #[error("node {0} is not a finite value in [0, 1]")]
    NodeOutOfRange(f64),
    #[error("duplicate quadrature node {0}")]
    DuplicateNode(f64),
    #[error("interpolatory rules support at most {MAX_GAUSS_NODES} nodes")]
    TooManyNodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    Gauss,
    Interpolatory,
}

/// Nodes `c_i` and weights `b_i` of a rule `∫_0^1 φ ≈ Σ b_i φ(c_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exactness_degree: usize,
    kind: QuadratureKind,
}

impl Quadrature {
    /// Nodes in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of nodes `k`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest degree `m` such that every polynomial of degree `≤ m` is integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&c, &b)| b * f(c))
            .sum()
    }
}

/// Classical Legendre polynomial `P_k(y)` on `[-1, 1]` and its derivative.
fn legendre_with_derivative(k: usize, y: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = y;
    for n in 1..k {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * y * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let kf = k as f64;
    let dp = kf * (y * p1 - p0) / (y * y - 1.0);
    (p1, dp)
}

/// The `k`-point Gauss-Legendre rule on `[0, 1]`, exact to degree `2k - 1`.
pub fn gauss_legendre(k: usize) -> Result<Quadrature, QuadratureError> {
    if !(1..=MAX_GAUSS_NODES).contains(&k) {
        return Err(QuadratureError::NodeCountOutOfRange(k));
    }
    if k == 1 {
        return Ok(Quadrature {
            nodes: vec![0.5],
            weights: vec![1.0],
            exactness_degree: 1,
            kind: QuadratureKind::Gauss,
        });
    }

    let half = k.div_ceil(2);
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..half {
        // Roots on [-1, 1] in decreasing order.
        let mut y = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        if k % 2 == 1 && i == half - 1 {
            y = 0.0;
        } else {
            for _ in 0..NEWTON_MAX_ITER {
                let (p, dp) = legendre_with_derivative(k, y);
                let dy = p / dp;
                y -= dy;
                if dy.abs() <= NEWTON_TOL {
                    break;
                }
            }
        }
        let (_, dp) = legendre_with_derivative(k, y);
        let w = 1.0 / ((1.0 - y * y) * dp * dp);
        nodes[i] = 0.5 * (1.0 - y);
        nodes[k - 1 - i] = 0.5 * (1.0 + y);
        weights[i] = w;
        weights[k - 1 - i] = w;
    }

    Ok(Quadrature {
        nodes,
        weights,
        exactness_degree: 2 * k - 1,
        kind: QuadratureKind::Gauss,
    })
}

/// Interpolatory rule with weights `b_i = ∫_0^1 ℓ_i(x) dx`.
///
/// Each Lagrange basis polynomial `ℓ_i` has degree `k - 1`, so a `k`-point
/// Gauss rule integrates it exactly. `ℓ_i` is evaluated in product form.
pub fn interpolatory(nodes: &[f64]) -> Result<Quadrature, QuadratureError> {
    if nodes.is_empty() {
        return Err(QuadratureError::Empty);
    }
    if nodes.len() > MAX_GAUSS_NODES {
        return Err(QuadratureError::TooManyNodes);
    }
    if let Some(&bad) = nodes
        .iter()
        .find(|c| !c.is_finite() || **c < 0.0 || **c > 1.0)
    {
        return Err(QuadratureError::NodeOutOfRange(bad));
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(QuadratureError::DuplicateNode(w[0]));
    }

    let k = sorted.len();
    let gauss = gauss_legendre(k)?;
    let weights: Vec<f64> = (0..k)
        .map(|i| {
            gauss.integrate(|x| {
                sorted
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &cj)| (x - cj) / (sorted[i] - cj))
                    .product()
            })
        })
        .collect();

    // Exact through degree k-1 by construction; no k-point rule reaches 2k.
    let mut exactness_degree = k - 1;
    for m in k..2 * k {
        let approx: f64 = sorted
            .iter()
            .zip(&weights)
            .map(|(&c, &b)| b * c.powi(m as i32))
            .sum();
        if (approx - 1.0 / (m + 1) as f64).abs() > EXACTNESS_TOL {
            break;
        }
        exactness_degree = m;
    }

    Ok(Quadrature {
        nodes: sorted,
        weights,
        exactness_degree,
        kind: QuadratureKind::Interpolatory,
    })
}

/// Smallest Gauss node count making the discretized scheme exactly
/// energy-preserving for a degree-`nu` polynomial Hamiltonian:
/// `k ≥ max(s, r) · nu / 2`.
pub fn min_nodes_for_exact_energy(nu: usize, s: usize, r: usize) -> usize {
    (s.max(r) * nu).div_ceil(2).max(1)
}
