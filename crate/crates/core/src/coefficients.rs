//! Coefficient functions of energy-preserving csPRK methods.
//!
//! A method is generated by a real `s × r` matrix `α`. Writing
//! `I_i(τ) = ∫_0^τ L_i(x) dx`, the coefficient functions are
//!
//! ```text
//! A(τ, σ) = Σ_{i<s, j<r} α[i][j] I_i(τ) L_j(σ)      B(τ) = Σ_{j<r} α[0][j] L_j(τ)
//! Â(τ, σ) = Σ_{i<r, j<s} α[j][i] I_i(τ) L_j(σ)      B̂(τ) = Σ_{j<s} α[j][0] L_j(τ)
//! ```
//!
//! and `C`, `Ĉ` are the σ-integrals of `A`, `Â`. Any such choice satisfies
//! `A(0, σ) = 0`, `A(1, σ) = B(σ)` and `∂_τ A(τ, σ) = ∂_σ Â(σ, τ)` (with the
//! hatted analogues), which makes the method conserve the Hamiltonian.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polynomials::{
    legendre, legendre_integral, legendre_integral_expansion, legendre_values, PolyError,
    UnitPolynomial, MAX_DEGREE,
};

/// Absolute tolerance for polynomial identities compared coefficient-wise.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableauError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("alpha must have at least one row and one column")]
    EmptyAlpha,
    #[error("alpha row {row} has {got} entries, expected {expected}")]
    RaggedAlpha {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error(
        "declared shape {declared_s}x{declared_r} does not match alpha ({actual_s}x{actual_r})"
    )]
    ShapeMismatch {
        declared_s: usize,
        declared_r: usize,
        actual_s: usize,
        actual_r: usize,
    },
    #[error("alpha[{0}][{1}] is not finite")]
    NonFinite(usize, usize),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset `{preset}` takes {expected} parameter(s), got {got}")]
    ParamCount {
        preset: Preset,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameter for preset `{preset}`: {reason}")]
    InvalidParam { preset: Preset, reason: String },
}

/// The generating matrix `α`, with `α[i][j]` for `i < s`, `j < r`.
///
/// The transposed matrix `α̂[i][j] = α[j][i]` is never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlphaJson", into = "AlphaJson")]
pub struct AlphaTableau {
    s: usize,
    r: usize,
    alpha: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct AlphaJson {
    s: usize,
    r: usize,
    alpha: Vec<Vec<f64>>,
}

impl TryFrom<AlphaJson> for AlphaTableau {
    type Error = TableauError;

    fn try_from(raw: AlphaJson) -> Result<Self, Self::Error> {
        let tableau = AlphaTableau::new(raw.alpha)?;
        if tableau.s != raw.s || tableau.r != raw.r {
            return Err(TableauError::ShapeMismatch {
                declared_s: raw.s,
                declared_r: raw.r,
                actual_s: tableau.s,
                actual_r: tableau.r,
            });
        }
        Ok(tableau)
    }
}

impl From<AlphaTableau> for AlphaJson {
    fn from(t: AlphaTableau) -> Self {
        AlphaJson {
            s: t.s,
            r: t.r,
            alpha: t.alpha,
        }
    }
}

impl AlphaTableau {
    pub fn new(alpha: Vec<Vec<f64>>) -> Result<Self, TableauError> {
        let s = alpha.len();
        let r = alpha.first().map_or(0, Vec::len);
        if s == 0 || r == 0 {
            return Err(TableauError::EmptyAlpha);
        }
        for (i, row) in alpha.iter().enumerate() {
            if row.len() != r {
                return Err(TableauError::RaggedAlpha {
                    row: i,
                    expected: r,
                    got: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(TableauError::NonFinite(i, j));
            }
        }
        Ok(Self { s, r, alpha })
    }

    /// An `s × r` matrix of zeros with the entries in `entries` set.
    pub fn from_entries(
        s: usize,
        r: usize,
        entries: &[((usize, usize), f64)],
    ) -> Result<Self, TableauError> {
        let mut alpha = vec![vec![0.0; r]; s];
        for &((i, j), v) in entries {
            alpha[i][j] = v;
        }
        Self::new(alpha)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.alpha[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn transpose(&self) -> Self {
        let alpha = (0..self.r)
            .map(|j| (0..self.s).map(|i| self.alpha[i][j]).collect())
            .collect();
        Self {
            s: self.r,
            r: self.s,
            alpha,
        }
    }
}

/// A bivariate polynomial `K(τ, σ) = Σ k[i][j] I_i(τ) L_j(σ)`.
///
/// Every kernel of this form vanishes at `τ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorKernel {
    rows: usize,
    cols: usize,
    coeffs: Vec<Vec<f64>>,
}

impl TensorKernel {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Result<Self, TableauError> {
        // Same shape rules as alpha.
        let AlphaTableau { s, r, alpha } = AlphaTableau::new(coeffs)?;
        if s > MAX_DEGREE {
            return Err(PolyError::DegreeCap { degree: s }.into());
        }
        if r > MAX_DEGREE + 1 {
            return Err(PolyError::DegreeCap { degree: r - 1 }.into());
        }
        Ok(Self {
            rows: s,
            cols: r,
            coeffs: alpha,
        })
    }

    /// Number of `I_i(τ)` terms; the τ-degree of the kernel.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of `L_j(σ)` terms; one more than the σ-degree.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `k[i][j]`, zero outside the stored block.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i < self.rows && j < self.cols {
            self.coeffs[i][j]
        } else {
            0.0
        }
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    /// Values `I_0(τ), ..., I_{rows-1}(τ)` from the Legendre identity.
    fn integral_values(&self, tau: f64) -> Vec<f64> {
        let l = legendre_values(self.rows, tau);
        (0..self.rows)
            .map(|i| {
                legendre_integral_expansion(i)
                    .iter()
                    .map(|&(idx, c)| c * l[idx])
                    .sum()
            })
            .collect()
    }

    fn contract(&self, row_vals: &[f64], col_vals: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(row_vals)
            .map(|(row, ri)| ri * row.iter().zip(col_vals).map(|(k, cj)| k * cj).sum::<f64>())
            .sum()
    }

    pub fn eval(&self, tau: f64, sigma: f64) -> f64 {
        let iv = self.integral_values(tau);
        let lv = legendre_values(self.cols - 1, sigma);
        self.contract(&iv, &lv)
    }

    /// `∂K/∂τ` at `(tau, sigma)`, i.e. `Σ k[i][j] L_i(τ) L_j(σ)`.
    pub fn d_tau(&self, tau: f64, sigma: f64) -> f64 {
        let lt = legendre_values(self.rows - 1, tau);
        let ls = legendre_values(self.cols - 1, sigma);
        self.contract(&lt, &ls)
    }

    /// `K(1, ·)` as a polynomial: only `I_0(1) = 1` survives.
    pub fn at_tau_one(&self) -> Result<UnitPolynomial, TableauError> {
        legendre_combination(&self.coeffs[0])
    }

    /// `∫_0^1 K(τ, σ) dσ` as a polynomial in `τ`: only `L_0` has nonzero mean.
    pub fn sigma_integral(&self) -> Result<UnitPolynomial, TableauError> {
        let mut acc = UnitPolynomial::zero();
        for (i, row) in self.coeffs.iter().enumerate() {
            acc = acc.add(&legendre_integral(i)?.scale(row[0]));
        }
        Ok(acc)
    }

    /// Monomial coefficients `m[a][b]` of `τ^a σ^b`.
    pub fn to_monomial(&self) -> Result<Vec<Vec<f64>>, TableauError> {
        let tau_basis = (0..self.rows)
            .map(legendre_integral)
            .collect::<Result<Vec<_>, _>>()?;
        let sigma_basis = (0..self.cols)
            .map(legendre)
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = vec![vec![0.0; self.cols]; self.rows + 1];
        for (i, ti) in tau_basis.iter().enumerate() {
            for (j, sj) in sigma_basis.iter().enumerate() {
                let k = self.coeffs[i][j];
                if k == 0.0 {
                    continue;
                }
                for (a, ta) in ti.monomial_coeffs().iter().enumerate() {
                    for (b, sb) in sj.monomial_coeffs().iter().enumerate() {
                        out[a][b] += k * ta * sb;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn legendre_combination(coeffs: &[f64]) -> Result<UnitPolynomial, TableauError> {
    Ok(UnitPolynomial::from_legendre(coeffs.to_vec())?)
}

/// Realized coefficient functions `A, Â, B, B̂, C, Ĉ` of a csPRK method.
#[derive(Debug, Clone, PartialEq)]
pub struct CsprkTableau {
    a: TensorKernel,
    ahat: TensorKernel,
    b: UnitPolynomial,
    bhat: UnitPolynomial,
    c: UnitPolynomial,
    chat: UnitPolynomial,
}

impl CsprkTableau {
    /// Assembles a tableau from explicit kernels and weights.
    ///
    /// No energy condition is enforced here; use [`check_energy_condition`].
    pub fn from_parts(
        a: TensorKernel,
        ahat: TensorKernel,
        b: UnitPolynomial,
        bhat: UnitPolynomial,
    ) -> Result<Self, TableauError> {
        let c = a.sigma_integral()?;
        let chat = ahat.sigma_integral()?;
        Ok(Self {
            a,
            ahat,
            b,
            bhat,
            c,
            chat,
        })
    }

    pub fn a(&self) -> &TensorKernel {
        &self.a
    }

    pub fn ahat(&self) -> &TensorKernel {
        &self.ahat
    }

    pub fn b(&self) -> &UnitPolynomial {
        &self.b
    }

    pub fn bhat(&self) -> &UnitPolynomial {
        &self.bhat
    }

    pub fn c(&self) -> &UnitPolynomial {
        &self.c
    }

    pub fn chat(&self) -> &UnitPolynomial {
        &self.chat
    }

    /// Degree of the `p`-stage polynomial (τ-degree of `A`).
    pub fn p_degree(&self) -> usize {
        self.a.rows
    }

    /// Degree of the `q`-stage polynomial (τ-degree of `Â`).
    pub fn q_degree(&self) -> usize {
        self.ahat.rows
    }
}

/// Builds `A, Â, B, B̂, C, Ĉ` from `α`.
pub fn build_tableau(alpha: &AlphaTableau) -> Result<CsprkTableau, TableauError> {
    let a = TensorKernel::new(alpha.alpha.clone())?;
    let ahat = TensorKernel::new(alpha.transpose().alpha)?;
    let b = a.at_tau_one()?;
    let bhat = ahat.at_tau_one()?;
    CsprkTableau::from_parts(a, ahat, b, bhat)
}

/// Residuals of the three energy-preservation conditions on a sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    /// `max |A(0, σ)|, |Â(0, σ)|`.
    pub start_residual: f64,
    /// `max |A(1, σ) - B(σ)|, |Â(1, σ) - B̂(σ)|`.
    pub end_residual: f64,
    /// `max |∂_τ A(τ, σ) - ∂_σ Â(σ, τ)|`.
    pub symmetry_residual: f64,
    pub start_ok: bool,
    pub end_ok: bool,
    pub symmetry_ok: bool,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.start_ok && self.end_ok && self.symmetry_ok
    }
}

/// Evaluates the energy-preservation conditions on a `grid_n × grid_n` grid.
///
/// Partial derivatives come straight from the Legendre coefficients.
pub fn check_energy_condition(t: &CsprkTableau, grid_n: usize) -> ConditionReport {
    let n = grid_n.max(2);
    let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();

    let mut start: f64 = 0.0;
    let mut end: f64 = 0.0;
    let mut sym: f64 = 0.0;
    for &sigma in &grid {
        start = start
            .max(t.a.eval(0.0, sigma).abs())
            .max(t.ahat.eval(0.0, sigma).abs());
        end = end
            .max((t.a.eval(1.0, sigma) - t.b.eval(sigma)).abs())
            .max((t.ahat.eval(1.0, sigma) - t.bhat.eval(sigma)).abs());
        for &tau in &grid {
            sym = sym.max((t.a.d_tau(tau, sigma) - t.ahat.d_tau(sigma, tau)).abs());
        }
    }
    ConditionReport {
        start_residual: start,
        end_residual: end,
        symmetry_residual: sym,
        start_ok: start <= IDENTITY_TOL,
        end_ok: end <= IDENTITY_TOL,
        symmetry_ok: sym <= IDENTITY_TOL,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplifyingError {
    #[error("simplifying assumptions need C(τ) = Ĉ(τ) = τ (coefficient residual {0:e})")]
    AbscissaeNotIdentity(f64),
}

fn check_identity_abscissae(t: &CsprkTableau) -> Result<(), SimplifyingError> {
    let id = UnitPolynomial::identity();
    let residual = t.c.max_coeff_diff(&id).max(t.chat.max_coeff_diff(&id));
    if residual > IDENTITY_TOL {
        return Err(SimplifyingError::AbscissaeNotIdentity(residual));
    }
    Ok(())
}

// ∫_0^1 K(τ,σ) L_j(σ) dσ = Σ_i k[i][j] I_i(τ), and {I_i} is linearly
// independent, so C(η) is k[i][j] = δ_ij for all i and j < η.
fn kernel_satisfies_c(k: &TensorKernel, eta: usize) -> bool {
    (0..eta).all(|j| {
        (0..k.rows.max(j + 1)).all(|i| {
            let target = if i == j { 1.0 } else { 0.0 };
            (k.coeff(i, j) - target).abs() <= IDENTITY_TOL
        })
    })
}

// ∫_0^1 L_m(τ) I_i(τ) dτ: the L_m coefficient of I_i in the Legendre basis.
fn legendre_moment_of_integral(m: usize, i: usize) -> f64 {
    legendre_integral_expansion(i)
        .iter()
        .filter(|(idx, _)| *idx == m)
        .map(|(_, c)| c)
        .sum()
}

// Both sides of D(ζ) are expanded in L_j(σ): the left is Σ_i M[m][i] k[i][j],
// the right is ∫_σ^1 L_m = δ_m0 - I_m(σ).
fn kernel_satisfies_d(k: &TensorKernel, zeta: usize) -> bool {
    (0..zeta).all(|m| {
        let width = k.cols.max(m + 2);
        (0..width).all(|j| {
            let lhs: f64 = (0..k.rows)
                .map(|i| legendre_moment_of_integral(m, i) * k.coeff(i, j))
                .sum();
            let mut rhs = if m == 0 && j == 0 { 1.0 } else { 0.0 };
            rhs -= legendre_integral_expansion(m)
                .iter()
                .filter(|(idx, _)| *idx == j)
                .map(|(_, c)| c)
                .sum::<f64>();
            (lhs - rhs).abs() <= IDENTITY_TOL
        })
    })
}

/// Simplifying assumption `C(η)` for both `A` and `Â`.
pub fn verify_simplifying_c(t: &CsprkTableau, eta: usize) -> Result<bool, SimplifyingError> {
    check_identity_abscissae(t)?;
    Ok(kernel_satisfies_c(&t.a, eta) && kernel_satisfies_c(&t.ahat, eta))
}

/// Simplifying assumption `D(ζ)` for both `A` and `Â`.
pub fn verify_simplifying_d(t: &CsprkTableau, zeta: usize) -> Result<bool, SimplifyingError> {
    check_identity_abscissae(t)?;
    Ok(kernel_satisfies_d(&t.a, zeta) && kernel_satisfies_d(&t.ahat, zeta))
}

fn largest_passing(limit: usize, pass: impl Fn(usize) -> bool) -> usize {
    (1..=limit).take_while(|&n| pass(n)).last().unwrap_or(0)
}

/// Largest `η` with `C(η)` and `Ĉ(η)`; `None` when `C = Ĉ = τ` fails.
pub fn largest_eta(t: &CsprkTableau) -> Option<usize> {
    check_identity_abscissae(t).ok()?;
    let limit = t.a.cols.max(t.ahat.cols) + 1;
    Some(largest_passing(limit, |eta| {
        kernel_satisfies_c(&t.a, eta) && kernel_satisfies_c(&t.ahat, eta)
    }))
}

/// Largest `ζ` with `D(ζ)` and `D̂(ζ)`; `None` when `C = Ĉ = τ` fails.
pub fn largest_zeta(t: &CsprkTableau) -> Option<usize> {
    check_identity_abscissae(t).ok()?;
    let limit = t.a.rows.max(t.ahat.rows) + t.a.cols.max(t.ahat.cols) + 2;
    Some(largest_passing(limit, |zeta| {
        kernel_satisfies_d(&t.a, zeta) && kernel_satisfies_d(&t.ahat, zeta)
    }))
}

/// How [`estimate_order`] arrived at its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderCertificate {
    /// Order from the direct conditions, capped at 2.
    pub direct: usize,
    /// `None` when `B = B̂`, `C = Ĉ = τ` does not hold.
    pub eta: Option<usize>,
    pub zeta: Option<usize>,
    /// `None` means `B(ξ)` holds for every `ξ`.
    pub xi: Option<usize>,
    /// `min{ξ, 2η + 2, η + ζ + 1}` when applicable.
    pub simplifying_bound: Option<usize>,
    pub order: usize,
}

fn approx(a: f64, b: f64) -> bool {
    (a - b).abs() <= IDENTITY_TOL
}

fn direct_order(t: &CsprkTableau) -> Result<usize, PolyError> {
    if !(approx(t.b.integral(), 1.0) && approx(t.bhat.integral(), 1.0)) {
        return Ok(0);
    }
    for w in [&t.b, &t.bhat] {
        for c in [&t.c, &t.chat] {
            if !approx(w.inner(c), 0.5) {
                return Ok(1);
            }
        }
    }
    Ok(2)
}

fn weight_quadrature_order(b: &UnitPolynomial) -> Option<usize> {
    if b.max_coeff_diff(&UnitPolynomial::constant(1.0)) <= IDENTITY_TOL {
        return None;
    }
    // ∫ B τ^{k-1} = 1/k fails by k = deg B + 2 unless B ≡ 1.
    let limit = b.degree() + 2;
    let mut power = UnitPolynomial::constant(1.0);
    let mut moments = Vec::with_capacity(limit);
    for _ in 0..limit {
        moments.push(b.inner(&power));
        power = power.mul_x().ok()?;
    }
    Some(largest_passing(limit, |k| {
        approx(moments[k - 1], 1.0 / k as f64)
    }))
}

pub fn order_certificate(t: &CsprkTableau) -> Result<OrderCertificate, TableauError> {
    let direct = direct_order(t)?;
    let applicable = t.b.max_coeff_diff(&t.bhat) <= IDENTITY_TOL;
    let (eta, zeta) = if applicable {
        (largest_eta(t), largest_zeta(t))
    } else {
        (None, None)
    };
    let xi = weight_quadrature_order(&t.b);
    let simplifying_bound = match (eta, zeta) {
        (Some(eta), Some(zeta)) => {
            let bound = (2 * eta + 2).min(eta + zeta + 1);
            Some(xi.map_or(bound, |xi| xi.min(bound)))
        }
        _ => None,
    };
    let order = direct.max(simplifying_bound.unwrap_or(0));
    Ok(OrderCertificate {
        direct,
        eta,
        zeta,
        xi,
        simplifying_bound,
        order,
    })
}

/// Certified lower bound on the order of the method.
pub fn estimate_order(t: &CsprkTableau) -> Result<usize, TableauError> {
    Ok(order_certificate(t)?.order)
}

/// Method families with closed-form `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `s = 2, r = 1`, one parameter `θ`; order 1, order 2 iff `θ = 0`.
    Ex31,
    /// `s = 3, r = 2, η = 1`, parameters `θ1, θ2`; order 2.
    Ex32,
    /// `s = 4, r = 3, η = 2`, parameters `θ1, θ2`; order 4.
    Ex33,
    /// Average vector field method.
    Avf,
    /// `α = I_s`: the symmetric order-`2s` family.
    SymmetricEtaS,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Ex31,
        Preset::Ex32,
        Preset::Ex33,
        Preset::Avf,
        Preset::SymmetricEtaS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ex31 => "ex31",
            Preset::Ex32 => "ex32",
            Preset::Ex33 => "ex33",
            Preset::Avf => "avf",
            Preset::SymmetricEtaS => "symmetric_eta_s",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            Preset::Ex31 | Preset::SymmetricEtaS => 1,
            Preset::Ex32 | Preset::Ex33 => 2,
            Preset::Avf => 0,
        }
    }

    pub fn alpha(self, params: &[f64]) -> Result<AlphaTableau, TableauError> {
        if params.len() != self.param_count() {
            return Err(TableauError::ParamCount {
                preset: self,
                expected: self.param_count(),
                got: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(TableauError::InvalidParam {
                preset: self,
                reason: "parameters must be finite".into(),
            });
        }
        match self {
            Preset::Ex31 => AlphaTableau::from_entries(
                2,
                1,
                &[((0, 0), 1.0), ((1, 0), params[0] / 3f64.sqrt())],
            ),
            Preset::Ex32 => AlphaTableau::from_entries(
                3,
                2,
                &[
                    ((0, 0), 1.0),
                    ((1, 1), params[0] / 3.0),
                    ((2, 1), params[1] / 15f64.sqrt()),
                ],
            ),
            Preset::Ex33 => AlphaTableau::from_entries(
                4,
                3,
                &[
                    ((0, 0), 1.0),
                    ((1, 1), 1.0),
                    ((2, 2), params[0] / 5.0),
                    ((3, 2), params[1] / 35f64.sqrt()),
                ],
            ),
            Preset::Avf => AlphaTableau::new(vec![vec![1.0]]),
            Preset::SymmetricEtaS => {
                let s = params[0];
                if s < 1.0 || s.fract() != 0.0 || s > MAX_DEGREE as f64 {
                    return Err(TableauError::InvalidParam {
                        preset: self,
                        reason: format!("s must be an integer in 1..={MAX_DEGREE}, got {s}"),
                    });
                }
                let s = s as usize;
                let entries: Vec<_> = (0..s).map(|i| ((i, i), 1.0)).collect();
                AlphaTableau::from_entries(s, s, &entries)
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = TableauError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.trim().to_ascii_lowercase().replace('-', "_");
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == normalized)
            .ok_or_else(|| TableauError::UnknownPreset(s.to_string()))
    }
}

/// `α` for a named family, e.g. `preset("ex33", &[1.0, 0.0])`.
pub fn preset(name: &str, params: &[f64]) -> Result<AlphaTableau, TableauError> {
    name.parse::<Preset>()?.alpha(params)
}
