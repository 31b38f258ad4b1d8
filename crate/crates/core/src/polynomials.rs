//! Normalized shifted Legendre polynomials on `[0, 1]`.
//!
//! `L_j(x) = sqrt(2j + 1) * P_j(2x - 1)` where `P_j` is the classical Legendre
//! polynomial. The family is orthonormal on `[0, 1]` and satisfies
//!
//! ```text
//! ∫_0^x L_j(t) dt = ξ_{j+1} L_{j+1}(x) - ξ_j L_{j-1+δ_{j0}}(x)
//! ```
//!
//! with `ξ_0 = -1/2` and `ξ_j = 1 / (2 sqrt(4j² - 1))` for `j ≥ 1`.
//!
//! [`UnitPolynomial`] keeps its coefficients in this basis. Monomial
//! coefficients of `L_j` grow like `3^(2j)` and cancel badly on `[0, 1]`, so
//! the monomial form is only produced on request for inspection.

use thiserror::Error;

/// Largest polynomial degree supported.
pub const MAX_DEGREE: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial degree {degree} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeCap { degree: usize },
}

/// A real polynomial on `[0, 1]`; `coeffs[j]` multiplies `L_j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UnitPolynomial {
    coeffs: Vec<f64>,
}

fn check_degree(len: usize) -> Result<(), PolyError> {
    if len > MAX_DEGREE + 1 {
        Err(PolyError::DegreeCap { degree: len - 1 })
    } else {
        Ok(())
    }
}

impl UnitPolynomial {
    /// Builds `Σ coeffs[j] L_j`, dropping exact trailing zeros.
    pub fn from_legendre(mut coeffs: Vec<f64>) -> Result<Self, PolyError> {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        check_degree(coeffs.len())?;
        Ok(Self { coeffs })
    }

    /// Builds `Σ coeffs[k] x^k`.
    pub fn from_monomial(coeffs: &[f64]) -> Result<Self, PolyError> {
        check_degree(coeffs.len())?;
        // Horner in the Legendre basis: acc ← x·acc + c_k.
        let mut acc = Self::zero();
        for &c in coeffs.iter().rev() {
            acc = acc.mul_x()?.add(&Self::constant(c));
        }
        Ok(acc)
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_legendre(vec![value]).expect("degree 0 is always admissible")
    }

    /// The identity polynomial `x = ½ L_0 + L_1 / (2√3)`.
    pub fn identity() -> Self {
        Self::from_legendre(vec![0.5, xi(1)]).expect("degree 1 is always admissible")
    }

    /// Coefficients in the Legendre basis.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `L_j`, zero beyond the stored length.
    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    /// Degree of the polynomial; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        legendre_values(self.degree(), x)
            .iter()
            .zip(&self.coeffs)
            .map(|(l, c)| l * c)
            .sum()
    }

    /// Monomial coefficients, index = power. Ill-conditioned for high degree.
    pub fn monomial_coeffs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.coeffs.len()];
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                for (k, m) in shifted_legendre_monomial(j).iter().enumerate() {
                    out[k] += c * m;
                }
            }
        }
        out
    }

    /// `L_n' = 2 sqrt(2n+1) Σ_{k<n, n-k odd} sqrt(2k+1) L_k`.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() - 1];
        for (n, &c) in self.coeffs.iter().enumerate().skip(1) {
            let outer = 2.0 * ((2 * n + 1) as f64).sqrt() * c;
            for k in (0..n).rev().step_by(2) {
                out[k] += outer * ((2 * k + 1) as f64).sqrt();
            }
        }
        Self::from_legendre(out).expect("differentiation lowers the degree")
    }

    /// The antiderivative vanishing at zero, `x ↦ ∫_0^x p(t) dt`.
    pub fn antiderivative(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        check_degree(self.coeffs.len() + 1)?;
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            for (idx, e) in legendre_integral_expansion(j) {
                out[idx] += c * e;
            }
        }
        Self::from_legendre(out)
    }

    /// `∫_0^1 p(x) dx`: only `L_0` has a nonzero mean.
    pub fn integral(&self) -> f64 {
        self.coeff(0)
    }

    /// `∫_0^1 p(x) q(x) dx` by orthonormality.
    pub fn inner(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `x · p(x)` via `(2x-1) P_n = ((n+1) P_{n+1} + n P_{n-1}) / (2n+1)`.
    pub fn mul_x(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        check_degree(self.coeffs.len() + 1)?;
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (n, &c) in self.coeffs.iter().enumerate() {
            // x L_n = ½ L_n + a_{n+1} L_{n+1} + a_n L_{n-1}
            out[n] += 0.5 * c;
            out[n + 1] += recurrence_coeff(n + 1) * c;
            if n > 0 {
                out[n - 1] += recurrence_coeff(n) * c;
            }
        }
        Self::from_legendre(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::from_legendre(coeffs).expect("sum of admissible polynomials is admissible")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_legendre(self.coeffs.iter().map(|c| c * factor).collect())
            .expect("scaling never raises the degree")
    }

    /// Product of two polynomials, projected exactly with a Gauss rule.
    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let degree = self.degree() + other.degree();
        check_degree(degree + 1)?;
        let quad = crate::quadrature::gauss_legendre(degree + 1)
            .expect("degree cap keeps the node count in range");
        let mut out = vec![0.0; degree + 1];
        for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
            let v = w * self.eval(x) * other.eval(x);
            for (o, l) in out.iter_mut().zip(legendre_values(degree, x)) {
                *o += v * l;
            }
        }
        Self::from_legendre(out)
    }

    /// Largest absolute Legendre-coefficient difference.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).abs())
            .fold(0.0, f64::max)
    }
}

/// `x L_{n-1}` contributes `a_n L_n`, and `x L_n` contributes `a_n L_{n-1}`,
/// with `a_n = n / (2 sqrt(4n² - 1))`.
fn recurrence_coeff(n: usize) -> f64 {
    n as f64 * xi(n)
}

/// Monomial coefficients of `L_j` by the three-term recurrence.
fn shifted_legendre_monomial(j: usize) -> Vec<f64> {
    // (n+1) P_{n+1} = (2n+1)(2x-1) P_n - n P_{n-1} on the unnormalized family.
    let mut prev = vec![1.0];
    let mut cur = vec![-1.0, 2.0];
    if j == 0 {
        cur = prev.clone();
    } else {
        for n in 1..j {
            let nf = n as f64;
            let mut next = vec![0.0; n + 2];
            for (k, &c) in cur.iter().enumerate() {
                next[k + 1] += (2.0 * nf + 1.0) * 2.0 * c;
                next[k] -= (2.0 * nf + 1.0) * c;
            }
            for (k, &c) in prev.iter().enumerate() {
                next[k] -= nf * c;
            }
            next.iter_mut().for_each(|c| *c /= nf + 1.0);
            prev = std::mem::replace(&mut cur, next);
        }
    }
    let norm = ((2 * j + 1) as f64).sqrt();
    cur.into_iter().map(|c| c * norm).collect()
}

/// The degree-`j` normalized shifted Legendre polynomial `L_j`.
pub fn legendre(j: usize) -> Result<UnitPolynomial, PolyError> {
    let mut coeffs = vec![0.0; j + 1];
    check_degree(coeffs.len())?;
    coeffs[j] = 1.0;
    UnitPolynomial::from_legendre(coeffs)
}

/// `x ↦ ∫_0^x L_j(t) dt`.
pub fn legendre_integral(j: usize) -> Result<UnitPolynomial, PolyError> {
    legendre(j)?.antiderivative()
}

/// The coefficient `ξ_j` of the Legendre integration identity.
pub fn xi(j: usize) -> f64 {
    if j == 0 {
        -0.5
    } else {
        let j = j as f64;
        1.0 / (2.0 * (4.0 * j * j - 1.0).sqrt())
    }
}

/// `∫_0^x L_j` written in the Legendre basis as `(index, coefficient)` pairs.
///
/// For `j = 0` this is `½ L_0 + ξ_1 L_1`.
pub fn legendre_integral_expansion(j: usize) -> [(usize, f64); 2] {
    let lower = if j == 0 { 0 } else { j - 1 };
    [(j + 1, xi(j + 1)), (lower, -xi(j))]
}

/// Values `L_0(x), ..., L_n(x)` via the three-term recurrence.
pub fn legendre_values(n: usize, x: f64) -> Vec<f64> {
    let y = 2.0 * x - 1.0;
    let mut raw = Vec::with_capacity(n + 1);
    raw.push(1.0);
    if n >= 1 {
        raw.push(y);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * y * raw[k] - kf * raw[k - 1]) / (kf + 1.0);
        raw.push(next);
    }
    raw.iter()
        .enumerate()
        .map(|(k, v)| v * ((2 * k + 1) as f64).sqrt())
        .collect()
}
