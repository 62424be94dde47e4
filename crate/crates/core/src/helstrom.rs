//! Minimum-error discrimination of two qubit states.
//!
//! The optimal measurement projects onto the sign eigenspaces of
//! `Λ = q₋ρ₋ − q₊ρ₊`: the positive part votes for `ρ₋`, the rest for `ρ₊`,
//! and the success probability is `½(1 + Σ_k |λ_k|)`.

use crate::channels::amplitude_damping;
use crate::error::{check_closed, Result};
use crate::qubit::{check_theta, hermitian_eigen, ComplexMat2, Ensemble, HermitianEigen, Sign};

/// Optimal two-outcome measurement and its success probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscriminationResult {
    pub p_correct: f64,
    /// Outcome "the state was ρ₋": the positive eigenspace of `Λ`.
    pub projector_minus: ComplexMat2,
    /// Outcome "the state was ρ₊": the complement, including any zero eigenvector.
    pub projector_plus: ComplexMat2,
    pub eigen: HermitianEigen,
}

impl DiscriminationResult {
    pub fn projector(&self, guess: Sign) -> &ComplexMat2 {
        match guess {
            Sign::Plus => &self.projector_plus,
            Sign::Minus => &self.projector_minus,
        }
    }

    /// `q₋ tr(Π₋ρ₋) + q₊ tr(Π₊ρ₊)` for an arbitrary ensemble.
    pub fn success_on(&self, e: &Ensemble) -> f64 {
        e.q_minus * e.state_minus.expectation(&self.projector_minus)
            + e.q_plus * e.state_plus.expectation(&self.projector_plus)
    }
}

/// The Helstrom operator `Λ = q₋ρ₋ − q₊ρ₊`, symmetrized.
pub fn helstrom_operator(e: &Ensemble) -> ComplexMat2 {
    let lambda = e.state_minus.mat().scale(e.q_minus) - e.state_plus.mat().scale(e.q_plus);
    (lambda + lambda.adjoint()).scale(0.5)
}

pub fn helstrom_correct(e: &Ensemble) -> DiscriminationResult {
    let eigen = hermitian_eigen(&helstrom_operator(e)).expect("symmetrized operator is Hermitian");
    let projector_minus = if eigen.eig_lo > 0.0 {
        ComplexMat2::identity()
    } else if eigen.eig_hi > 0.0 {
        eigen.projector_hi()
    } else {
        ComplexMat2::zero()
    };
    let projector_plus = ComplexMat2::identity() - projector_minus;
    let p_correct = 0.5 * (1.0 + eigen.eig_lo.abs() + eigen.eig_hi.abs());
    DiscriminationResult {
        p_correct,
        projector_minus,
        projector_plus,
        eigen,
    }
}

/// Success probability for the undisturbed pure pair,
/// `½(1 + √(1 − 4q₊q₋cos²θ))`.
pub fn pure_correct(theta: f64, q_plus: f64) -> Result<f64> {
    check_theta(theta)?;
    check_closed("q_plus", q_plus, 0.0, 1.0)?;
    let q_minus = 1.0 - q_plus;
    let c = theta.cos();
    let radicand = (1.0 - 4.0 * q_plus * q_minus * c * c).max(0.0);
    Ok(0.5 * (1.0 + radicand.sqrt()))
}

/// Success probability of the conventional scheme: Helstrom measurement on
/// the pair after amplitude damping with magnitude `r`.
///
/// `½(1 + ½|χ − ξ| + ½|χ + ξ|)` with `χ = q₊ − q₋` and
/// `ξ = √((1−r)(χ cos θ)² + ((1−r) sin θ + χ r)²)`.
pub fn mixed_after_ad(theta: f64, q_plus: f64, r: f64) -> Result<f64> {
    check_theta(theta)?;
    check_closed("q_plus", q_plus, 0.0, 1.0)?;
    check_closed("r", r, 0.0, 1.0)?;
    let chi = q_plus - (1.0 - q_plus);
    let (s, c) = theta.sin_cos();
    let xi = ((1.0 - r) * (chi * c).powi(2) + ((1.0 - r) * s + chi * r).powi(2)).sqrt();
    Ok(0.5 * (1.0 + 0.5 * (chi - xi).abs() + 0.5 * (chi + xi).abs()))
}

/// The signal ensemble after it has passed the damping channel.
pub fn transmitted_ensemble(theta: f64, q_plus: f64, r: f64) -> Result<Ensemble> {
    let e = Ensemble::pure(theta, q_plus)?;
    let ch = amplitude_damping(r)?;
    Ensemble::new(
        ch.apply(&e.state_plus),
        ch.apply(&e.state_minus),
        e.q_plus,
        e.q_minus,
    )
}
