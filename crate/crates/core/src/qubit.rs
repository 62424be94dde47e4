//! Single-qubit linear algebra.
//!
//! Everything in this crate lives in a two-dimensional Hilbert space, so the
//! matrix type is a fixed 2×2 complex array and the Hermitian eigenproblem is
//! solved in closed form. The computational basis is `{|0⟩, |1⟩}`; the
//! conjugate basis is `|±⟩ = (|0⟩ ± |1⟩)/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{check_closed, FfcError, Result};

/// Absolute tolerance used when validating density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// Spectral gap below which the eigenbasis is reported as the computational basis.
pub const DEGENERACY_GAP: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense 2×2 complex matrix stored row-major as `[a00, a01, a10, a11]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMat2 {
    a: [Complex64; 4],
}

impl ComplexMat2 {
    pub const fn new(a00: Complex64, a01: Complex64, a10: Complex64, a11: Complex64) -> Self {
        Self {
            a: [a00, a01, a10, a11],
        }
    }

    pub fn from_real(a00: f64, a01: f64, a10: f64, a11: f64) -> Self {
        Self::new(a00.into(), a01.into(), a10.into(), a11.into())
    }

    pub fn diag(d0: f64, d1: f64) -> Self {
        Self::from_real(d0, 0.0, 0.0, d1)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn pauli_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    #[inline]
    pub fn entries(&self) -> [Complex64; 4] {
        self.a
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.a[2 * row + col]
    }

    pub fn adjoint(&self) -> Self {
        let [a00, a01, a10, a11] = self.a;
        Self::new(a00.conj(), a10.conj(), a01.conj(), a11.conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.a[0] + self.a[3]
    }

    pub fn det(&self) -> Complex64 {
        self.a[0] * self.a[3] - self.a[1] * self.a[2]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            a: self.a.map(|z| z * s),
        }
    }

    /// `K ρ K†` with `self` as `K`.
    pub fn sandwich(&self, rho: &ComplexMat2) -> ComplexMat2 {
        *self * *rho * self.adjoint()
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        let [a00, a01, a10, a11] = self.a;
        let [x, y] = v.0;
        Ket([a00 * x + a01 * y, a10 * x + a11 * y])
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMat2) -> f64 {
        self.a
            .iter()
            .zip(other.a.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> f64 {
        let [a00, a01, a10, a11] = self.a;
        (a01 - a10.conj())
            .norm()
            .max(a00.im.abs())
            .max(a11.im.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for ComplexMat2 {
    type Output = ComplexMat2;

    fn mul(self, rhs: ComplexMat2) -> ComplexMat2 {
        let [a00, a01, a10, a11] = self.a;
        let [b00, b01, b10, b11] = rhs.a;
        ComplexMat2::new(
            a00 * b00 + a01 * b10,
            a00 * b01 + a01 * b11,
            a10 * b00 + a11 * b10,
            a10 * b01 + a11 * b11,
        )
    }
}

impl Add for ComplexMat2 {
    type Output = ComplexMat2;

    fn add(self, rhs: ComplexMat2) -> ComplexMat2 {
        let mut a = self.a;
        for (x, y) in a.iter_mut().zip(rhs.a) {
            *x += y;
        }
        ComplexMat2 { a }
    }
}

impl Sub for ComplexMat2 {
    type Output = ComplexMat2;

    fn sub(self, rhs: ComplexMat2) -> ComplexMat2 {
        let mut a = self.a;
        for (x, y) in a.iter_mut().zip(rhs.a) {
            *x -= y;
        }
        ComplexMat2 { a }
    }
}

/// Amplitude vector in the computational basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ket(pub [Complex64; 2]);

impl Ket {
    pub fn new(c0: Complex64, c1: Complex64) -> Self {
        Ket([c0, c1])
    }

    pub fn zero_state() -> Self {
        Ket([ONE, ZERO])
    }

    pub fn one_state() -> Self {
        Ket([ZERO, ONE])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn scale(&self, s: f64) -> Ket {
        Ket(self.0.map(|z| z * s))
    }

    /// Returns `None` for (numerically) zero vectors.
    pub fn normalized(&self) -> Option<Ket> {
        let n = self.norm_sqr();
        (n > 0.0 && n.is_finite()).then(|| self.scale(n.sqrt().recip()))
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Ket) -> ComplexMat2 {
        let [x0, x1] = self.0;
        let [y0, y1] = other.0;
        ComplexMat2::new(
            x0 * y0.conj(),
            x0 * y1.conj(),
            x1 * y0.conj(),
            x1 * y1.conj(),
        )
    }

    /// `⟨self| m |self⟩`, real part.
    pub fn expectation(&self, m: &ComplexMat2) -> f64 {
        self.inner(&m.apply(self)).re
    }
}

/// Which of the two signal states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `|ψ±⟩ = cos(θ/2)|+⟩ ± sin(θ/2)|−⟩`, with `θ ∈ [0, π/2]`.
///
/// The overlap of the pair is `⟨ψ₊|ψ₋⟩ = cos θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState {
    theta: f64,
    sign: Sign,
}

impl PureState {
    pub fn new(theta: f64, sign: Sign) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self { theta, sign })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn ket(&self) -> Ket {
        let c = (self.theta / 2.0).cos();
        let s = self.sign.factor() * (self.theta / 2.0).sin();
        Ket([
            Complex64::new((c + s) * FRAC_1_SQRT_2, 0.0),
            Complex64::new((c - s) * FRAC_1_SQRT_2, 0.0),
        ])
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<f64> {
    check_closed("theta", theta, 0.0, FRAC_PI_2)
}

/// Hermitian, unit-trace, positive semidefinite 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMat2,
}

impl DensityMatrix {
    /// Validates `mat` against [`DENSITY_TOL`].
    pub fn new(mat: ComplexMat2) -> Result<Self> {
        validate_density(&mat)?;
        Ok(Self { mat })
    }

    /// Wraps a matrix produced by a trace-preserving computation.
    pub(crate) fn from_trusted(mat: ComplexMat2) -> Self {
        debug_assert!(
            validate_density(&mat).is_ok(),
            "invalid density matrix: {mat:?} ({:?})",
            validate_density(&mat)
        );
        Self { mat }
    }

    pub fn from_ket(v: &Ket) -> Result<Self> {
        let v = v.normalized().ok_or_else(|| FfcError::InvalidState {
            reason: "zero amplitude vector".into(),
        })?;
        Ok(Self::from_trusted(v.outer(&v)))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_trusted(ComplexMat2::diag(0.5, 0.5))
    }

    pub fn mat(&self) -> &ComplexMat2 {
        &self.mat
    }

    /// `tr(ρ σ)`, real part.
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        (self.mat * other.mat).trace().re
    }

    pub fn expectation(&self, op: &ComplexMat2) -> f64 {
        (*op * self.mat).trace().re
    }
}

fn validate_density(mat: &ComplexMat2) -> Result<()> {
    if !mat.is_finite() {
        return Err(FfcError::InvalidState {
            reason: "non-finite entries".into(),
        });
    }
    let dev = mat.hermitian_deviation();
    if dev > DENSITY_TOL {
        return Err(FfcError::InvalidState {
            reason: format!("not Hermitian (deviation {dev:.3e})"),
        });
    }
    let tr = mat.trace().re;
    if (tr - 1.0).abs() > DENSITY_TOL {
        return Err(FfcError::InvalidState {
            reason: format!("trace {tr} differs from 1"),
        });
    }
    let (lo, _) = eigenvalues(mat);
    if lo < -DENSITY_TOL {
        return Err(FfcError::InvalidState {
            reason: format!("negative eigenvalue {lo:.3e}"),
        });
    }
    Ok(())
}

/// Make the density matrix of a signal state.
pub fn make_density(psi: &PureState) -> DensityMatrix {
    let v = psi.ket();
    DensityMatrix::from_trusted(v.outer(&v))
}

/// Two labelled states with their prior probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ensemble {
    pub state_plus: DensityMatrix,
    pub state_minus: DensityMatrix,
    pub q_plus: f64,
    pub q_minus: f64,
}

impl Ensemble {
    pub fn new(
        state_plus: DensityMatrix,
        state_minus: DensityMatrix,
        q_plus: f64,
        q_minus: f64,
    ) -> Result<Self> {
        let ok = q_plus.is_finite()
            && q_minus.is_finite()
            && q_plus >= 0.0
            && q_minus >= 0.0
            && (q_plus + q_minus - 1.0).abs() <= 1e-12;
        if !ok {
            return Err(FfcError::InvalidPriors { q_plus, q_minus });
        }
        Ok(Self {
            state_plus,
            state_minus,
            q_plus,
            q_minus,
        })
    }

    /// The signal ensemble `{|ψ₊⟩, |ψ₋⟩}` with priors `(q₊, 1 − q₊)`.
    pub fn pure(theta: f64, q_plus: f64) -> Result<Self> {
        check_closed("q_plus", q_plus, 0.0, 1.0)?;
        let plus = make_density(&PureState::new(theta, Sign::Plus)?);
        let minus = make_density(&PureState::new(theta, Sign::Minus)?);
        Self::new(plus, minus, q_plus, 1.0 - q_plus)
    }

    pub fn state(&self, sign: Sign) -> &DensityMatrix {
        match sign {
            Sign::Plus => &self.state_plus,
            Sign::Minus => &self.state_minus,
        }
    }

    pub fn prior(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.q_plus,
            Sign::Minus => self.q_minus,
        }
    }

    /// Exchange the roles of the two hypotheses.
    pub fn swapped(&self) -> Self {
        Self {
            state_plus: self.state_minus,
            state_minus: self.state_plus,
            q_plus: self.q_minus,
            q_minus: self.q_plus,
        }
    }
}

/// Spectrum and eigenbasis of a 2×2 Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEigen {
    pub eig_lo: f64,
    pub eig_hi: f64,
    /// `basis[0]` belongs to `eig_lo`, `basis[1]` to `eig_hi`.
    pub basis: [Ket; 2],
}

impl HermitianEigen {
    pub fn projector_lo(&self) -> ComplexMat2 {
        self.basis[0].outer(&self.basis[0])
    }

    pub fn projector_hi(&self) -> ComplexMat2 {
        self.basis[1].outer(&self.basis[1])
    }
}

/// Closed-form eigenvalues `m ± √(m² − det)` with `m = tr/2`.
///
/// `m² − det` is evaluated as `((a00 − a11)/2)² + |a01|²`, which is the same
/// quantity without the cancellation.
fn eigenvalues(h: &ComplexMat2) -> (f64, f64) {
    let a00 = h.get(0, 0).re;
    let a11 = h.get(1, 1).re;
    let off = 0.5 * (h.get(0, 1) + h.get(1, 0).conj());
    let mean = 0.5 * (a00 + a11);
    let gap = (0.5 * (a00 - a11)).hypot(off.norm());
    (mean - gap, mean + gap)
}

/// Eigendecomposition of a Hermitian 2×2 matrix, `eig_lo ≤ eig_hi`.
pub fn hermitian_eigen(h: &ComplexMat2) -> Result<HermitianEigen> {
    if !h.is_finite() {
        return Err(FfcError::InvalidArgument("non-finite matrix".into()));
    }
    let deviation = h.hermitian_deviation();
    if deviation > DENSITY_TOL {
        return Err(FfcError::NotHermitian { deviation });
    }
    let (eig_lo, eig_hi) = eigenvalues(h);
    if eig_hi - eig_lo < DEGENERACY_GAP {
        return Ok(HermitianEigen {
            eig_lo,
            eig_hi,
            basis: [Ket::zero_state(), Ket::one_state()],
        });
    }

    let a00 = h.get(0, 0).re;
    let a11 = h.get(1, 1).re;
    let a01 = h.get(0, 1);
    let a10 = h.get(1, 0);
    // Both columns of adj(h - λ) are eigenvectors; take the better-conditioned one.
    let u = Ket([a01, Complex64::new(eig_hi - a00, 0.0)]);
    let w = Ket([Complex64::new(eig_hi - a11, 0.0), a10]);
    let hi = if u.norm_sqr() >= w.norm_sqr() { u } else { w };
    let hi = hi.normalized().expect("nonzero by spectral gap");
    let lo = Ket([-hi.0[1].conj(), hi.0[0].conj()]);
    Ok(HermitianEigen {
        eig_lo,
        eig_hi,
        basis: [lo, hi],
    })
}

/// `⟨ψ|ρ|ψ⟩` clipped to `[0, 1]`.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> f64 {
    fidelity_ket(rho, &psi.ket())
}

/// Like [`fidelity_pure`] for an arbitrary normalized amplitude vector.
pub fn fidelity_ket(rho: &DensityMatrix, psi: &Ket) -> f64 {
    psi.expectation(rho.mat()).clamp(0.0, 1.0)
}
