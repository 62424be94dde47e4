//! Amplitude damping, weak measurements and the feed-forward unitaries.

use crate::error::{check_closed, FfcError, Result};
use crate::qubit::{ComplexMat2, DensityMatrix};

/// Selection probabilities at or below this value are treated as impossible.
pub const SELECTION_CUTOFF: f64 = 1e-15;

const COMPLETENESS_TOL: f64 = 1e-12;

/// Outcome label of the pre-weak measurement, which also selects the
/// feed-forward unitary and the post-weak measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    One,
    Two,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::One, Branch::Two];

    pub fn index(self) -> usize {
        match self {
            Branch::One => 0,
            Branch::Two => 1,
        }
    }

    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl TryFrom<u8> for Branch {
    type Error = FfcError;

    fn try_from(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Branch::One),
            2 => Ok(Branch::Two),
            other => Err(FfcError::InvalidBranch(other)),
        }
    }
}

fn completeness_deviation<'a>(ops: impl IntoIterator<Item = &'a ComplexMat2>) -> f64 {
    let sum = ops
        .into_iter()
        .fold(ComplexMat2::zero(), |acc, k| acc + k.adjoint() * *k);
    sum.max_abs_diff(&ComplexMat2::identity())
}

/// Trace-preserving map `ρ ↦ Σ_k E_k ρ E_k†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    elements: Vec<ComplexMat2>,
}

impl KrausChannel {
    pub fn new(elements: Vec<ComplexMat2>) -> Result<Self> {
        if elements.is_empty() {
            return Err(FfcError::InvalidArgument(
                "channel has no Kraus elements".into(),
            ));
        }
        let deviation = completeness_deviation(&elements);
        if deviation > COMPLETENESS_TOL {
            return Err(FfcError::IncompleteChannel { deviation });
        }
        Ok(Self { elements })
    }

    pub fn identity() -> Self {
        Self {
            elements: vec![ComplexMat2::identity()],
        }
    }

    pub fn elements(&self) -> &[ComplexMat2] {
        &self.elements
    }

    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation(&self.elements)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let out = self
            .elements
            .iter()
            .fold(ComplexMat2::zero(), |acc, e| acc + e.sandwich(rho.mat()));
        DensityMatrix::from_trusted(out)
    }
}

/// Amplitude damping with decay magnitude `r`:
/// `E₁ = diag(1, √(1−r))`, `E₂ = √r |0⟩⟨1|`.
pub fn amplitude_damping(r: f64) -> Result<KrausChannel> {
    check_closed("r", r, 0.0, 1.0)?;
    Ok(KrausChannel {
        elements: vec![
            ComplexMat2::diag(1.0, (1.0 - r).sqrt()),
            ComplexMat2::from_real(0.0, r.sqrt(), 0.0, 0.0),
        ],
    })
}

pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> DensityMatrix {
    ch.apply(rho)
}

/// The complete pre-weak measurement `{M₁, M₂}` of strength `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementPair {
    pub m1: ComplexMat2,
    pub m2: ComplexMat2,
    pub strength: f64,
}

impl MeasurementPair {
    pub fn element(&self, branch: Branch) -> &ComplexMat2 {
        match branch {
            Branch::One => &self.m1,
            Branch::Two => &self.m2,
        }
    }

    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation([&self.m1, &self.m2])
    }
}

/// `M₁ = diag(√p, √(1−p))`, `M₂ = diag(√(1−p), √p)`.
pub fn pre_weak(p: f64) -> Result<MeasurementPair> {
    check_closed("p", p, 0.0, 1.0)?;
    let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
    Ok(MeasurementPair {
        m1: ComplexMat2::diag(a, b),
        m2: ComplexMat2::diag(b, a),
        strength: p,
    })
}

/// Post-weak measurement of branch `i`: the `keep` outcome is retained, the
/// `discard` outcome is thrown away.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectiveOperator {
    pub keep: ComplexMat2,
    pub discard: ComplexMat2,
    pub branch: Branch,
    pub strength: f64,
}

impl SelectiveOperator {
    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation([&self.keep, &self.discard])
    }
}

/// `N₁ = diag(√(1−p₁), 1)` and `N₂ = diag(1, √(1−p₂))`, each completed by
/// the discard element.
pub fn post_weak(branch: Branch, strength: f64) -> Result<SelectiveOperator> {
    let name = match branch {
        Branch::One => "p1",
        Branch::Two => "p2",
    };
    check_closed(name, strength, 0.0, 1.0)?;
    let (kept, lost) = ((1.0 - strength).sqrt(), strength.sqrt());
    let (keep, discard) = match branch {
        Branch::One => (ComplexMat2::diag(kept, 1.0), ComplexMat2::diag(lost, 0.0)),
        Branch::Two => (ComplexMat2::diag(1.0, kept), ComplexMat2::diag(0.0, lost)),
    };
    Ok(SelectiveOperator {
        keep,
        discard,
        branch,
        strength,
    })
}

/// Normalized post-measurement state and the probability of the outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selected {
    pub state: DensityMatrix,
    pub prob: f64,
}

/// Selective update `ρ ↦ KρK†/tr(K†Kρ)`.
///
/// Returns [`FfcError::ImpossibleOutcome`] when `tr(K†Kρ) ≤ SELECTION_CUTOFF`;
/// callers give such outcomes zero weight.
pub fn select_update(k: &ComplexMat2, rho: &DensityMatrix) -> Result<Selected> {
    let unnorm = k.sandwich(rho.mat());
    let prob = unnorm.trace().re;
    if prob.is_nan() || prob <= SELECTION_CUTOFF {
        return Err(FfcError::ImpossibleOutcome {
            prob: prob.max(0.0),
        });
    }
    Ok(Selected {
        state: DensityMatrix::from_trusted(unnorm.scale(prob.recip())),
        prob: prob.min(1.0),
    })
}

/// `U₁ = I`, `U₂ = σ_x`.
pub fn feed_forward_unitary(branch: Branch) -> ComplexMat2 {
    match branch {
        Branch::One => ComplexMat2::identity(),
        Branch::Two => ComplexMat2::pauli_x(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{fidelity_ket, make_density, Ensemble, Ket, PureState, Sign};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn ket_density(k: Ket) -> DensityMatrix {
        DensityMatrix::from_ket(&k).unwrap()
    }

    #[test]
    fn undamped_channel_is_identity() {
        let ch = amplitude_damping(0.0).unwrap();
        assert_eq!(ch.elements()[1], ComplexMat2::zero());
        let rho = make_density(&PureState::new(0.7, Sign::Minus).unwrap());
        assert!(ch.apply(&rho).mat().max_abs_diff(rho.mat()) < 1e-16);
        let id = KrausChannel::identity();
        assert_eq!(apply_channel(&id, &rho), rho);
    }

    #[test]
    fn full_damping_maps_to_ground() {
        let ch = amplitude_damping(1.0).unwrap();
        for theta in [0.0, 0.4, 1.2, PI / 2.0] {
            for sign in [Sign::Plus, Sign::Minus] {
                let rho = make_density(&PureState::new(theta, sign).unwrap());
                let out = ch.apply(&rho);
                assert!(out.mat().max_abs_diff(&ComplexMat2::diag(1.0, 0.0)) < 1e-15);
            }
        }
    }

    #[test]
    fn damped_signal_state_matches_closed_form() {
        let (theta, r) = (3.0 * PI / 8.0, 0.7_f64);
        let ch = amplitude_damping(r).unwrap();
        for (sign, f) in [(Sign::Plus, 1.0), (Sign::Minus, -1.0)] {
            let rho = make_density(&PureState::new(theta, sign).unwrap());
            let out = ch.apply(&rho);
            let d1 = 0.5 * (1.0 - f * theta.sin()) * (1.0 - r);
            let off = 0.5 * theta.cos() * (1.0 - r).sqrt();
            let want = ComplexMat2::from_real(1.0 - d1, off, off, d1);
            assert!(out.mat().max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn excited_state_decays() {
        let out = amplitude_damping(0.7)
            .unwrap()
            .apply(&ket_density(Ket::one_state()));
        assert!(out.mat().max_abs_diff(&ComplexMat2::diag(0.7, 0.3)) < 1e-15);
    }

    #[test]
    fn ground_state_is_fixed_exactly() {
        let ground = ket_density(Ket::zero_state());
        for r in [0.0, 0.1, 0.33, 0.7, 0.999, 1.0] {
            let out = amplitude_damping(r).unwrap().apply(&ground);
            assert_eq!(out.mat(), ground.mat());
        }
    }

    #[test]
    fn channel_rejects_out_of_range() {
        assert!(amplitude_damping(-0.01).is_err());
        assert!(amplitude_damping(1.01).is_err());
        assert!(KrausChannel::new(vec![ComplexMat2::diag(1.0, 0.5)]).is_err());
        assert!(KrausChannel::new(vec![]).is_err());
    }

    #[test]
    fn pre_weak_limits() {
        let m = pre_weak(0.5).unwrap();
        assert_eq!(m.m1, m.m2);
        assert!(m.m1.max_abs_diff(&ComplexMat2::identity().scale(0.5f64.sqrt())) < 1e-16);
        let m = pre_weak(1.0).unwrap();
        assert_eq!(m.m1, ComplexMat2::diag(1.0, 0.0));
        assert_eq!(m.m2, ComplexMat2::diag(0.0, 1.0));
        let m = pre_weak(0.8).unwrap();
        assert_abs_diff_eq!(m.m1.get(0, 0).re, 0.894_427_191, epsilon = 1e-9);
        assert_abs_diff_eq!(m.m1.get(1, 1).re, 0.447_213_595, epsilon = 1e-9);
        assert_eq!(m.m2.get(0, 0), m.m1.get(1, 1));
        assert!(pre_weak(1.5).is_err());
    }

    #[test]
    fn post_weak_limits() {
        let n = post_weak(Branch::One, 0.0).unwrap();
        assert_eq!(n.keep, ComplexMat2::identity());
        assert_eq!(n.discard, ComplexMat2::zero());
        let n = post_weak(Branch::One, 1.0).unwrap();
        assert_eq!(n.keep, ComplexMat2::diag(0.0, 1.0));
        let n = post_weak(Branch::Two, 1.0).unwrap();
        assert_eq!(n.keep, ComplexMat2::diag(1.0, 0.0));
        assert!(post_weak(Branch::Two, -0.2).is_err());
        assert!(Branch::try_from(3).is_err());
        assert!(Branch::try_from(0).is_err());
        assert_eq!(Branch::try_from(2).unwrap(), Branch::Two);
    }

    #[test]
    fn protection_strength_reverses_no_jump_branch() {
        // p = 0.8, r = 0.7 ⇒ p₁ = 1 − (1−p)(1−r)/p = 0.925, and N₁E₁M₁ ∝ I.
        let (p, r) = (0.8_f64, 0.7_f64);
        let p1 = 1.0 - (1.0 - p) * (1.0 - r) / p;
        assert_abs_diff_eq!(p1, 0.925, epsilon = 1e-15);
        let m = pre_weak(p).unwrap();
        let e1 = amplitude_damping(r).unwrap().elements()[0];
        let n = post_weak(Branch::One, p1).unwrap();
        let prod = n.keep * e1 * m.m1;
        assert_abs_diff_eq!(prod.get(0, 0).re, prod.get(1, 1).re, epsilon = 1e-15);
        assert_eq!(prod.get(0, 1).norm(), 0.0);
    }

    #[test]
    fn select_update_examples() {
        let rho = make_density(&PureState::new(0.9, Sign::Plus).unwrap());
        let s = select_update(&ComplexMat2::identity(), &rho).unwrap();
        assert_abs_diff_eq!(s.prob, 1.0, epsilon = 1e-15);
        assert!(s.state.mat().max_abs_diff(rho.mat()) < 1e-15);

        let s = select_update(
            &ComplexMat2::diag(1.0, 0.0),
            &DensityMatrix::maximally_mixed(),
        )
        .unwrap();
        assert_eq!(s.prob, 0.5);
        assert_eq!(*s.state.mat(), ComplexMat2::diag(1.0, 0.0));

        let ground = ket_density(Ket::zero_state());
        let err = select_update(&ComplexMat2::diag(0.0, 1.0), &ground).unwrap_err();
        assert!(matches!(err, FfcError::ImpossibleOutcome { .. }));
    }

    #[test]
    fn pre_measurement_probability_matches_trace_oracle() {
        // P_{M₁} = Σ_n q_n ⟨ψ_n|M₁†M₁|ψ_n⟩ for the equal-prior input at θ = 3π/8.
        let theta = 3.0 * PI / 8.0;
        let m = pre_weak(0.8).unwrap();
        let e = Ensemble::pure(theta, 0.5).unwrap();
        let mixed =
            DensityMatrix::new(e.state_plus.mat().scale(0.5) + e.state_minus.mat().scale(0.5))
                .unwrap();
        let s = select_update(&m.m1, &mixed).unwrap();
        let povm = m.m1.adjoint() * m.m1;
        let want: f64 = [Sign::Plus, Sign::Minus]
            .iter()
            .map(|&sg| 0.5 * PureState::new(theta, sg).unwrap().ket().expectation(&povm))
            .sum();
        assert_abs_diff_eq!(s.prob, want, epsilon = 1e-15);
        // Both signal states have the same |0⟩ mass on average: ½(p + (1−p)).
        assert_abs_diff_eq!(s.prob, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn feed_forward_unitaries() {
        assert_eq!(feed_forward_unitary(Branch::One), ComplexMat2::identity());
        let x = feed_forward_unitary(Branch::Two);
        assert_eq!(x * x, ComplexMat2::identity());
        assert!((x.adjoint() * x).max_abs_diff(&ComplexMat2::identity()) <= 1e-15);
        let flipped = x.sandwich(&ComplexMat2::diag(0.0, 1.0));
        assert_eq!(flipped, ComplexMat2::diag(1.0, 0.0));
    }

    #[test]
    fn branch_two_is_channel_immune_near_strong_limit() {
        // At p → 1 the branch-2 state after U₂ is almost |0⟩ and the channel
        // leaves it nearly untouched.
        let p = 1.0 - 1e-6;
        let m = pre_weak(p).unwrap();
        let x = feed_forward_unitary(Branch::Two);
        for r in [0.1, 0.5, 0.7, 0.99, 1.0] {
            let ch = amplitude_damping(r).unwrap();
            for sign in [Sign::Plus, Sign::Minus] {
                let v = PureState::new(1.0, sign).unwrap().ket();
                let before = (x * m.m2).apply(&v).normalized().unwrap();
                let after = ch.apply(&ket_density(before));
                assert!(fidelity_ket(&after, &before) >= 1.0 - 1e-4);
                assert!(fidelity_ket(&after, &Ket::zero_state()) >= 1.0 - 1e-4);
            }
        }
    }
}
