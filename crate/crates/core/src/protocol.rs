//! The feed-forward-control discrimination protocol.
//!
//! Alice applies the pre-weak measurement `{M₁, M₂}` and, on outcome `i`,
//! the unitary `U_i` before sending the qubit through the damping channel.
//! Bob undoes `U_i`, applies the post-weak measurement `N_i` (keeping only
//! the accepted outcome) and finally runs the Helstrom measurement on the
//! branch-`i` ensemble.
//!
//! Two independent evaluations are provided. [`run_branch`] and
//! [`protocol_metrics`] compose the operators explicitly; [`analytic_metrics`]
//! and [`closed_form_equal_priors`] evaluate the closed-form coefficients.
//! The operator pipeline is authoritative.

use crate::channels::{
    amplitude_damping, feed_forward_unitary, post_weak, pre_weak, select_update, Branch,
    SELECTION_CUTOFF,
};
use crate::error::{check_closed, FfcError, Result};
use crate::helstrom::{helstrom_correct, DiscriminationResult};
use crate::qubit::{check_theta, DensityMatrix, Ensemble, Sign};

/// Pre-measurement strength `p` and post-measurement strengths `p₁`, `p₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrengthTriple {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
}

impl StrengthTriple {
    pub fn new(p: f64, p1: f64, p2: f64) -> Result<Self> {
        check_closed("p", p, 0.0, 1.0)?;
        check_closed("p1", p1, 0.0, 1.0)?;
        check_closed("p2", p2, 0.0, 1.0)?;
        Ok(Self { p, p1, p2 })
    }

    /// Post-measurement strength for `branch`.
    pub fn post(&self, branch: Branch) -> f64 {
        match branch {
            Branch::One => self.p1,
            Branch::Two => self.p2,
        }
    }

    /// Same pre-measurement, post strengths exchanged.
    pub fn swapped_post(&self) -> Self {
        Self {
            p: self.p,
            p1: self.p2,
            p2: self.p1,
        }
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.p, self.p1, self.p2).map(|_| ())
    }
}

/// Outcome of one pre-measurement branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchResult {
    pub branch: Branch,
    /// `P_{M_i}`.
    pub pre_prob: f64,
    /// `P_{N_i}`, conditional on the pre-measurement outcome.
    pub post_prob: f64,
    /// `P_{S_i} = P_{M_i} P_{N_i}`.
    pub selection_prob: f64,
    /// Final branch ensemble with updated priors; `None` when the branch is impossible.
    pub final_ensemble: Option<Ensemble>,
    /// Optimal measurement on `final_ensemble`.
    pub discrimination: Option<DiscriminationResult>,
}

impl BranchResult {
    pub fn is_possible(&self) -> bool {
        self.final_ensemble.is_some()
    }

    /// `P_C^{fin(i)}`, or `None` for an impossible branch.
    pub fn p_correct(&self) -> Option<f64> {
        self.discrimination.map(|d| d.p_correct)
    }

    fn impossible(branch: Branch, pre_prob: f64, post_prob: f64, selection_prob: f64) -> Self {
        Self {
            branch,
            pre_prob,
            post_prob,
            selection_prob,
            final_ensemble: None,
            discrimination: None,
        }
    }
}

/// Aggregate figures of merit of the protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolMetrics {
    pub branches: [BranchResult; 2],
    /// `P_C^fin`, the selection-weighted mean of the branch success probabilities.
    pub p_correct: f64,
    /// `P_S = P_{S₁} + P_{S₂}`.
    pub p_success: f64,
    /// `P_SC = P_S · P_C^fin`.
    pub merit: f64,
}

impl ProtocolMetrics {
    pub fn branch(&self, branch: Branch) -> &BranchResult {
        &self.branches[branch.index()]
    }
}

/// Unnormalized survival of one signal state through a branch.
struct Component {
    /// Prior times the pre-measurement acceptance probability.
    after_pre: f64,
    /// `after_pre` times the post-measurement acceptance probability.
    after_post: f64,
    state: Option<DensityMatrix>,
}

fn propagate(
    e: &Ensemble,
    sign: Sign,
    r: f64,
    s: &StrengthTriple,
    branch: Branch,
) -> Result<Component> {
    let m = *pre_weak(s.p)?.element(branch);
    let n = post_weak(branch, s.post(branch))?.keep;
    let u = feed_forward_unitary(branch);
    let channel = amplitude_damping(r)?;

    let prior = e.prior(sign);
    let selected = match select_update(&m, e.state(sign)) {
        Ok(sel) => sel,
        Err(FfcError::ImpossibleOutcome { .. }) => {
            return Ok(Component {
                after_pre: 0.0,
                after_post: 0.0,
                state: None,
            })
        }
        Err(other) => return Err(other),
    };
    let after_pre = prior * selected.prob;
    let sent = DensityMatrix::from_trusted(u.sandwich(selected.state.mat()));
    let received = channel.apply(&sent);
    let restored = DensityMatrix::from_trusted(u.sandwich(received.mat()));
    match select_update(&n, &restored) {
        Ok(kept) => Ok(Component {
            after_pre,
            after_post: after_pre * kept.prob,
            state: Some(kept.state),
        }),
        Err(FfcError::ImpossibleOutcome { .. }) => Ok(Component {
            after_pre,
            after_post: 0.0,
            state: None,
        }),
        Err(other) => Err(other),
    }
}

/// Runs branch `i` of the protocol on an arbitrary input ensemble.
pub fn run_branch_on(
    e: &Ensemble,
    r: f64,
    s: &StrengthTriple,
    branch: Branch,
) -> Result<BranchResult> {
    check_closed("r", r, 0.0, 1.0)?;
    s.validate()?;
    let plus = propagate(e, Sign::Plus, r, s, branch)?;
    let minus = propagate(e, Sign::Minus, r, s, branch)?;

    let pre_prob = plus.after_pre + minus.after_pre;
    let selection_prob = plus.after_post + minus.after_post;
    let post_prob = if pre_prob > 0.0 {
        selection_prob / pre_prob
    } else {
        0.0
    };
    if selection_prob.is_nan() || selection_prob <= SELECTION_CUTOFF {
        return Ok(BranchResult::impossible(
            branch,
            pre_prob,
            post_prob,
            selection_prob,
        ));
    }

    let q_plus = plus.after_post / selection_prob;
    // A component that never survives has zero prior; its slot borrows the
    // other state so the ensemble stays well formed.
    let (state_plus, state_minus) = match (plus.state, minus.state) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, a),
        (None, Some(b)) => (b, b),
        (None, None) => unreachable!("positive selection probability"),
    };
    let final_ensemble = Ensemble::new(state_plus, state_minus, q_plus, 1.0 - q_plus)?;
    let discrimination = helstrom_correct(&final_ensemble);
    Ok(BranchResult {
        branch,
        pre_prob,
        post_prob,
        selection_prob,
        final_ensemble: Some(final_ensemble),
        discrimination: Some(discrimination),
    })
}

/// Runs branch `i` of the protocol for the signal pair `|ψ±⟩(θ)` with priors `(q₊, 1−q₊)`.
pub fn run_branch(
    theta: f64,
    q_plus: f64,
    r: f64,
    s: &StrengthTriple,
    branch: Branch,
) -> Result<BranchResult> {
    let e = Ensemble::pure(theta, q_plus)?;
    run_branch_on(&e, r, s, branch)
}

/// Combines both branches of the protocol on an arbitrary input ensemble.
pub fn protocol_metrics_on(e: &Ensemble, r: f64, s: &StrengthTriple) -> Result<ProtocolMetrics> {
    let branches = [
        run_branch_on(e, r, s, Branch::One)?,
        run_branch_on(e, r, s, Branch::Two)?,
    ];
    aggregate(branches)
}

pub fn protocol_metrics(
    theta: f64,
    q_plus: f64,
    r: f64,
    s: &StrengthTriple,
) -> Result<ProtocolMetrics> {
    let e = Ensemble::pure(theta, q_plus)?;
    protocol_metrics_on(&e, r, s)
}

fn aggregate(branches: [BranchResult; 2]) -> Result<ProtocolMetrics> {
    let (mut p_success, mut merit) = (0.0, 0.0);
    for b in branches.iter() {
        if let Some(pc) = b.p_correct() {
            p_success += b.selection_prob;
            merit += b.selection_prob * pc;
        }
    }
    if p_success.is_nan() || p_success <= SELECTION_CUTOFF {
        return Err(FfcError::NeverSucceeds);
    }
    Ok(ProtocolMetrics {
        branches,
        p_correct: merit / p_success,
        p_success,
        merit,
    })
}

/// Closed-form success and correctness probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticMetrics {
    pub p_correct: f64,
    pub p_success: f64,
}

/// Equal-prior closed forms:
///
/// `P_S = ½(2 − (p₁+p₂)(p(1−r)+r))` and
/// `P_C = ½ + sin θ (|p − (1−p)r|(2 − p₁ − p₂) + 2(1−p)(1−r)) / (4 P_S)`.
///
/// At `θ = 0` the two states coincide and `P_C = ½`.
pub fn closed_form_equal_priors(theta: f64, r: f64, s: &StrengthTriple) -> Result<AnalyticMetrics> {
    check_theta(theta)?;
    check_closed("r", r, 0.0, 1.0)?;
    s.validate()?;
    let StrengthTriple { p, p1, p2 } = *s;
    let sum = p1 + p2;
    let p_success = 0.5 * (2.0 - sum * (p * (1.0 - r) + r));
    if p_success.is_nan() || p_success <= SELECTION_CUTOFF {
        return Err(FfcError::NeverSucceeds);
    }
    if theta == 0.0 {
        return Ok(AnalyticMetrics {
            p_correct: 0.5,
            p_success,
        });
    }
    let numerator = (p - (1.0 - p) * r).abs() * (2.0 - sum) + 2.0 * (1.0 - p) * (1.0 - r);
    Ok(AnalyticMetrics {
        p_correct: 0.5 + theta.sin() * numerator / (4.0 * p_success),
        p_success,
    })
}

/// Closed-form `(P_{S_i}, P_C^{fin(i)})` for branch `i` and arbitrary priors.
///
/// With `η₁ = (1 − sin θ)/2`, `η₂ = (1 + sin θ)/2`, the unnormalized branch
/// Helstrom operator has trace `g_i`, top-left entry `a_i` and off-diagonal
/// `b_i`; its eigenvalues are `(g_i ± √(4b_i² + (g_i − 2a_i)²))/2`.
pub fn analytic_branch(
    theta: f64,
    q_plus: f64,
    r: f64,
    s: &StrengthTriple,
    branch: Branch,
) -> Result<(f64, Option<f64>)> {
    check_theta(theta)?;
    check_closed("q_plus", q_plus, 0.0, 1.0)?;
    check_closed("r", r, 0.0, 1.0)?;
    s.validate()?;
    let q_minus = 1.0 - q_plus;
    let p = s.p;
    let pi = s.post(branch);
    let (sin, cos) = theta.sin_cos();
    let eta = match branch {
        Branch::One => 0.5 * (1.0 - sin),
        Branch::Two => 0.5 * (1.0 + sin),
    };

    // Unnormalized populations: ground-state mass and surviving excited-state mass.
    let ground_minus = eta * p * (1.0 - pi) + (1.0 - eta) * (1.0 - p) * (1.0 - pi) * r;
    let ground_plus = (1.0 - eta) * p * (1.0 - pi) + eta * (1.0 - p) * (1.0 - pi) * r;
    let total_minus = eta * p * (1.0 - pi) + (1.0 - eta) * (1.0 - p) * (1.0 - pi * r);
    let total_plus = (1.0 - eta) * p * (1.0 - pi) + eta * (1.0 - p) * (1.0 - pi * r);

    let a = q_minus * ground_minus - q_plus * ground_plus;
    let b = 0.5 * (q_minus - q_plus) * cos * (p * (1.0 - p) * (1.0 - pi) * (1.0 - r)).sqrt();
    let g = q_minus * total_minus - q_plus * total_plus;
    let selection = q_minus * total_minus + q_plus * total_plus;
    if selection.is_nan() || selection <= SELECTION_CUTOFF {
        return Ok((selection.max(0.0), None));
    }
    let root = (4.0 * b * b + (g - 2.0 * a).powi(2)).sqrt();
    let pc = 0.5 * (1.0 + ((g + root).abs() + (g - root).abs()) / (2.0 * selection));
    Ok((selection, Some(pc)))
}

/// Closed-form `P_C^fin` and `P_S` for arbitrary priors.
pub fn analytic_metrics(
    theta: f64,
    q_plus: f64,
    r: f64,
    s: &StrengthTriple,
) -> Result<AnalyticMetrics> {
    let (mut p_success, mut merit) = (0.0, 0.0);
    for branch in Branch::BOTH {
        if let (ps, Some(pc)) = analytic_branch(theta, q_plus, r, s, branch)? {
            p_success += ps;
            merit += ps * pc;
        }
    }
    if p_success.is_nan() || p_success <= SELECTION_CUTOFF {
        return Err(FfcError::NeverSucceeds);
    }
    Ok(AnalyticMetrics {
        p_correct: merit / p_success,
        p_success,
    })
}
