//! Minimum-error discrimination of two nonorthogonal qubit states sent
//! through an amplitude-damping channel, with and without feed-forward
//! control by weak measurements.
//!
//! * [`qubit`]: 2×2 complex algebra, density matrices, closed-form eigensolver.
//! * [`channels`]: damping channel, weak measurements, feed-forward unitaries.
//! * [`helstrom`]: optimal two-state measurement and its closed forms.
//! * [`protocol`]: the four-step protocol as an operator pipeline and as closed forms.
//! * [`strategies`]: state protection, optimal strengths, lattice scans.
//! * [`mc`]: per-shot Monte Carlo estimator used as an independent check.

pub mod channels;
pub mod error;
pub mod helstrom;
pub mod mc;
pub mod protocol;
pub mod qubit;
pub mod strategies;

pub use channels::{
    amplitude_damping, apply_channel, feed_forward_unitary, post_weak, pre_weak, select_update,
    Branch, KrausChannel, MeasurementPair, Selected, SelectiveOperator,
};
pub use error::{FfcError, Result};
pub use helstrom::{
    helstrom_correct, mixed_after_ad, pure_correct, transmitted_ensemble, DiscriminationResult,
};
pub use mc::{simulate, McConfig, McEstimate};
pub use protocol::{
    analytic_branch, analytic_metrics, closed_form_equal_priors, protocol_metrics,
    protocol_metrics_on, run_branch, run_branch_on, AnalyticMetrics, BranchResult, ProtocolMetrics,
    StrengthTriple,
};
pub use qubit::{
    fidelity_ket, fidelity_pure, hermitian_eigen, make_density, ComplexMat2, DensityMatrix,
    Ensemble, HermitianEigen, Ket, PureState, Sign,
};
pub use strategies::{
    case_analysis_check, optimal_line, optimal_point, pareto_scan, protection_curve,
    protection_lower_bound, protection_strengths, Case, CaseReport, OptimalPoint, ParetoPoint,
    ParetoScan, Wrt,
};
