//! Choosing measurement strengths: state protection, the optimal point, and
//! lattice scans of the `(P_S, P_C^fin)` trade-off.

use rayon::prelude::*;

use crate::error::{check_closed, FfcError, Result};
use crate::protocol::{protocol_metrics, ProtocolMetrics, StrengthTriple};
use crate::qubit::check_theta;

/// Number of success-probability bins used for the optimal line.
pub const FRONTIER_BINS: usize = 200;

/// Points whose correctness is within this of the best higher-success point
/// are kept on the optimal line.
const FRONTIER_TIE: f64 = 1e-12;

/// Half-width of the band around `r = p/(1−p)` reported as a boundary.
pub const CASE_BOUNDARY_BAND: f64 = 1e-6;

/// One evaluated strength triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParetoPoint {
    pub strengths: StrengthTriple,
    pub p_correct: f64,
    pub p_success: f64,
    pub merit: f64,
}

impl ParetoPoint {
    pub fn from_metrics(strengths: StrengthTriple, m: &ProtocolMetrics) -> Self {
        Self {
            strengths,
            p_correct: m.p_correct,
            p_success: m.p_success,
            merit: m.merit,
        }
    }

    pub fn evaluate(theta: f64, q_plus: f64, r: f64, strengths: StrengthTriple) -> Result<Self> {
        let m = protocol_metrics(theta, q_plus, r, &strengths)?;
        Ok(Self::from_metrics(strengths, &m))
    }
}

/// `(1−r)/(2−r)`: smallest pre-measurement strength for which the
/// protection conditions give nonnegative post strengths.
pub fn protection_lower_bound(r: f64) -> f64 {
    (1.0 - r) / (2.0 - r)
}

/// Post strengths `p₁ = p₂ = 1 − (1−p)(1−r)/p` that undo the no-jump
/// evolution exactly.
pub fn protection_strengths(p: f64, r: f64) -> Result<(f64, f64)> {
    if !(r.is_finite() && (0.0..1.0).contains(&r)) {
        return Err(FfcError::domain("r", r, "[0, 1)"));
    }
    let lower = protection_lower_bound(r);
    if !(p.is_finite() && p >= lower - 1e-12 && p <= 1.0) {
        return Err(FfcError::domain(
            "p",
            p,
            format!("[{lower}, 1] (protection bound (1-r)/(2-r))"),
        ));
    }
    let pi = (1.0 - (1.0 - p) * (1.0 - r) / p).clamp(0.0, 1.0);
    Ok((pi, pi))
}

/// Protocol metrics along the protection curve.
///
/// `p = 1` forces `p₁ = p₂ = 1`, where nothing survives; that point yields
/// [`FfcError::NeverSucceeds`].
pub fn protection_curve(
    theta: f64,
    q_plus: f64,
    r: f64,
    p_grid: &[f64],
) -> Result<Vec<ParetoPoint>> {
    p_grid
        .iter()
        .map(|&p| {
            let (p1, p2) = protection_strengths(p, r)?;
            ParetoPoint::evaluate(theta, q_plus, r, StrengthTriple::new(p, p1, p2)?)
        })
        .collect()
}

/// Every lattice point and the optimal line extracted from it.
#[derive(Clone, Debug, PartialEq)]
pub struct ParetoScan {
    /// Lattice points in `(p, p₁, p₂)` lexicographic order; triples that never
    /// succeed are omitted.
    pub cloud: Vec<ParetoPoint>,
    pub frontier: Vec<ParetoPoint>,
}

pub fn lattice_axis(grid_n: usize) -> Vec<f64> {
    let last = (grid_n - 1) as f64;
    (0..grid_n).map(|k| k as f64 / last).collect()
}

/// Evaluates the protocol on the `grid_n³` lattice over `[0, 1]³`.
pub fn pareto_scan(theta: f64, q_plus: f64, r: f64, grid_n: usize) -> Result<ParetoScan> {
    if grid_n < 2 {
        return Err(FfcError::InvalidArgument(format!(
            "grid must have at least 2 points per axis, got {grid_n}"
        )));
    }
    check_theta(theta)?;
    check_closed("q_plus", q_plus, 0.0, 1.0)?;
    check_closed("r", r, 0.0, 1.0)?;
    let axis = lattice_axis(grid_n);
    let n2 = grid_n * grid_n;
    let evaluated: Vec<Option<ParetoPoint>> = (0..n2 * grid_n)
        .into_par_iter()
        .map(|idx| {
            let s = StrengthTriple {
                p: axis[idx / n2],
                p1: axis[(idx / grid_n) % grid_n],
                p2: axis[idx % grid_n],
            };
            match ParetoPoint::evaluate(theta, q_plus, r, s) {
                Ok(pt) => Ok(Some(pt)),
                Err(FfcError::NeverSucceeds) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let cloud: Vec<ParetoPoint> = evaluated.into_iter().flatten().collect();
    let frontier = optimal_line(&cloud, FRONTIER_BINS);
    Ok(ParetoScan { cloud, frontier })
}

/// Upper boundary of a `(P_S, P_C)` point cloud.
///
/// Points are binned uniformly by success probability and the best point
/// of each bin kept. A bin maximum is then dropped if a bin of higher
/// success holds a strictly more accurate point, since discarding runs at
/// random would reach that lower success at the higher accuracy. The result
/// is sorted by increasing success probability.
pub fn optimal_line(points: &[ParetoPoint], bins: usize) -> Vec<ParetoPoint> {
    assert!(bins > 0);
    let mut best: Vec<Option<ParetoPoint>> = vec![None; bins];
    for pt in points {
        let b = ((pt.p_success * bins as f64) as usize).min(bins - 1);
        match &best[b] {
            Some(cur) if cur.p_correct >= pt.p_correct => {}
            _ => best[b] = Some(*pt),
        }
    }
    let mut line = Vec::new();
    let mut ceiling = f64::NEG_INFINITY;
    for pt in best.iter().rev().flatten() {
        if pt.p_correct >= ceiling - FRONTIER_TIE {
            line.push(*pt);
            ceiling = ceiling.max(pt.p_correct);
        }
    }
    line.reverse();
    line
}

/// Optimal discrimination: largest `P_C^fin`, then largest `P_S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalPoint {
    pub strengths: StrengthTriple,
    pub p_correct_opt: f64,
    pub p_success_opt: f64,
    /// `θ = 0`: the two states coincide and only the prior can be guessed.
    pub degenerate: bool,
}

/// The optimal strength triple and its analytic figures of merit,
/// `P_C^opt = ½(1 + (|χ| + sin θ)/(1 + |χ| sin θ))` and
/// `P_S^opt = ½(1 + |χ| sin θ)`. Neither depends on the damping.
///
/// Equal priors use `(1, 0, 0)`, which keeps every run (`P_S^opt = 1`);
/// `(0, 0, 0)` performs identically.
pub fn optimal_point(theta: f64, q_plus: f64) -> Result<OptimalPoint> {
    check_theta(theta)?;
    check_closed("q_plus", q_plus, 0.0, 1.0)?;
    let q_minus = 1.0 - q_plus;
    let strengths = if q_plus > q_minus {
        StrengthTriple::new(1.0, 0.0, 1.0)?
    } else if q_plus < q_minus {
        StrengthTriple::new(1.0, 1.0, 0.0)?
    } else {
        StrengthTriple::new(1.0, 0.0, 0.0)?
    };
    let chi = (q_plus - q_minus).abs();
    let sin = theta.sin();
    // Equal priors need no post-selection at all.
    let p_success_opt = if chi == 0.0 {
        1.0
    } else {
        0.5 * (1.0 + sin * chi)
    };
    if theta == 0.0 {
        return Ok(OptimalPoint {
            strengths,
            p_correct_opt: q_plus.max(q_minus),
            p_success_opt,
            degenerate: true,
        });
    }
    Ok(OptimalPoint {
        strengths,
        p_correct_opt: 0.5 * (1.0 + (chi + sin) / (1.0 + sin * chi)),
        p_success_opt,
        degenerate: false,
    })
}

/// Equal-prior regime of `P_C^fin` relative to the kink at `r = p/(1−p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// `r > p/(1−p)` with `p₁ = p₂ = 1`: flat in `p`.
    A1,
    /// `r > p/(1−p)`: decreasing in `p`.
    A2,
    /// `r < p/(1−p)` with `p₁ = p₂ = 1`: flat in `p`.
    B1,
    /// `r < p/(1−p)`: increasing in `p`.
    B2,
    /// `r = p/(1−p)`: increasing in `p₁` and `p₂`.
    C,
    /// Within [`CASE_BOUNDARY_BAND`] of the kink but not on it.
    Boundary,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::A1 => "a-1",
            Case::A2 => "a-2",
            Case::B1 => "b-1",
            Case::B2 => "b-2",
            Case::C => "c",
            Case::Boundary => "boundary",
        }
    }
}

/// Variable the reported derivative is taken with respect to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wrt {
    P,
    P1,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaseReport {
    pub case: Case,
    pub wrt: Wrt,
    /// Analytic derivative of the equal-prior `P_C^fin`; `None` at a boundary.
    pub derivative: Option<f64>,
}

impl CaseReport {
    /// `-1`, `0` or `1`; `None` at a boundary.
    pub fn sign(&self) -> Option<i8> {
        self.derivative.map(|d| {
            if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                0
            }
        })
    }
}

/// Classifies `(r, p)` against the kink and returns the analytic slope of
/// the equal-prior `P_C^fin`.
///
/// With `S = p₁ + p₂` and `D = 2 − S(p(1−r) + r)`:
///
/// * case (a): `∂P/∂p = sin θ (2 − S)(S r − 2) / D²`
/// * case (b): `∂P/∂p = sin θ (2 − S)² r / D²`
/// * case (c): `∂P/∂p₁ = sin θ p (1 − 2p) / (2 (pS − 1)²)`
pub fn case_analysis_check(theta: f64, r: f64, s: &StrengthTriple) -> Result<CaseReport> {
    check_theta(theta)?;
    if theta == 0.0 {
        return Err(FfcError::domain("theta", theta, "(0, pi/2]"));
    }
    check_closed("r", r, 0.0, 1.0)?;
    let s = StrengthTriple::new(s.p, s.p1, s.p2)?;
    let StrengthTriple { p, p1, p2 } = s;
    let sin = theta.sin();
    let sum = p1 + p2;
    let saturated = p1 == 1.0 && p2 == 1.0;

    let offset = if p < 1.0 {
        r - p / (1.0 - p)
    } else {
        f64::NEG_INFINITY
    };
    if offset.abs() <= 1e-12 {
        let denom = p * sum - 1.0;
        return Ok(CaseReport {
            case: Case::C,
            wrt: Wrt::P1,
            derivative: Some(sin * p * (1.0 - 2.0 * p) / (2.0 * denom * denom)),
        });
    }
    if offset.abs() < CASE_BOUNDARY_BAND {
        return Ok(CaseReport {
            case: Case::Boundary,
            wrt: Wrt::P,
            derivative: None,
        });
    }
    let d = 2.0 - sum * (p * (1.0 - r) + r);
    let (case, slope) = if offset > 0.0 {
        let case = if saturated { Case::A1 } else { Case::A2 };
        (case, sin * (2.0 - sum) * (sum * r - 2.0) / (d * d))
    } else {
        let case = if saturated { Case::B1 } else { Case::B2 };
        (case, sin * (2.0 - sum).powi(2) * r / (d * d))
    };
    Ok(CaseReport {
        case,
        wrt: Wrt::P,
        derivative: Some(if saturated { 0.0 } else { slope }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::helstrom::{mixed_after_ad, pure_correct};
    use crate::protocol::closed_form_equal_priors;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    const THETA: f64 = 3.0 * PI / 8.0;

    #[test]
    fn protection_examples() {
        for r in [0.0, 0.3, 0.9] {
            assert_eq!(protection_strengths(1.0, r).unwrap(), (1.0, 1.0));
        }
        assert_eq!(protection_strengths(0.5, 0.0).unwrap(), (0.0, 0.0));
        let (p1, p2) = protection_strengths(0.8, 0.7).unwrap();
        assert_abs_diff_eq!(p1, 0.925, epsilon = 1e-15);
        assert_eq!(p1, p2);
    }

    #[test]
    fn protection_rejects_below_bound() {
        let err = protection_strengths(0.2, 0.7).unwrap_err();
        match err {
            FfcError::Domain { name, range, .. } => {
                assert_eq!(name, "p");
                assert!(range.contains("(1-r)/(2-r)"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(protection_strengths(0.9, 1.0).is_err());
        assert!(protection_strengths(1.1, 0.5).is_err());
        // Exactly at the bound the post strengths vanish.
        let r = 0.7;
        let (p1, _) = protection_strengths(protection_lower_bound(r), r).unwrap();
        assert!(p1.abs() < 1e-15);
    }

    #[test]
    fn protection_curve_matches_closed_forms() {
        let r = 0.7;
        let grid: Vec<f64> = (0..50).map(|k| 0.25 + 0.74 * k as f64 / 49.0).collect();
        let curve = protection_curve(THETA, 0.5, r, &grid).unwrap();
        for (pt, &p) in curve.iter().zip(&grid) {
            let pc = 0.5
                * (1.0 + THETA.sin() * (p + (p - (1.0 - p) * r).abs()) / (2.0 * p + (1.0 - p) * r));
            let ps = (1.0 - p) * (1.0 - r) * (1.0 + (p + (1.0 - p) * r) / p);
            assert_abs_diff_eq!(pt.p_correct, pc, epsilon = 1e-12);
            assert_abs_diff_eq!(pt.p_success, ps, epsilon = 1e-12);
            assert!(pt.p_correct > mixed_after_ad(THETA, 0.5, r).unwrap());
        }
        let at = protection_curve(THETA, 0.5, r, &[0.8]).unwrap()[0];
        assert_abs_diff_eq!(at.p_correct, 0.887_604_6, epsilon = 5e-8);
        assert_abs_diff_eq!(at.p_success, 0.1305, epsilon = 1e-12);
    }

    #[test]
    fn protection_without_noise_is_exact() {
        let grid = [0.5, 0.6, 0.75, 0.99];
        for q in [0.5, 0.3] {
            for pt in protection_curve(1.0, q, 0.0, &grid).unwrap() {
                assert_abs_diff_eq!(pt.p_correct, pure_correct(1.0, q).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn protection_curve_at_unit_strength_never_succeeds() {
        assert_eq!(
            protection_curve(THETA, 0.5, 0.7, &[1.0]).unwrap_err(),
            FfcError::NeverSucceeds
        );
    }

    #[test]
    fn lattice_maxima() {
        let scan = pareto_scan(THETA, 0.5, 0.7, 21).unwrap();
        let best = scan.cloud.iter().map(|p| p.p_correct).fold(0.0, f64::max);
        assert_abs_diff_eq!(best, 0.961_939_766_255_643, epsilon = 1e-9);
        for pt in &scan.frontier {
            assert_abs_diff_eq!(
                pt.p_correct,
                pure_correct(THETA, 0.5).unwrap(),
                epsilon = 1e-9
            );
        }
        assert!(scan.frontier.len() > 10);
        assert!(scan
            .frontier
            .windows(2)
            .all(|w| w[0].p_success <= w[1].p_success));

        let scan = pareto_scan(THETA, 1.0 / 3.0, 0.7, 21).unwrap();
        let best = scan.cloud.iter().map(|p| p.p_correct).fold(0.0, f64::max);
        assert_abs_diff_eq!(best, 0.980_600_712_417_897, epsilon = 1e-9);
        // Optimal line decreases once success exceeds the optimal point.
        let last = scan.frontier.last().unwrap();
        assert!(last.p_correct < best);
        assert!(scan
            .frontier
            .windows(2)
            .all(|w| w[0].p_correct >= w[1].p_correct - 1e-12));
    }

    #[test]
    fn two_point_lattice_contains_optimal_corners() {
        let scan = pareto_scan(THETA, 1.0 / 3.0, 0.4, 2).unwrap();
        let opt = optimal_point(THETA, 1.0 / 3.0).unwrap();
        assert!(scan.cloud.iter().any(|pt| pt.strengths == opt.strengths));
        // (1,1,1) never succeeds and is omitted.
        assert_eq!(scan.cloud.len(), 7);
        assert!(pareto_scan(THETA, 0.5, 0.4, 1).is_err());
    }

    #[test]
    fn scan_is_deterministic() {
        let a = pareto_scan(0.9, 0.4, 0.3, 9).unwrap();
        let b = pareto_scan(0.9, 0.4, 0.3, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn optimal_point_examples() {
        let o = optimal_point(THETA, 0.5).unwrap();
        assert_eq!(o.strengths, StrengthTriple::new(1.0, 0.0, 0.0).unwrap());
        assert_abs_diff_eq!(o.p_correct_opt, 0.5 * (1.0 + THETA.sin()), epsilon = 1e-15);
        assert_eq!(o.p_success_opt, 1.0);

        let o = optimal_point(THETA, 1.0 / 3.0).unwrap();
        assert_eq!(o.strengths, StrengthTriple::new(1.0, 1.0, 0.0).unwrap());
        assert_abs_diff_eq!(o.p_correct_opt, 0.980_600_7, epsilon = 5e-8);
        assert_abs_diff_eq!(o.p_success_opt, 0.653_979_9, epsilon = 5e-8);

        let o2 = optimal_point(THETA, 2.0 / 3.0).unwrap();
        assert_eq!(o2.strengths, StrengthTriple::new(1.0, 0.0, 1.0).unwrap());
        assert_abs_diff_eq!(o2.p_correct_opt, o.p_correct_opt, epsilon = 1e-15);
        assert_abs_diff_eq!(o2.p_success_opt, o.p_success_opt, epsilon = 1e-15);

        let d = optimal_point(0.0, 0.3).unwrap();
        assert!(d.degenerate);
        assert_eq!(d.p_correct_opt, 0.7);
    }

    #[test]
    fn optimal_point_matches_pipeline_for_any_damping() {
        for q in [0.5, 0.2, 1.0 / 3.0, 0.8] {
            let o = optimal_point(THETA, q).unwrap();
            for r in [0.0, 0.1, 0.5, 0.9, 1.0] {
                let pt = ParetoPoint::evaluate(THETA, q, r, o.strengths).unwrap();
                assert_abs_diff_eq!(pt.p_correct, o.p_correct_opt, epsilon = 1e-12);
                assert_abs_diff_eq!(pt.p_success, o.p_success_opt, epsilon = 1e-12);
            }
        }
        // The alternative equal-prior optimum.
        let alt =
            ParetoPoint::evaluate(THETA, 0.5, 0.7, StrengthTriple::new(0.0, 0.0, 0.0).unwrap())
                .unwrap();
        let o = optimal_point(THETA, 0.5).unwrap();
        assert_abs_diff_eq!(alt.p_correct, o.p_correct_opt, epsilon = 1e-12);
        assert_abs_diff_eq!(alt.p_success, o.p_success_opt, epsilon = 1e-12);
    }

    fn central_difference(theta: f64, r: f64, s: StrengthTriple, wrt: Wrt) -> f64 {
        let h = 1e-6;
        let eval = |delta: f64| {
            let t = match wrt {
                Wrt::P => StrengthTriple {
                    p: s.p + delta,
                    ..s
                },
                Wrt::P1 => StrengthTriple {
                    p1: s.p1 + delta,
                    ..s
                },
            };
            closed_form_equal_priors(theta, r, &t).unwrap().p_correct
        };
        (eval(h) - eval(-h)) / (2.0 * h)
    }

    #[test]
    fn case_examples() {
        let s = StrengthTriple::new(0.2, 0.5, 0.5).unwrap();
        let rep = case_analysis_check(THETA, 0.7, &s).unwrap();
        assert_eq!(rep.case, Case::A2);
        assert_eq!(rep.sign(), Some(-1));
        let fd = central_difference(THETA, 0.7, s, Wrt::P);
        assert!(fd < 0.0);
        assert_abs_diff_eq!(rep.derivative.unwrap(), fd, epsilon = 1e-6);

        let s = StrengthTriple::new(0.5, 0.5, 0.5).unwrap();
        let rep = case_analysis_check(THETA, 0.1, &s).unwrap();
        assert_eq!(rep.case, Case::B2);
        assert_eq!(rep.sign(), Some(1));
        let fd = central_difference(THETA, 0.1, s, Wrt::P);
        assert_abs_diff_eq!(rep.derivative.unwrap(), fd, epsilon = 1e-6);

        for (p, r, want) in [(0.2, 0.7, Case::A1), (0.6, 0.2, Case::B1)] {
            let s = StrengthTriple::new(p, 1.0, 1.0).unwrap();
            let rep = case_analysis_check(THETA, r, &s).unwrap();
            assert_eq!(rep.case, want);
            assert_eq!(rep.sign(), Some(0));
            let pc = closed_form_equal_priors(THETA, r, &s).unwrap().p_correct;
            assert_abs_diff_eq!(pc, pure_correct(THETA, 0.5).unwrap(), epsilon = 1e-12);
            assert!(central_difference(THETA, r, s, Wrt::P).abs() < 1e-8);
        }
    }

    #[test]
    fn balanced_case_slope_in_post_strength() {
        let p = 0.3;
        let r = p / (1.0 - p);
        let s = StrengthTriple::new(p, 0.4, 0.2).unwrap();
        let rep = case_analysis_check(1.1, r, &s).unwrap();
        assert_eq!(rep.case, Case::C);
        assert_eq!(rep.wrt, Wrt::P1);
        let fd = central_difference(1.1, r, s, Wrt::P1);
        assert!(fd > 0.0);
        assert_abs_diff_eq!(rep.derivative.unwrap(), fd, epsilon = 1e-7);
    }

    #[test]
    fn near_kink_is_boundary() {
        let p = 0.3;
        let r = p / (1.0 - p) + 5e-7;
        let rep = case_analysis_check(1.1, r, &StrengthTriple::new(p, 0.4, 0.2).unwrap()).unwrap();
        assert_eq!(rep.case, Case::Boundary);
        assert_eq!(rep.sign(), None);
        assert!(
            case_analysis_check(0.0, 0.5, &StrengthTriple::new(0.5, 0.0, 0.0).unwrap()).is_err()
        );
    }

    #[test]
    fn frontier_drops_dominated_bins() {
        let s = StrengthTriple::new(0.0, 0.0, 0.0).unwrap();
        let pt = |ps: f64, pc: f64| ParetoPoint {
            strengths: s,
            p_correct: pc,
            p_success: ps,
            merit: ps * pc,
        };
        let pts = [
            pt(0.1, 0.9),
            pt(0.12, 0.95),
            pt(0.5, 0.8),
            pt(0.55, 0.85),
            pt(1.0, 0.7),
        ];
        let line = optimal_line(&pts, 10);
        let got: Vec<(f64, f64)> = line.iter().map(|p| (p.p_success, p.p_correct)).collect();
        assert_eq!(got, vec![(0.12, 0.95), (0.55, 0.85), (1.0, 0.7)]);
    }
}
