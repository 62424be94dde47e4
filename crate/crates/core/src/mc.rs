//! Shot-by-shot Monte Carlo unraveling of the protocol.
//!
//! Each shot draws a signal label from the prior, then samples the
//! pre-measurement outcome, the Kraus jump, the keep/discard outcome and
//! finally the Helstrom measurement. Trajectories stay pure, so the state is
//! carried as an amplitude vector. The Helstrom projectors come from the
//! exact branch ensembles, not from the samples.
//!
//! Shots are grouped into fixed-size blocks. Block `b` draws from a ChaCha8
//! stream keyed by `(seed, b)`, so the tallies do not depend on how blocks are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{amplitude_damping, feed_forward_unitary, post_weak, pre_weak, Branch};
use crate::error::{check_closed, FfcError, Result};
use crate::protocol::{run_branch, StrengthTriple};
use crate::qubit::{check_theta, ComplexMat2, Ket, PureState, Sign};

/// Shots per RNG stream.
pub const BLOCK_SHOTS: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub shots: u64,
    pub seed: u64,
    pub theta: f64,
    pub q_plus: f64,
    pub r: f64,
    pub strengths: StrengthTriple,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub shots: u64,
    pub kept: u64,
    pub correct: u64,
    pub p_success_hat: f64,
    /// `None` when no shot was kept.
    pub p_correct_hat: Option<f64>,
    pub stderr_success: f64,
    pub stderr_correct: Option<f64>,
}

fn binomial_stderr(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Operators for one pre-measurement branch, in application order.
struct BranchOps {
    pre: ComplexMat2,
    unitary: ComplexMat2,
    keep: ComplexMat2,
    /// Projector for guessing `ρ₋`; `None` if the branch has no analytic ensemble.
    guess_minus: Option<ComplexMat2>,
}

struct Sampler {
    kets: [Ket; 2],
    q_plus: f64,
    jump: [ComplexMat2; 2],
    branches: [BranchOps; 2],
}

impl Sampler {
    fn new(cfg: &McConfig) -> Result<Self> {
        let pre = pre_weak(cfg.strengths.p)?;
        let channel = amplitude_damping(cfg.r)?;
        let mut ops = Vec::with_capacity(2);
        for branch in Branch::BOTH {
            let exact = run_branch(cfg.theta, cfg.q_plus, cfg.r, &cfg.strengths, branch)?;
            ops.push(BranchOps {
                pre: *pre.element(branch),
                unitary: feed_forward_unitary(branch),
                keep: post_weak(branch, cfg.strengths.post(branch))?.keep,
                guess_minus: exact.discrimination.map(|d| d.projector_minus),
            });
        }
        let [b1, b2]: [BranchOps; 2] = ops.try_into().ok().expect("two branches");
        let e = channel.elements();
        Ok(Self {
            kets: [
                PureState::new(cfg.theta, Sign::Plus)?.ket(),
                PureState::new(cfg.theta, Sign::Minus)?.ket(),
            ],
            q_plus: cfg.q_plus,
            jump: [e[0], e[1]],
            branches: [b1, b2],
        })
    }

    /// Returns `(kept, correct)` for one shot.
    fn shot<R: Rng>(&self, rng: &mut R) -> (bool, bool) {
        let label = if rng.random::<f64>() < self.q_plus {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let v = self.kets[match label {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }];

        let first = self.branches[0].pre.apply(&v);
        let (ops, v) = if rng.random::<f64>() < first.norm_sqr() {
            (&self.branches[0], first)
        } else {
            (&self.branches[1], self.branches[1].pre.apply(&v))
        };
        let v = renormalize(v);
        let v = ops.unitary.apply(&v);

        let no_jump = self.jump[0].apply(&v);
        let v = if rng.random::<f64>() < no_jump.norm_sqr() {
            no_jump
        } else {
            self.jump[1].apply(&v)
        };
        let v = ops.unitary.apply(&renormalize(v));

        let kept = ops.keep.apply(&v);
        if rng.random::<f64>() >= kept.norm_sqr() {
            return (false, false);
        }
        let v = renormalize(kept);
        let guess = match &ops.guess_minus {
            Some(pm) if rng.random::<f64>() < v.expectation(pm) => Sign::Minus,
            Some(_) => Sign::Plus,
            None if self.q_plus >= 0.5 => Sign::Plus,
            None => Sign::Minus,
        };
        (true, guess == label)
    }
}

fn renormalize(v: Ket) -> Ket {
    v.normalized().unwrap_or(v)
}

/// Estimates `P_S` and `P_C^fin` from `cfg.shots` independent trajectories.
pub fn simulate(cfg: &McConfig) -> Result<McEstimate> {
    if cfg.shots == 0 {
        return Err(FfcError::InvalidArgument("shots must be at least 1".into()));
    }
    check_theta(cfg.theta)?;
    check_closed("q_plus", cfg.q_plus, 0.0, 1.0)?;
    check_closed("r", cfg.r, 0.0, 1.0)?;
    let sampler = Sampler::new(cfg)?;

    let blocks = cfg.shots.div_ceil(BLOCK_SHOTS);
    let (kept, correct) = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let n = BLOCK_SHOTS.min(cfg.shots - b * BLOCK_SHOTS);
            let (mut kept, mut correct) = (0u64, 0u64);
            for _ in 0..n {
                let (k, c) = sampler.shot(&mut rng);
                kept += k as u64;
                correct += c as u64;
            }
            (kept, correct)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let p_success_hat = kept as f64 / cfg.shots as f64;
    let p_correct_hat = (kept > 0).then(|| correct as f64 / kept as f64);
    Ok(McEstimate {
        shots: cfg.shots,
        kept,
        correct,
        p_success_hat,
        p_correct_hat,
        stderr_success: binomial_stderr(p_success_hat, cfg.shots),
        stderr_correct: p_correct_hat.map(|p| binomial_stderr(p, kept)),
    })
}
