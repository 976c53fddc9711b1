//! Checks of the candidate bounds `0 <= iqc <= H(k)` on a chain.
//!
//! The classical-quantum information of a chain `x2 <- k <- x1` is not a
//! mutual information, and the candidate bounds fail: the bundled fixtures
//! undershoot 0 and overshoot `H(k)` by `ln 2` each. The genuine mutual
//! information `I(x1:k)` of the same chain, by contrast, always satisfies
//! `0 <= I(x1:k) <= H(k)`; [`check_mutual_bounds`] exposes that contrast.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::info::{self, Joint2};
use crate::markov::{self, MarkovChain3};

/// Violations smaller than this are reported as [`Verdict::Holds`].
pub const VERDICT_TOLERANCE: f64 = 1e-9;

/// Which of the two candidate bounds a chain violates, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    ViolatesLower,
    ViolatesUpper,
    /// Unreachable for real chains (it would need `H(k) < 0`) but kept so
    /// the verdict is total in the violation magnitudes.
    ViolatesBoth,
}

/// Every quantity entering the two candidate bounds, in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// `H(x1) - H(x2|k)`.
    pub iqc: f64,
    pub h_x1: f64,
    pub h_x2_given_k: f64,
    /// Entropy of the middle marginal `P(k)`, the candidate upper bound.
    pub h_k: f64,
    /// The genuine mutual information `I(x1:k)` of the chain.
    pub mutual_x1_k: f64,
    /// `max(0, -iqc)`: how far the candidate lower bound 0 is undershot.
    pub lower_violation: f64,
    /// `max(0, iqc - h_k)`: how far the candidate upper bound is overshot.
    pub upper_violation: f64,
    pub verdict: Verdict,
}

/// Report for the bounds `0 <= I(x1:k) <= H(k)` on the genuine mutual
/// information, which hold for every chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MutualBoundReport {
    pub mutual_x1_k: f64,
    pub h_k: f64,
    pub holds: bool,
}

fn mutual_x1_k(chain: &MarkovChain3) -> f64 {
    let pair: Joint2 = chain.joint().marginal_x1_k();
    info::mutual_information(&pair)
}

/// Evaluates both candidate bounds on a chain.
pub fn check_bounds(chain: &MarkovChain3) -> BoundReport {
    let p_k = chain.marginal_k();
    let h_x1 = info::shannon_entropy(chain.p_x1());
    let h_x2_given_k = info::conditional_entropy(chain.p_x2_given_k(), &p_k)
        .expect("chain dimensions are validated at construction");
    let h_k = info::shannon_entropy(&p_k);
    let iqc = h_x1 - h_x2_given_k;

    let lower_violation = if iqc < 0.0 { -iqc } else { 0.0 };
    let upper_violation = if iqc > h_k { iqc - h_k } else { 0.0 };
    let verdict = match (
        lower_violation > VERDICT_TOLERANCE,
        upper_violation > VERDICT_TOLERANCE,
    ) {
        (false, false) => Verdict::Holds,
        (true, false) => Verdict::ViolatesLower,
        (false, true) => Verdict::ViolatesUpper,
        (true, true) => Verdict::ViolatesBoth,
    };

    BoundReport {
        iqc,
        h_x1,
        h_x2_given_k,
        h_k,
        mutual_x1_k: mutual_x1_k(chain),
        lower_violation,
        upper_violation,
        verdict,
    }
}

/// Evaluates the always-valid mutual-information bounds on a chain.
pub fn check_mutual_bounds(chain: &MarkovChain3) -> MutualBoundReport {
    let mi = mutual_x1_k(chain);
    let h_k = info::shannon_entropy(&chain.marginal_k());
    let holds = mi >= -VERDICT_TOLERANCE && mi <= h_k + VERDICT_TOLERANCE;
    MutualBoundReport {
        mutual_x1_k: mi,
        h_k,
        holds,
    }
}

/// Recomputes both fixture chains and checks their exact values, returning
/// the two reports. Any drift is a regression in the entropy pipeline and
/// surfaces as [`Error::SelfCheck`].
pub fn verify_fixtures() -> Result<(BoundReport, BoundReport)> {
    const TOL: f64 = 1e-12;
    let r1 = check_bounds(&markov::example1());
    let r2 = check_bounds(&markov::example2());

    let checks: [(&str, f64, f64); 8] = [
        ("example1 iqc", r1.iqc, -LN_2),
        ("example1 h_x1", r1.h_x1, 0.0),
        ("example1 h_x2_given_k", r1.h_x2_given_k, LN_2),
        ("example1 lower_violation", r1.lower_violation, LN_2),
        ("example2 iqc", r2.iqc, LN_2),
        ("example2 h_k", r2.h_k, 0.0),
        ("example2 h_x1", r2.h_x1, LN_2),
        ("example2 upper_violation", r2.upper_violation, LN_2),
    ];
    for (name, got, want) in checks {
        if (got - want).abs() > TOL {
            return Err(Error::SelfCheck(format!("{name} = {got}, expected {want}")));
        }
    }
    if r1.verdict != Verdict::ViolatesLower {
        return Err(Error::SelfCheck(format!(
            "example1 verdict is {:?}, expected ViolatesLower",
            r1.verdict
        )));
    }
    if r2.verdict != Verdict::ViolatesUpper {
        return Err(Error::SelfCheck(format!(
            "example2 verdict is {:?}, expected ViolatesUpper",
            r2.verdict
        )));
    }
    Ok((r1, r2))
}
