//! Discrete measurement-feedback processes: pointwise entropy production,
//! measurement information, and their exponential averages.
//!
//! A process runs initial state `x0` -> measurement outcome `k` ->
//! feedback-driven final state `x1`. All logarithms are natural, so every
//! quantity here is in nats. Conventions:
//!
//! - forward weight of a trajectory: `p0(x0) M(k|x0) F_k(x1|x0)`
//! - entropy production: `sigma = ln[p0(x0) F_k(x1|x0)] - ln[p1_ref_k(x1) R_k(x0|x1)]`
//! - measurement information: `i_c = ln[M(k|x0) / p_k(k)]` with `p_k = M p0`
//!
//! The exponential average `<exp(-sigma - i_c)> = 1` holds whenever the
//! reverse reference weight `p_k(k) p1_ref_k(x1) R_k(x0|x1)` is carried
//! entirely by forward-reachable trajectories: each forward term then
//! collapses to the corresponding reverse weight and the sum telescopes to
//! the reverse total mass. The Bayesian reverse construction guarantees
//! this and in addition makes `sigma` vanish pointwise.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::info::{self, CondMatrix, ProbVec};
use crate::markov::MarkovChain3;
use crate::stream::stream_rng;

/// A measurement-feedback process over finite alphabets.
///
/// Holds the initial distribution `p0`, measurement channel `M` (outcomes
/// given initial state), per-outcome feedback channels `F_k` (final state
/// given initial state), and a reverse reference per outcome: a final-state
/// reference distribution `p1_ref_k` and a reverse channel `R_k` (initial
/// state given final state). Unless explicitly allowed, construction
/// rejects models in which some forward-reachable trajectory carries zero
/// reverse weight, since such a trajectory has infinite entropy production.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackModel {
    p0: ProbVec,
    meas: CondMatrix,
    feedback: Vec<CondMatrix>,
    reverse: Vec<CondMatrix>,
    p1_ref: Vec<ProbVec>,
    /// Cached outcome marginal `M p0`.
    p_k: ProbVec,
    allow_infinite_sigma: bool,
}

impl FeedbackModel {
    /// Builds a model, rejecting infinite entropy production on the
    /// forward support.
    pub fn new(
        p0: ProbVec,
        meas: CondMatrix,
        feedback: Vec<CondMatrix>,
        reverse: Vec<CondMatrix>,
        p1_ref: Vec<ProbVec>,
    ) -> Result<Self> {
        Self::build(p0, meas, feedback, reverse, p1_ref, false)
    }

    /// Builds a model that may contain forward-reachable trajectories with
    /// zero reverse weight; [`sigma`] returns `+inf` for those, and the
    /// exponential-average operations reject the model instead.
    pub fn new_allowing_infinite_sigma(
        p0: ProbVec,
        meas: CondMatrix,
        feedback: Vec<CondMatrix>,
        reverse: Vec<CondMatrix>,
        p1_ref: Vec<ProbVec>,
    ) -> Result<Self> {
        Self::build(p0, meas, feedback, reverse, p1_ref, true)
    }

    /// Builds a model with the Bayesian reverse reference: `p1_ref_k` is
    /// the actual final-state distribution under outcome `k`, and `R_k` is
    /// the Bayes posterior of the initial state given the final state.
    /// Final states unreachable under outcome `k` get a uniform reverse
    /// column; they carry no reverse weight, so the choice is immaterial.
    ///
    /// This construction always satisfies the support condition, and its
    /// entropy production vanishes identically up to roundoff.
    pub fn with_bayesian_reverse(
        p0: ProbVec,
        meas: CondMatrix,
        feedback: Vec<CondMatrix>,
    ) -> Result<Self> {
        let n0 = p0.len();
        check_forward_shapes(&p0, &meas, &feedback)?;
        let n1 = feedback[0].n_out();

        let mut reverse = Vec::with_capacity(feedback.len());
        let mut p1_ref = Vec::with_capacity(feedback.len());
        for f_k in &feedback {
            let p1_k: Vec<f64> = (0..n1)
                .map(|x1| (0..n0).map(|x0| p0.get(x0) * f_k.entry(x1, x0)).sum())
                .collect();
            let columns: Vec<Vec<f64>> = (0..n1)
                .map(|x1| {
                    if p1_k[x1] > 0.0 {
                        (0..n0)
                            .map(|x0| p0.get(x0) * f_k.entry(x1, x0) / p1_k[x1])
                            .collect()
                    } else {
                        vec![1.0 / n0 as f64; n0]
                    }
                })
                .collect();
            reverse.push(CondMatrix::from_columns_normalized(columns));
            p1_ref.push(ProbVec::from_normalized(p1_k));
        }
        Self::build(p0, meas, feedback, reverse, p1_ref, false)
    }

    fn build(
        p0: ProbVec,
        meas: CondMatrix,
        feedback: Vec<CondMatrix>,
        reverse: Vec<CondMatrix>,
        p1_ref: Vec<ProbVec>,
        allow_infinite_sigma: bool,
    ) -> Result<Self> {
        let n0 = p0.len();
        check_forward_shapes(&p0, &meas, &feedback)?;
        let nk = meas.n_out();
        let n1 = feedback[0].n_out();

        if reverse.len() != nk {
            return Err(Error::ShapeMismatch(format!(
                "{} reverse channels for {nk} measurement outcomes",
                reverse.len()
            )));
        }
        for (k, r) in reverse.iter().enumerate() {
            if r.n_out() != n0 || r.n_in() != n1 {
                return Err(Error::ShapeMismatch(format!(
                    "reverse channel {k} is {}x{}, expected {n0}x{n1}",
                    r.n_out(),
                    r.n_in()
                )));
            }
        }
        if p1_ref.len() != nk {
            return Err(Error::ShapeMismatch(format!(
                "{} reference distributions for {nk} measurement outcomes",
                p1_ref.len()
            )));
        }
        for (k, p) in p1_ref.iter().enumerate() {
            if p.len() != n1 {
                return Err(Error::ShapeMismatch(format!(
                    "reference distribution {k} has {} states, expected {n1}",
                    p.len()
                )));
            }
        }

        let p_k = meas
            .apply(&p0)
            .expect("measurement dimensions checked above");
        let model = FeedbackModel {
            p0,
            meas,
            feedback,
            reverse,
            p1_ref,
            p_k,
            allow_infinite_sigma,
        };

        if !allow_infinite_sigma {
            for x0 in 0..n0 {
                for k in 0..nk {
                    for x1 in 0..n1 {
                        if model.forward_prob(x0, k, x1) > 0.0
                            && model.reverse_weight(x0, k, x1) == 0.0
                        {
                            return Err(Error::InfiniteSigma { x0, k, x1 });
                        }
                    }
                }
            }
        }
        Ok(model)
    }

    /// Initial-alphabet size.
    pub fn n0(&self) -> usize {
        self.p0.len()
    }

    /// Number of measurement outcomes.
    pub fn n_outcomes(&self) -> usize {
        self.meas.n_out()
    }

    /// Final-alphabet size.
    pub fn n1(&self) -> usize {
        self.feedback[0].n_out()
    }

    pub fn p0(&self) -> &ProbVec {
        &self.p0
    }

    pub fn meas(&self) -> &CondMatrix {
        &self.meas
    }

    pub fn feedback(&self, k: usize) -> &CondMatrix {
        &self.feedback[k]
    }

    pub fn reverse(&self, k: usize) -> &CondMatrix {
        &self.reverse[k]
    }

    pub fn p1_ref(&self, k: usize) -> &ProbVec {
        &self.p1_ref[k]
    }

    /// The outcome marginal `M p0`.
    pub fn p_k(&self) -> &ProbVec {
        &self.p_k
    }

    /// Forward probability `p0(x0) M(k|x0) F_k(x1|x0)` of a trajectory.
    pub fn forward_prob(&self, x0: usize, k: usize, x1: usize) -> f64 {
        self.p0.get(x0) * self.meas.entry(k, x0) * self.feedback[k].entry(x1, x0)
    }

    fn reverse_weight(&self, x0: usize, k: usize, x1: usize) -> f64 {
        self.p1_ref[k].get(x1) * self.reverse[k].entry(x0, x1)
    }
}

fn check_forward_shapes(p0: &ProbVec, meas: &CondMatrix, feedback: &[CondMatrix]) -> Result<()> {
    let n0 = p0.len();
    if meas.n_in() != n0 {
        return Err(Error::ShapeMismatch(format!(
            "measurement channel expects {} initial states but p0 has {n0}",
            meas.n_in()
        )));
    }
    let nk = meas.n_out();
    if feedback.len() != nk {
        return Err(Error::ShapeMismatch(format!(
            "{} feedback channels for {nk} measurement outcomes",
            feedback.len()
        )));
    }
    let n1 = feedback[0].n_out();
    for (k, f) in feedback.iter().enumerate() {
        if f.n_in() != n0 || f.n_out() != n1 {
            return Err(Error::ShapeMismatch(format!(
                "feedback channel {k} is {}x{}, expected {n1}x{n0}",
                f.n_out(),
                f.n_in()
            )));
        }
    }
    Ok(())
}

/// One forward-reachable trajectory with its weight and pointwise
/// quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x0: usize,
    pub k: usize,
    pub x1: usize,
    /// Forward probability of the trajectory.
    pub prob: f64,
    /// Entropy production; `+inf` when the model allows zero reverse weight
    /// on the forward support.
    pub sigma: f64,
    /// Measurement information of the `(x0, k)` pair.
    pub i_c: f64,
}

/// Entropy production of one trajectory, in nats.
///
/// Errors if the trajectory is not forward-reachable; on a reachable
/// trajectory with zero reverse weight it returns `+inf` when the model
/// was built to allow that, and the named error otherwise.
pub fn sigma(model: &FeedbackModel, x0: usize, k: usize, x1: usize) -> Result<f64> {
    if model.forward_prob(x0, k, x1) == 0.0 {
        return Err(Error::Domain(format!(
            "trajectory (x0={x0}, k={k}, x1={x1}) lies outside the forward support"
        )));
    }
    let rev = model.reverse_weight(x0, k, x1);
    if rev == 0.0 {
        if model.allow_infinite_sigma {
            return Ok(f64::INFINITY);
        }
        return Err(Error::InfiniteSigma { x0, k, x1 });
    }
    // The measurement factor belongs to i_c, not sigma: the forward flow
    // compared against the reverse reference is p0 * F alone.
    let fwd = model.p0().get(x0) * model.feedback(k).entry(x1, x0);
    Ok(fwd.ln() - rev.ln())
}

/// Measurement information `ln[M(k|x0) / p_k(k)]` of an `(x0, k)` pair, in
/// nats. Errors when the pair has zero probability, where the quantity is
/// undefined.
pub fn i_c(model: &FeedbackModel, x0: usize, k: usize) -> Result<f64> {
    let m = model.meas().entry(k, x0);
    if m <= 0.0 {
        return Err(Error::Domain(format!(
            "outcome k={k} has zero probability from state x0={x0}"
        )));
    }
    let pk = model.p_k().get(k);
    if pk <= 0.0 {
        return Err(Error::Domain(format!(
            "outcome k={k} has zero marginal probability"
        )));
    }
    Ok((m / pk).ln())
}

/// Enumerates the forward support in lexicographic `(x0, k, x1)` order.
pub fn trajectories(model: &FeedbackModel) -> Vec<Trajectory> {
    let mut out = Vec::new();
    for x0 in 0..model.n0() {
        for k in 0..model.n_outcomes() {
            for x1 in 0..model.n1() {
                let prob = model.forward_prob(x0, k, x1);
                if prob == 0.0 {
                    continue;
                }
                let s = sigma(model, x0, k, x1).expect("trajectory is on the forward support");
                let ic =
                    i_c(model, x0, k).expect("pair probability is positive on the forward support");
                out.push(Trajectory {
                    x0,
                    k,
                    x1,
                    prob,
                    sigma: s,
                    i_c: ic,
                });
            }
        }
    }
    out
}

/// Exact exponential average `<exp(-sigma - i_c)>` over the forward
/// measure. Equals 1 up to roundoff whenever the reverse reference is
/// carried by the forward support. Rejects models with infinite entropy
/// production on the support, naming the offending trajectory.
pub fn jarzynski_exhaustive(model: &FeedbackModel) -> Result<f64> {
    let mut total = 0.0;
    for t in trajectories(model) {
        if t.sigma.is_infinite() {
            return Err(Error::InfiniteSigma {
                x0: t.x0,
                k: t.k,
                x1: t.x1,
            });
        }
        total += t.prob * (-(t.sigma + t.i_c)).exp();
    }
    Ok(total)
}

/// Exact forward-measure expectations of `sigma`, `i_c`, and their sum.
///
/// `avg_ic` is the mutual information between the initial state and the
/// outcome, so it is non-negative; `avg_sigma_plus_ic` is a relative
/// entropy, so it is non-negative too whenever it is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Averages {
    pub avg_sigma: f64,
    pub avg_ic: f64,
    pub avg_sigma_plus_ic: f64,
}

/// Computes [`Averages`] over the forward support, rejecting models with
/// infinite entropy production there.
pub fn averages(model: &FeedbackModel) -> Result<Averages> {
    let mut avg_sigma = 0.0;
    let mut avg_ic = 0.0;
    for t in trajectories(model) {
        if t.sigma.is_infinite() {
            return Err(Error::InfiniteSigma {
                x0: t.x0,
                k: t.k,
                x1: t.x1,
            });
        }
        avg_sigma += t.prob * t.sigma;
        avg_ic += t.prob * t.i_c;
    }
    Ok(Averages {
        avg_sigma,
        avg_ic,
        avg_sigma_plus_ic: avg_sigma + avg_ic,
    })
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Sample standard deviation divided by `sqrt(samples)`; 0 when only
    /// one sample was drawn.
    pub std_error: f64,
}

/// Trajectories are drawn in fixed-size shards, each from its own RNG
/// stream, so the estimate is bitwise reproducible for a given seed no
/// matter how shards are scheduled across threads.
const SHARD_SIZE: u64 = 16_384;

/// Monte Carlo estimate of `<exp(-sigma - i_c)>` by direct sampling of the
/// forward measure.
pub fn jarzynski_montecarlo(model: &FeedbackModel, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Domain(
            "Monte Carlo needs at least one sample".into(),
        ));
    }

    // Precompute exp(-sigma - i_c) for the whole (small) trajectory space;
    // this also surfaces infinite entropy production before sampling.
    let (n0, nk, n1) = (model.n0(), model.n_outcomes(), model.n1());
    let mut weight = vec![0.0; n0 * nk * n1];
    for t in trajectories(model) {
        if t.sigma.is_infinite() {
            return Err(Error::InfiniteSigma {
                x0: t.x0,
                k: t.k,
                x1: t.x1,
            });
        }
        weight[(t.x0 * nk + t.k) * n1 + t.x1] = (-(t.sigma + t.i_c)).exp();
    }

    let cum_p0 = Cumulative::new(model.p0().as_slice());
    let cum_meas: Vec<Cumulative> = (0..n0)
        .map(|x0| Cumulative::new(&model.meas().column(x0)))
        .collect();
    let cum_feedback: Vec<Vec<Cumulative>> = (0..nk)
        .map(|k| {
            (0..n0)
                .map(|x0| Cumulative::new(&model.feedback(k).column(x0)))
                .collect()
        })
        .collect();

    let n_shards = samples.div_ceil(SHARD_SIZE);
    let partials: Vec<(f64, f64)> = (0..n_shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = stream_rng(seed, shard);
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let mut sum = Kahan::default();
            let mut sum_sq = Kahan::default();
            for _ in 0..count {
                let x0 = cum_p0.sample(&mut rng);
                let k = cum_meas[x0].sample(&mut rng);
                let x1 = cum_feedback[k][x0].sample(&mut rng);
                let w = weight[(x0 * nk + k) * n1 + x1];
                sum.add(w);
                sum_sq.add(w * w);
            }
            (sum.total(), sum_sq.total())
        })
        .collect();

    // Merge in shard order with compensated summation: the result must not
    // depend on which thread finished first.
    let mut sum = Kahan::default();
    let mut sum_sq = Kahan::default();
    for (s, s2) in partials {
        sum.add(s);
        sum_sq.add(s2);
    }
    let n = samples as f64;
    let estimate = sum.total() / n;
    let std_error = if samples > 1 {
        let var = ((sum_sq.total() - n * estimate * estimate) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        estimate,
        std_error,
    })
}

/// Embeds a chain `x2 <- k <- x1` as a feedback process with vanishing
/// entropy production: the chain's initial variable becomes `x0`, its
/// middle kernel the measurement, and outcome `k` drives a feedback channel
/// that ignores its input and emits column `k` of `P(x2|k)`; the reverse
/// reference is Bayesian. The average of `i_c` then equals the mutual
/// information `I(x1:k)` of the chain, while `<sigma> = 0`.
pub fn build_zero_sigma_model(chain: &MarkovChain3) -> FeedbackModel {
    let (n2, nk, n1) = chain.dims();
    let feedback: Vec<CondMatrix> = (0..nk)
        .map(|k| {
            let col = chain.p_x2_given_k().column(k);
            CondMatrix::from_columns_normalized(vec![col; n1])
        })
        .collect();
    debug_assert_eq!(feedback[0].n_out(), n2);
    FeedbackModel::with_bayesian_reverse(
        chain.p_x1().clone(),
        chain.p_k_given_x1().clone(),
        feedback,
    )
    .expect("chain dimensions agree and the Bayesian reverse covers the forward support")
}

/// The gap `<i_c> - iqc` between the average measurement information of a
/// model and the classical-quantum information of the chain it embeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureGap {
    pub avg_ic: f64,
    pub iqc: f64,
    /// `avg_ic - iqc`; strictly positive gaps witness that `<sigma> + iqc`
    /// can be negative while `<sigma + i_c>` stays non-negative.
    pub gap: f64,
}

/// Computes [`ConjectureGap`] for a model and the chain it was built from.
pub fn conjecture_gap(model: &FeedbackModel, chain: &MarkovChain3) -> Result<ConjectureGap> {
    let (n2, nk, n1) = chain.dims();
    if model.n0() != n1 || model.n_outcomes() != nk || model.n1() != n2 {
        return Err(Error::ShapeMismatch(format!(
            "model alphabets ({}, {}, {}) do not embed chain alphabets ({n1}, {nk}, {n2})",
            model.n0(),
            model.n_outcomes(),
            model.n1()
        )));
    }
    let avg = averages(model)?;
    let iqc = info::iqc_classical(chain);
    Ok(ConjectureGap {
        avg_ic: avg.avg_ic,
        iqc,
        gap: avg.avg_ic - iqc,
    })
}

/// Cumulative table for inverse-CDF sampling of a finite distribution.
struct Cumulative {
    cum: Vec<f64>,
    /// Largest index with positive probability, the fallback when roundoff
    /// pushes the final cumulative sum below the drawn uniform.
    last_positive: usize,
}

impl Cumulative {
    fn new(probs: &[f64]) -> Self {
        let mut cum = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            cum.push(acc);
            if p > 0.0 {
                last_positive = i;
            }
        }
        Cumulative { cum, last_positive }
    }

    fn sample<R: rand::Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        // Zero-probability entries repeat the previous cumulative value, so
        // strict `<` can never select one.
        self.cum
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.last_positive)
    }
}

/// Compensated (Kahan) accumulator.
#[derive(Default)]
struct Kahan {
    sum: f64,
    compensation: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum
    }
}
