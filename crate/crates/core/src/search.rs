//! Numerical search for bound violations over the space of chains.
//!
//! Chains are parameterized by unconstrained logits, one per probability
//! entry, decoded column-wise through a max-shifted softmax. That keeps the
//! search space a plain Euclidean vector space, so a derivative-free
//! Nelder-Mead simplex runs on it directly; multistart with per-restart RNG
//! streams makes the whole search deterministic for a given seed even when
//! the restarts run in parallel.
//!
//! [`grid_oracle`] is the independent cross-check: it exhaustively scans
//! chains whose columns lie on a fixed simplex grid, with no optimizer in
//! the loop, so any value it attains is a certificate.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::info::{self, CondMatrix, ProbVec};
use crate::markov::MarkovChain3;
use crate::stream::stream_rng;

/// Search target, always framed as a minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimize `iqc` itself, driving it below the candidate lower bound 0.
    /// The infimum over chains is `-ln(n2)`.
    MinimizeIqc,
    /// Minimize `-(iqc - H(k))`, i.e. maximize the overshoot of the
    /// candidate upper bound `H(k)`.
    MaximizeIqcMinusHk,
}

/// Unconstrained logit parameterization of a chain with fixed alphabet
/// sizes. All logits are finite; column-wise softmax decoding maps any
/// such point to a valid chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    n2: usize,
    nk: usize,
    n1: usize,
    /// Row-major logits for `P(x2|k)`, shape `n2 x nk`.
    logits_x2k: Vec<f64>,
    /// Row-major logits for `P(k|x1)`, shape `nk x n1`.
    logits_kx1: Vec<f64>,
    /// Logits for `P(x1)`.
    logits_x1: Vec<f64>,
}

impl ChainParams {
    pub fn new(
        dims: (usize, usize, usize),
        logits_x2k: Vec<f64>,
        logits_kx1: Vec<f64>,
        logits_x1: Vec<f64>,
    ) -> Result<Self> {
        let (n2, nk, n1) = dims;
        if n2 == 0 || nk == 0 || n1 == 0 {
            return Err(Error::Domain(format!(
                "chain alphabets must be non-empty, got ({n2}, {nk}, {n1})"
            )));
        }
        if logits_x2k.len() != n2 * nk {
            return Err(Error::ShapeMismatch(format!(
                "P(x2|k) logits have length {}, expected {}",
                logits_x2k.len(),
                n2 * nk
            )));
        }
        if logits_kx1.len() != nk * n1 {
            return Err(Error::ShapeMismatch(format!(
                "P(k|x1) logits have length {}, expected {}",
                logits_kx1.len(),
                nk * n1
            )));
        }
        if logits_x1.len() != n1 {
            return Err(Error::ShapeMismatch(format!(
                "P(x1) logits have length {}, expected {n1}",
                logits_x1.len()
            )));
        }
        let finite = logits_x2k
            .iter()
            .chain(&logits_kx1)
            .chain(&logits_x1)
            .all(|l| l.is_finite());
        if !finite {
            return Err(Error::Domain("logits must be finite".into()));
        }
        Ok(ChainParams {
            n2,
            nk,
            n1,
            logits_x2k,
            logits_kx1,
            logits_x1,
        })
    }

    /// Splits one flat vector (layout: `P(x2|k)` logits, then `P(k|x1)`,
    /// then `P(x1)`) into a parameter point.
    pub fn from_flat(dims: (usize, usize, usize), flat: &[f64]) -> Result<Self> {
        let (n2, nk, n1) = dims;
        let want = n2 * nk + nk * n1 + n1;
        if flat.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "flat parameter vector has length {}, expected {want}",
                flat.len()
            )));
        }
        let (a, rest) = flat.split_at(n2 * nk);
        let (b, c) = rest.split_at(nk * n1);
        Self::new(dims, a.to_vec(), b.to_vec(), c.to_vec())
    }

    /// Logits of an existing chain: entry-wise `ln p`. Requires strictly
    /// positive entries; decoding the result reproduces the chain up to
    /// roundoff.
    pub fn from_chain(chain: &MarkovChain3) -> Result<Self> {
        let (n2, nk, n1) = chain.dims();
        let ln_all =
            |rows: Vec<Vec<f64>>| -> Vec<f64> { rows.into_iter().flatten().map(f64::ln).collect() };
        let logits_x2k = ln_all(chain.p_x2_given_k().rows());
        let logits_kx1 = ln_all(chain.p_k_given_x1().rows());
        let logits_x1: Vec<f64> = chain.p_x1().iter().map(f64::ln).collect();
        Self::new((n2, nk, n1), logits_x2k, logits_kx1, logits_x1).map_err(|e| match e {
            Error::Domain(_) => {
                Error::Domain("chain has zero entries, which have no finite logit".into())
            }
            other => other,
        })
    }

    /// Alphabet sizes `(n2, nk, n1)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n2, self.nk, self.n1)
    }

    /// Total number of free coordinates.
    pub fn flat_len(&self) -> usize {
        flat_len((self.n2, self.nk, self.n1))
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.flat_len());
        flat.extend_from_slice(&self.logits_x2k);
        flat.extend_from_slice(&self.logits_kx1);
        flat.extend_from_slice(&self.logits_x1);
        flat
    }

    /// Softmax-decodes the logits into a chain. Total: every parameter
    /// point maps to a chain satisfying all constructor invariants.
    pub fn decode(&self) -> MarkovChain3 {
        decode_flat((self.n2, self.nk, self.n1), &self.to_flat())
    }
}

fn flat_len(dims: (usize, usize, usize)) -> usize {
    let (n2, nk, n1) = dims;
    n2 * nk + nk * n1 + n1
}

/// Max-shifted softmax of a logit slice.
fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Decodes a flat logit vector (trusted to have the right length and finite
/// entries, as produced by the optimizer) into a chain.
fn decode_flat(dims: (usize, usize, usize), flat: &[f64]) -> MarkovChain3 {
    let (n2, nk, n1) = dims;
    debug_assert_eq!(flat.len(), flat_len(dims));
    let (l_x2k, rest) = flat.split_at(n2 * nk);
    let (l_kx1, l_x1) = rest.split_at(nk * n1);

    let column_softmax = |logits: &[f64], n_out: usize, n_in: usize| -> CondMatrix {
        let columns: Vec<Vec<f64>> = (0..n_in)
            .map(|j| {
                let col: Vec<f64> = (0..n_out).map(|i| logits[i * n_in + j]).collect();
                softmax(&col)
            })
            .collect();
        CondMatrix::from_columns_normalized(columns)
    };

    let p_x2_given_k = column_softmax(l_x2k, n2, nk);
    let p_k_given_x1 = column_softmax(l_kx1, nk, n1);
    let p_x1 = ProbVec::from_normalized(softmax(l_x1));
    MarkovChain3::new(p_x2_given_k, p_k_given_x1, p_x1)
        .expect("softmax decoding always produces matching dimensions")
}

/// The quantity a search minimizes, evaluated on a decoded chain.
pub fn objective_value(chain: &MarkovChain3, objective: Objective) -> f64 {
    match objective {
        Objective::MinimizeIqc => info::iqc_classical(chain),
        Objective::MaximizeIqcMinusHk => {
            let h_k = info::shannon_entropy(&chain.marginal_k());
            -(info::iqc_classical(chain) - h_k)
        }
    }
}

/// Outcome of a multistart search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Decoded chain at the best parameter point found.
    pub best_chain: MarkovChain3,
    /// Objective value at `best_chain` (re-evaluated on the decoded chain,
    /// so it is consistent with [`objective_value`] by construction).
    pub best_value: f64,
    pub objective: Objective,
    pub restarts_run: usize,
    /// Total objective evaluations across all restarts.
    pub evaluations: u64,
    pub seed: u64,
    /// Whether at least one restart's simplex collapsed below the value
    /// spread threshold before exhausting its budget.
    pub converged: bool,
}

/// Minimum evaluations granted to each restart regardless of the total
/// budget split.
const MIN_RESTART_BUDGET: u64 = 200;

/// Simplex value spread below which a restart counts as converged.
const SPREAD_TOLERANCE: f64 = 1e-10;

/// Multistart Nelder-Mead minimization of `objective` over all chains with
/// the given alphabet sizes.
///
/// Each restart draws its initial point from its own deterministic RNG
/// stream and receives `max(budget / restarts, 200)` objective evaluations.
/// Restarts are independent, so the result is bitwise reproducible for a
/// given `(dims, objective, restarts, seed, budget)` regardless of how the
/// restarts are scheduled across threads. Ties between restarts break
/// toward the lower restart index.
pub fn search(
    dims: (usize, usize, usize),
    objective: Objective,
    restarts: usize,
    seed: u64,
    budget: u64,
) -> Result<SearchResult> {
    let (n2, nk, n1) = dims;
    if n2 == 0 || nk == 0 || n1 == 0 {
        return Err(Error::Domain(format!(
            "chain alphabets must be non-empty, got ({n2}, {nk}, {n1})"
        )));
    }
    if restarts == 0 {
        return Err(Error::Domain("search needs at least one restart".into()));
    }
    if budget == 0 {
        return Err(Error::Domain("search needs a positive budget".into()));
    }
    let per_restart = (budget / restarts as u64).max(MIN_RESTART_BUDGET);
    let dim = flat_len(dims);

    let outcomes: Vec<NmOutcome> = (0..restarts)
        .into_par_iter()
        .map(|index| {
            let mut rng = stream_rng(seed, index as u64);
            let x0: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            nelder_mead(
                |x| objective_value(&decode_flat(dims, x), objective),
                x0,
                per_restart,
            )
        })
        .collect();

    let mut evaluations = 0;
    let mut converged = false;
    let mut best: Option<&NmOutcome> = None;
    for outcome in &outcomes {
        evaluations += outcome.evaluations;
        converged |= outcome.converged;
        // Strict comparison keeps the earliest restart on ties.
        if best.is_none_or(|b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart ran");

    let best_chain = decode_flat(dims, &best.x);
    let best_value = objective_value(&best_chain, objective);
    Ok(SearchResult {
        best_chain,
        best_value,
        objective,
        restarts_run: restarts,
        evaluations,
        seed,
        converged,
    })
}

struct NmOutcome {
    x: Vec<f64>,
    value: f64,
    evaluations: u64,
    converged: bool,
}

/// Plain Nelder-Mead with the standard coefficients (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2) and an absolute initial step
/// of 1 per coordinate. Stops when the simplex value spread drops below
/// [`SPREAD_TOLERANCE`] or the evaluation budget runs out.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: Vec<f64>, max_evals: u64) -> NmOutcome {
    const REFLECTION: f64 = 1.0;
    const EXPANSION: f64 = 2.0;
    const CONTRACTION: f64 = 0.5;
    const SHRINK: f64 = 0.5;
    const INITIAL_STEP: f64 = 1.0;

    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.clone());
    for i in 0..n {
        let mut v = x0.clone();
        v[i] += INITIAL_STEP;
        simplex.push(v);
    }
    let mut evaluations = 0u64;
    let mut values: Vec<f64> = simplex
        .iter()
        .map(|v| {
            evaluations += 1;
            f(v)
        })
        .collect();
    let mut converged = false;

    loop {
        // Sort ascending by value; stable, so ties keep insertion order and
        // the whole trajectory is deterministic.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n] - values[0] < SPREAD_TOLERANCE {
            converged = true;
            break;
        }
        if evaluations >= max_evals {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|v| v[d]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
            from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
        };

        let reflected = along(&centroid, &worst, -REFLECTION);
        evaluations += 1;
        let f_reflected = f(&reflected);

        if f_reflected < values[0] {
            let expanded = along(&centroid, &reflected, EXPANSION);
            evaluations += 1;
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
        } else if f_reflected < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_reflected;
        } else {
            // Contract toward the better of the reflected and worst points.
            let (target, f_target) = if f_reflected < values[n] {
                (reflected, f_reflected)
            } else {
                (worst, values[n])
            };
            let contracted = along(&centroid, &target, CONTRACTION);
            evaluations += 1;
            let f_contracted = f(&contracted);
            if f_contracted < f_target {
                simplex[n] = contracted;
                values[n] = f_contracted;
            } else {
                for i in 1..=n {
                    simplex[i] = along(&simplex[0], &simplex[i], SHRINK);
                    evaluations += 1;
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    NmOutcome {
        x: simplex[0].clone(),
        value: values[0],
        evaluations,
        converged,
    }
}

/// Hard cap on the number of grid points [`grid_oracle`] will scan.
pub const MAX_GRID_POINTS: u64 = 100_000_000;

/// Cap on the number of distinct grid columns per alphabet, so candidate
/// materialization cannot exhaust memory before the point guard trips.
const MAX_GRID_COLUMNS: u128 = 10_000_000;

/// Brute-force minimum of `objective` over all chains whose columns (and
/// initial distribution) have entries on the grid `{0, 1/s, ..., s/s}` with
/// `s = steps_per_axis`.
///
/// No optimizer is involved, so the returned value is an independently
/// certified attainable value; it upper-bounds the true minimum, which it
/// reaches whenever the minimizer lies on the grid.
pub fn grid_oracle(
    dims: (usize, usize, usize),
    objective: Objective,
    steps_per_axis: usize,
) -> Result<f64> {
    let (n2, nk, n1) = dims;
    if n2 == 0 || nk == 0 || n1 == 0 {
        return Err(Error::Domain(format!(
            "chain alphabets must be non-empty, got ({n2}, {nk}, {n1})"
        )));
    }
    if steps_per_axis == 0 {
        return Err(Error::Domain(
            "grid needs at least one step per axis".into(),
        ));
    }

    let c2 = count_compositions(steps_per_axis, n2)?;
    let ck = count_compositions(steps_per_axis, nk)?;
    let c1 = count_compositions(steps_per_axis, n1)?;
    let total = checked_grid_size(&[(c2, nk as u32), (ck, n1 as u32), (c1, 1)])?;

    let cols2 = simplex_grid(steps_per_axis, n2);
    let colsk = simplex_grid(steps_per_axis, nk);
    let cols1 = simplex_grid(steps_per_axis, n1);

    // Mixed-radix layout of a point index: one digit per column of
    // P(x2|k), then per column of P(k|x1), then one for P(x1).
    let radices: Vec<u64> = std::iter::repeat_n(c2 as u64, nk)
        .chain(std::iter::repeat_n(ck as u64, n1))
        .chain(std::iter::once(c1 as u64))
        .collect();

    let evaluate = |index: u64| -> f64 {
        let mut digits = Vec::with_capacity(radices.len());
        let mut rest = index;
        for &r in &radices {
            digits.push((rest % r) as usize);
            rest /= r;
        }
        let x2k_cols: Vec<Vec<f64>> = (0..nk).map(|k| cols2[digits[k]].clone()).collect();
        let kx1_cols: Vec<Vec<f64>> = (0..n1).map(|j| colsk[digits[nk + j]].clone()).collect();
        let p_x1 = cols1[digits[nk + n1]].clone();

        let chain = MarkovChain3::new(
            CondMatrix::from_columns_normalized(x2k_cols),
            CondMatrix::from_columns_normalized(kx1_cols),
            ProbVec::from_normalized(p_x1),
        )
        .expect("grid columns have matching dimensions");
        objective_value(&chain, objective)
    };

    // f64::min is associative and commutative, so the parallel reduction is
    // deterministic regardless of chunking.
    let best = (0..total)
        .into_par_iter()
        .map(evaluate)
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Number of compositions of `steps` into `parts` non-negative integers:
/// `C(steps + parts - 1, parts - 1)`.
fn count_compositions(steps: usize, parts: usize) -> Result<u128> {
    let n = (steps + parts - 1) as u128;
    let k = (parts - 1) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul(n - i)
            .ok_or_else(|| Error::ResourceLimit("grid column count overflows".into()))?
            / (i + 1);
    }
    if acc > MAX_GRID_COLUMNS {
        return Err(Error::ResourceLimit(format!(
            "{acc} distinct grid columns per alphabet exceeds the cap of {MAX_GRID_COLUMNS}; \
             reduce steps_per_axis or the alphabet sizes"
        )));
    }
    Ok(acc)
}

fn checked_grid_size(counts: &[(u128, u32)]) -> Result<u64> {
    let mut total: u128 = 1;
    for &(count, power) in counts {
        for _ in 0..power {
            total = total
                .checked_mul(count)
                .ok_or_else(|| Error::ResourceLimit("grid size overflows".into()))?;
            if total > MAX_GRID_POINTS as u128 {
                return Err(Error::ResourceLimit(format!(
                    "grid has more than {MAX_GRID_POINTS} points; \
                     reduce steps_per_axis or the alphabet sizes"
                )));
            }
        }
    }
    Ok(total as u64)
}

/// All distributions over `parts` outcomes with entries that are multiples
/// of `1/steps`, in lexicographic order of their integer compositions.
fn simplex_grid(steps: usize, parts: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; parts];
    fill_compositions(steps, 0, &mut current, &mut out);
    out.iter()
        .map(|comp| comp.iter().map(|&c| c as f64 / steps as f64).collect())
        .collect()
}

fn fill_compositions(
    remaining: usize,
    part: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if part == current.len() - 1 {
        current[part] = remaining;
        out.push(current.clone());
        return;
    }
    for take in 0..=remaining {
        current[part] = take;
        fill_compositions(remaining - take, part + 1, current, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn softmax_decoding_is_normalized_and_monotone() {
        let p = softmax(&[0.0, 0.0, 0.0]);
        for pi in &p {
            assert_abs_diff_eq!(*pi, 1.0 / 3.0, epsilon = 1e-15);
        }
        let q = softmax(&[1000.0, 0.0]);
        assert!(q[0] > 0.999_999);
        assert_abs_diff_eq!(q.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn decode_produces_valid_chains() {
        let params = ChainParams::new(
            (2, 2, 2),
            vec![3.0, -1.0, 0.5, 2.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.2, -0.3],
        )
        .unwrap();
        let chain = params.decode();
        assert_eq!(chain.dims(), (2, 2, 2));
        assert_abs_diff_eq!(chain.p_x1().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn params_reject_bad_shapes_and_values() {
        assert!(ChainParams::new((0, 1, 1), vec![], vec![], vec![0.0]).is_err());
        assert!(ChainParams::new((2, 2, 2), vec![0.0; 3], vec![0.0; 4], vec![0.0; 2]).is_err());
        assert!(ChainParams::new(
            (2, 2, 2),
            vec![f64::INFINITY, 0.0, 0.0, 0.0],
            vec![0.0; 4],
            vec![0.0; 2]
        )
        .is_err());
        assert!(ChainParams::from_flat((2, 2, 2), &[0.0; 9]).is_err());
        assert!(ChainParams::from_flat((2, 2, 2), &[0.0; 10]).is_ok());
    }

    #[test]
    fn encode_decode_round_trips_interior_chains() {
        use crate::markov::random_chain;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let chain = random_chain((3, 2, 4), &mut rng);
            let params = ChainParams::from_chain(&chain).unwrap();
            let back = params.decode();
            for (row_a, row_b) in chain
                .p_x2_given_k()
                .rows()
                .iter()
                .zip(back.p_x2_given_k().rows())
            {
                for (a, b) in row_a.iter().zip(row_b) {
                    assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
                }
            }
            for (a, b) in chain.p_x1().iter().zip(back.p_x1().iter()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn from_chain_rejects_zero_entries() {
        assert!(ChainParams::from_chain(&crate::markov::example2()).is_err());
    }

    #[test]
    fn objective_values_on_fixtures() {
        assert_eq!(
            objective_value(&crate::markov::example1(), Objective::MinimizeIqc),
            -LN_2
        );
        // example2: iqc - H(k) = ln 2 - 0, negated for minimization.
        assert_eq!(
            objective_value(&crate::markov::example2(), Objective::MaximizeIqcMinusHk),
            -LN_2
        );
    }

    #[test]
    fn nelder_mead_minimizes_a_quadratic() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 1.5) * (v - 1.5)).sum::<f64>();
        let outcome = nelder_mead(f, vec![5.0, -3.0, 0.0], 2000);
        assert!(outcome.converged);
        assert!(outcome.value < 1e-8);
        for v in &outcome.x {
            assert_abs_diff_eq!(*v, 1.5, epsilon = 1e-3);
        }
        assert!(outcome.evaluations <= 2000 + 4);
    }

    #[test]
    fn search_is_deterministic_and_respects_the_floor() {
        let a = search((2, 2, 2), Objective::MinimizeIqc, 4, 9, 2000).unwrap();
        let b = search((2, 2, 2), Objective::MinimizeIqc, 4, 9, 2000).unwrap();
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
        assert_eq!(
            a.best_chain.p_x1().as_slice(),
            b.best_chain.p_x1().as_slice()
        );
        // Nothing can go below the theoretical floor -ln(n2).
        assert!(a.best_value >= -(2.0f64).ln() - 1e-9);
        // The reported value is the objective at the reported chain.
        assert_eq!(
            a.best_value,
            objective_value(&a.best_chain, Objective::MinimizeIqc)
        );
    }

    #[test]
    fn search_on_trivial_alphabets_returns_zero() {
        let r = search((1, 1, 1), Objective::MinimizeIqc, 2, 0, 500).unwrap();
        assert_eq!(r.best_value, 0.0);
        let r = search((1, 1, 1), Objective::MaximizeIqcMinusHk, 2, 0, 500).unwrap();
        assert_eq!(r.best_value, 0.0);
    }

    #[test]
    fn search_validates_arguments() {
        assert!(search((0, 2, 2), Objective::MinimizeIqc, 1, 0, 100).is_err());
        assert!(search((2, 2, 2), Objective::MinimizeIqc, 0, 0, 100).is_err());
        assert!(search((2, 2, 2), Objective::MinimizeIqc, 1, 0, 0).is_err());
    }

    #[test]
    fn grid_oracle_certifies_both_fixture_values() {
        // At 10 steps the grid contains the fixture chains' columns, so the
        // oracle attains -ln 2 for both objectives.
        let min_iqc = grid_oracle((2, 2, 2), Objective::MinimizeIqc, 10).unwrap();
        assert_eq!(min_iqc, -LN_2);
        let max_gap = grid_oracle((2, 2, 2), Objective::MaximizeIqcMinusHk, 10).unwrap();
        assert_eq!(max_gap, -LN_2);
    }

    #[test]
    fn grid_oracle_at_one_step_only_sees_vertex_chains() {
        // With a single step every column is a point mass, so iqc is 0 - 0
        // everywhere and no violation is visible.
        let v = grid_oracle((2, 2, 2), Objective::MinimizeIqc, 1).unwrap();
        assert_eq!(v, 0.0);
        // Even steps put the uniform pair on the grid and the violation
        // reappears.
        let v = grid_oracle((2, 2, 2), Objective::MinimizeIqc, 2).unwrap();
        assert_eq!(v, -LN_2);
    }

    #[test]
    fn grid_oracle_enforces_the_point_guard() {
        assert!(matches!(
            grid_oracle((4, 4, 4), Objective::MinimizeIqc, 50),
            Err(Error::ResourceLimit(_))
        ));
        assert!(grid_oracle((2, 2, 2), Objective::MinimizeIqc, 0).is_err());
    }

    #[test]
    fn composition_counts_match_enumeration() {
        for steps in 1..=6 {
            for parts in 1..=4 {
                let count = count_compositions(steps, parts).unwrap();
                let grid = simplex_grid(steps, parts);
                assert_eq!(grid.len() as u128, count);
                for point in &grid {
                    assert_abs_diff_eq!(point.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
                }
            }
        }
    }
}
