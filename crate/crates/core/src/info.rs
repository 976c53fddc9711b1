//! Entropy-style quantities over finite distributions and density matrices.
//!
//! Everything here is reported in nats. The zero-probability convention
//! `0 ln 0 = 0` is applied by explicit branch, never by relying on IEEE
//! `0 * -inf` behaviour (which would produce NaN).
//!
//! The types in this module validate on construction: once a [`ProbVec`],
//! [`CondMatrix`], [`DensityMatrix`], or [`Joint2`] exists, its invariants
//! hold and downstream operations do not re-check them.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::markov::MarkovChain3;

/// Complex scalar used for density-matrix entries.
pub type Complex64 = Complex<f64>;

/// Slack allowed on individual probability entries before construction fails.
///
/// Entries within the slack of the `[0, 1]` interval are clamped onto it, so
/// stored probabilities are always exactly in range.
pub const PROB_ENTRY_SLACK: f64 = 1e-12;

/// Validation tolerances used by the domain-type constructors.
///
/// The defaults are deliberate: probability sums get a looser `1e-9` because
/// they accumulate roundoff from user-supplied data, while matrix-level
/// checks (Hermiticity, trace, eigenvalue range) use `1e-10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of probability sums (vectors, matrix columns,
    /// joint distributions) from 1.
    pub sum: f64,
    /// Allowed deviation for Hermiticity, trace, and eigenvalue-range checks.
    pub matrix: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sum: 1e-9,
            matrix: 1e-10,
        }
    }
}

/// `-x ln x` with the `0 ln 0 = 0` convention.
#[inline]
fn neg_x_ln_x(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Shannon entropy of a raw probability slice, in nats.
///
/// Shared kernel for every entropy in this module; callers guarantee the
/// slice is a (sub)distribution.
fn entropy_of(probs: &[f64]) -> f64 {
    // Seeding with +0.0 (rather than `sum()`, which seeds with -0.0) keeps
    // deterministic distributions at exactly +0.0: `neg_x_ln_x(1) = -0.0`,
    // and `0.0 + -0.0 = 0.0`.
    probs
        .iter()
        .copied()
        .map(neg_x_ln_x)
        .fold(0.0, |acc, term| acc + term)
}

/// A probability distribution over a finite alphabet.
///
/// Entries are clamped onto `[0, 1]` at construction and sum to 1 within the
/// configured tolerance. The alphabet is never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVec {
    probs: Vec<f64>,
}

impl ProbVec {
    /// Validates and builds a distribution with default [`Tolerances`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerances(probs, &Tolerances::default())
    }

    /// Validates and builds a distribution with caller-supplied tolerances.
    pub fn with_tolerances(mut probs: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty {
                what: "probability vector",
            });
        }
        for (index, p) in probs.iter_mut().enumerate() {
            if !(*p >= -PROB_ENTRY_SLACK && *p <= 1.0 + PROB_ENTRY_SLACK) {
                return Err(Error::EntryOutOfRange {
                    what: "probability vector".into(),
                    index,
                    value: *p,
                });
            }
            *p = p.clamp(0.0, 1.0);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol.sum {
            return Err(Error::NotNormalized {
                what: "probability vector".into(),
                sum,
            });
        }
        Ok(ProbVec { probs })
    }

    /// Builds a distribution from entries already normalized by arithmetic
    /// (marginalization, mixtures, softmax). Entries are clamped onto
    /// `[0, 1]`; the sum is trusted up to the inputs' own roundoff, so this
    /// stays crate-internal.
    pub(crate) fn from_normalized(mut probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        for p in probs.iter_mut() {
            *p = p.clamp(0.0, 1.0);
        }
        ProbVec { probs }
    }

    /// The uniform distribution over `n` outcomes.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "a distribution needs at least one outcome");
        ProbVec {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Alphabet size.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Always false; kept for interface completeness.
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of outcome `i`.
    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.probs.iter().copied()
    }
}

/// A column-stochastic conditional-probability matrix.
///
/// Entry `(i, j)` is `P(out = i | in = j)`: every column is a distribution
/// over the output alphabet. Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CondMatrix {
    n_out: usize,
    n_in: usize,
    entries: Vec<f64>,
}

impl CondMatrix {
    /// Validates and builds a matrix from its rows with default tolerances.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerances(rows, &Tolerances::default())
    }

    /// Validates and builds a matrix from its rows.
    pub fn with_tolerances(rows: Vec<Vec<f64>>, tol: &Tolerances) -> Result<Self> {
        let n_out = rows.len();
        if n_out == 0 {
            return Err(Error::Empty {
                what: "conditional matrix",
            });
        }
        let n_in = rows[0].len();
        if n_in == 0 {
            return Err(Error::Empty {
                what: "conditional matrix",
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_in {
                return Err(Error::ShapeMismatch(format!(
                    "conditional matrix row {i} has {} entries, expected {n_in}",
                    row.len()
                )));
            }
        }
        let mut entries = Vec::with_capacity(n_out * n_in);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, p) in row.into_iter().enumerate() {
                if !(-PROB_ENTRY_SLACK..=1.0 + PROB_ENTRY_SLACK).contains(&p) {
                    return Err(Error::EntryOutOfRange {
                        what: format!("conditional matrix row {i}"),
                        index: j,
                        value: p,
                    });
                }
                entries.push(p.clamp(0.0, 1.0));
            }
        }
        for j in 0..n_in {
            let sum: f64 = (0..n_out).map(|i| entries[i * n_in + j]).sum();
            if (sum - 1.0).abs() > tol.sum {
                return Err(Error::NotNormalized {
                    what: format!("conditional matrix column {j}"),
                    sum,
                });
            }
        }
        Ok(CondMatrix {
            n_out,
            n_in,
            entries,
        })
    }

    /// Builds a matrix from columns already normalized by arithmetic.
    pub(crate) fn from_columns_normalized(columns: Vec<Vec<f64>>) -> Self {
        let n_in = columns.len();
        debug_assert!(n_in >= 1);
        let n_out = columns[0].len();
        debug_assert!(columns.iter().all(|c| c.len() == n_out));
        let mut entries = vec![0.0; n_out * n_in];
        for (j, col) in columns.iter().enumerate() {
            debug_assert!((col.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            for (i, &p) in col.iter().enumerate() {
                entries[i * n_in + j] = p.clamp(0.0, 1.0);
            }
        }
        CondMatrix {
            n_out,
            n_in,
            entries,
        }
    }

    /// The identity channel on `n` states.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "a channel needs at least one state");
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        CondMatrix {
            n_out: n,
            n_in: n,
            entries,
        }
    }

    /// Output alphabet size.
    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// Input alphabet size.
    pub fn n_in(&self) -> usize {
        self.n_in
    }

    /// `P(out | in)`.
    pub fn entry(&self, out: usize, input: usize) -> f64 {
        assert!(out < self.n_out && input < self.n_in);
        self.entries[out * self.n_in + input]
    }

    /// The conditional distribution for input `j`, as a plain vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        assert!(j < self.n_in);
        (0..self.n_out)
            .map(|i| self.entries[i * self.n_in + j])
            .collect()
    }

    /// Rows of the matrix, e.g. for serialization.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_out)
            .map(|i| self.entries[i * self.n_in..(i + 1) * self.n_in].to_vec())
            .collect()
    }

    /// Pushes a distribution through the channel: `out_i = sum_j M_ij p_j`.
    ///
    /// The result inherits the operands' normalization error, so it is not
    /// re-validated against constructor tolerances.
    pub fn apply(&self, p: &ProbVec) -> Result<ProbVec> {
        if p.len() != self.n_in {
            return Err(Error::ShapeMismatch(format!(
                "channel expects {} input states but the distribution has {}",
                self.n_in,
                p.len()
            )));
        }
        let out = (0..self.n_out)
            .map(|i| {
                (0..self.n_in)
                    .map(|j| self.entries[i * self.n_in + j] * p.get(j))
                    .sum()
            })
            .collect();
        Ok(ProbVec::from_normalized(out))
    }
}

/// A Hermitian, positive-semidefinite, unit-trace complex matrix.
///
/// The spectrum is computed once at construction with a Hermitian
/// eigensolver. Eigenvalues within `Tolerances::matrix` below 0 or above 1
/// are clamped onto `[0, 1]`; larger excursions are rejected, since they
/// indicate the input was not a state to begin with.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    /// Validates and builds a state with default [`Tolerances`].
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerances(mat, &Tolerances::default())
    }

    /// Validates and builds a state with caller-supplied tolerances.
    pub fn with_tolerances(mat: DMatrix<Complex64>, tol: &Tolerances) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let d = mat.nrows();
        if d == 0 {
            return Err(Error::Empty {
                what: "density matrix",
            });
        }
        let mut max_dev: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                let dev = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > tol.matrix {
            return Err(Error::NotHermitian { max_dev });
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > tol.matrix || trace.im.abs() > tol.matrix {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        // Symmetrize before the eigensolve so tolerated roundoff-level
        // asymmetry cannot leak complex parts into the spectrum.
        let herm = (&mat + mat.adjoint()).map(|z| z * 0.5);
        let eigen = nalgebra::SymmetricEigen::new(herm);
        let mut eigenvalues: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
        for lambda in eigenvalues.iter_mut() {
            if !(*lambda >= -tol.matrix && *lambda <= 1.0 + tol.matrix) {
                return Err(Error::EigenvalueOutOfRange { value: *lambda });
            }
            *lambda = lambda.clamp(0.0, 1.0);
        }
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
        Ok(DensityMatrix { mat, eigenvalues })
    }

    /// Embeds a classical distribution as the diagonal state `diag(p)`.
    pub fn from_diagonal(p: &ProbVec) -> Result<Self> {
        Self::from_diagonal_padded(p, p.len())
    }

    /// Embeds a classical distribution as `diag(p)` zero-padded to `dim`.
    ///
    /// Goes through the ordinary constructor, eigensolve included, so the
    /// quantum route stays a genuinely independent computation.
    pub fn from_diagonal_padded(p: &ProbVec, dim: usize) -> Result<Self> {
        if dim < p.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot embed a {}-outcome distribution in dimension {dim}",
                p.len()
            )));
        }
        let mut mat = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (i, pi) in p.iter().enumerate() {
            mat[(i, i)] = Complex64::new(pi, 0.0);
        }
        Self::new(mat)
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// The clamped spectrum, sorted descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }
}

/// Measurement-outcome weights paired with one conditional state each.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    weights: ProbVec,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(weights: ProbVec, states: Vec<DensityMatrix>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights paired with {} states",
                weights.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::ShapeMismatch(format!(
                "ensemble states mix dimensions {dim} and {}",
                bad.dim()
            )));
        }
        Ok(Ensemble { weights, states })
    }

    pub fn weights(&self) -> &ProbVec {
        &self.weights
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Common Hilbert-space dimension of the member states.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }
}

/// A joint distribution over two finite variables, stored `a`-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint2 {
    n_a: usize,
    n_b: usize,
    probs: Vec<f64>,
}

impl Joint2 {
    /// Validates and builds a joint distribution from rows indexed by `a`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_a = rows.len();
        if n_a == 0 {
            return Err(Error::Empty {
                what: "joint distribution",
            });
        }
        let n_b = rows[0].len();
        if n_b == 0 {
            return Err(Error::Empty {
                what: "joint distribution",
            });
        }
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n_b {
                return Err(Error::ShapeMismatch(format!(
                    "joint distribution row {a} has {} entries, expected {n_b}",
                    row.len()
                )));
            }
        }
        let mut probs = Vec::with_capacity(n_a * n_b);
        for (a, row) in rows.into_iter().enumerate() {
            for (b, p) in row.into_iter().enumerate() {
                if !(-PROB_ENTRY_SLACK..=1.0 + PROB_ENTRY_SLACK).contains(&p) {
                    return Err(Error::EntryOutOfRange {
                        what: format!("joint distribution row {a}"),
                        index: b,
                        value: p,
                    });
                }
                probs.push(p.clamp(0.0, 1.0));
            }
        }
        let total: f64 = probs.iter().sum();
        let tol = Tolerances::default();
        if (total - 1.0).abs() > tol.sum {
            return Err(Error::NotNormalized {
                what: "joint distribution".into(),
                sum: total,
            });
        }
        Ok(Joint2 { n_a, n_b, probs })
    }

    /// Builds a joint distribution from entries already normalized by
    /// arithmetic (marginalization of a validated larger joint).
    pub(crate) fn from_probs_normalized(n_a: usize, n_b: usize, mut probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), n_a * n_b);
        for p in probs.iter_mut() {
            *p = p.clamp(0.0, 1.0);
        }
        Joint2 { n_a, n_b, probs }
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// `P(a, b)`.
    pub fn prob(&self, a: usize, b: usize) -> f64 {
        assert!(a < self.n_a && b < self.n_b);
        self.probs[a * self.n_b + b]
    }

    /// Marginal over the first variable, as a plain vector.
    pub fn marginal_a(&self) -> Vec<f64> {
        (0..self.n_a)
            .map(|a| self.probs[a * self.n_b..(a + 1) * self.n_b].iter().sum())
            .collect()
    }

    /// Marginal over the second variable, as a plain vector.
    pub fn marginal_b(&self) -> Vec<f64> {
        (0..self.n_b)
            .map(|b| (0..self.n_a).map(|a| self.probs[a * self.n_b + b]).sum())
            .collect()
    }
}

/// Shannon entropy `H(p) = -sum_i p_i ln p_i`, in nats.
pub fn shannon_entropy(p: &ProbVec) -> f64 {
    entropy_of(p.as_slice())
}

/// Binary entropy `h(a) = -a ln a - (1-a) ln(1-a)`, in nats.
///
/// Errors if `alpha` lies outside `[0, 1]` (NaN included).
pub fn binary_entropy(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!(
            "binary entropy argument {alpha} lies outside [0, 1]"
        )));
    }
    Ok(neg_x_ln_x(alpha) + neg_x_ln_x(1.0 - alpha))
}

/// Von Neumann entropy `S(rho) = -sum_i lambda_i ln lambda_i` over the
/// spectrum, in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(rho.eigenvalues())
}

/// Conditional entropy `H(out | in) = sum_j w_j H(column j)`, in nats.
pub fn conditional_entropy(cond: &CondMatrix, weights: &ProbVec) -> Result<f64> {
    if weights.len() != cond.n_in() {
        return Err(Error::ShapeMismatch(format!(
            "conditional matrix has {} inputs but the weight vector has {}",
            cond.n_in(),
            weights.len()
        )));
    }
    Ok((0..cond.n_in())
        .map(|j| weights.get(j) * entropy_of(&cond.column(j)))
        .fold(0.0, |acc, term| acc + term))
}

/// Mutual information `I(A:B) = H(A) + H(B) - H(A,B)`, in nats.
pub fn mutual_information(joint: &Joint2) -> f64 {
    entropy_of(&joint.marginal_a()) + entropy_of(&joint.marginal_b()) - entropy_of(&joint.probs)
}

/// Classical-quantum information `S(rho1) - sum_k p_k S(rho2_k)`, in nats:
/// the entropy of the pre-measurement state minus the average entropy of the
/// post-measurement ensemble. Unlike a mutual information it can be negative
/// or exceed the entropy of the outcome distribution.
pub fn iqc_quantum(rho1: &DensityMatrix, ensemble: &Ensemble) -> Result<f64> {
    if rho1.dim() != ensemble.dim() {
        return Err(Error::ShapeMismatch(format!(
            "pre-measurement state has dimension {} but the ensemble has {}",
            rho1.dim(),
            ensemble.dim()
        )));
    }
    let avg: f64 = ensemble
        .weights()
        .iter()
        .zip(ensemble.states())
        .map(|(w, s)| w * von_neumann_entropy(s))
        .sum();
    Ok(von_neumann_entropy(rho1) - avg)
}

/// Classical form `H(x1) - H(x2 | k)` of the classical-quantum information
/// for a chain `x2 <- k <- x1`, in nats.
///
/// Coincides with [`iqc_quantum`] of the chain's diagonal embedding.
pub fn iqc_classical(chain: &MarkovChain3) -> f64 {
    let p_k = chain.marginal_k();
    let h_cond = conditional_entropy(chain.p_x2_given_k(), &p_k)
        .expect("chain dimensions are validated at construction");
    shannon_entropy(chain.p_x1()) - h_cond
}
