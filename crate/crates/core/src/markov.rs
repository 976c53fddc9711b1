//! Three-variable chains `x2 <- k <- x1`, their joints and marginals, the
//! bundled fixture chains, the diagonal density-matrix embedding, and
//! Dirichlet-uniform samplers for randomized testing.

use rand::Rng;

use crate::error::{Error, Result};
use crate::info::{CondMatrix, DensityMatrix, Ensemble, Joint2, ProbVec};

/// A chain `x2 <- k <- x1` with `P(x2, k, x1) = P(x2|k) P(k|x1) P(x1)`.
///
/// `x1` is the initial variable, `k` a measurement-style middle variable,
/// and `x2` the final variable; the factorization (and hence the Markov
/// property) holds by construction. Both kernels are column-stochastic, so
/// entry `(i, j)` is always "probability of output `i` given input `j`".
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain3 {
    p_x2_given_k: CondMatrix,
    p_k_given_x1: CondMatrix,
    p_x1: ProbVec,
}

impl MarkovChain3 {
    pub fn new(p_x2_given_k: CondMatrix, p_k_given_x1: CondMatrix, p_x1: ProbVec) -> Result<Self> {
        if p_x2_given_k.n_in() != p_k_given_x1.n_out() {
            return Err(Error::ShapeMismatch(format!(
                "P(x2|k) expects {} middle states but P(k|x1) produces {}",
                p_x2_given_k.n_in(),
                p_k_given_x1.n_out()
            )));
        }
        if p_k_given_x1.n_in() != p_x1.len() {
            return Err(Error::ShapeMismatch(format!(
                "P(k|x1) expects {} initial states but P(x1) has {}",
                p_k_given_x1.n_in(),
                p_x1.len()
            )));
        }
        Ok(MarkovChain3 {
            p_x2_given_k,
            p_k_given_x1,
            p_x1,
        })
    }

    /// Alphabet sizes `(n2, nk, n1)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (
            self.p_x2_given_k.n_out(),
            self.p_k_given_x1.n_out(),
            self.p_x1.len(),
        )
    }

    pub fn p_x2_given_k(&self) -> &CondMatrix {
        &self.p_x2_given_k
    }

    pub fn p_k_given_x1(&self) -> &CondMatrix {
        &self.p_k_given_x1
    }

    pub fn p_x1(&self) -> &ProbVec {
        &self.p_x1
    }

    /// The full joint distribution over `(x2, k, x1)`.
    pub fn joint(&self) -> Joint3 {
        let (n2, nk, n1) = self.dims();
        let mut probs = Vec::with_capacity(n2 * nk * n1);
        for x2 in 0..n2 {
            for k in 0..nk {
                for x1 in 0..n1 {
                    probs.push(
                        self.p_x2_given_k.entry(x2, k)
                            * self.p_k_given_x1.entry(k, x1)
                            * self.p_x1.get(x1),
                    );
                }
            }
        }
        Joint3 { n2, nk, n1, probs }
    }

    /// `P(k) = P(k|x1) P(x1)`.
    pub fn marginal_k(&self) -> ProbVec {
        self.p_k_given_x1
            .apply(&self.p_x1)
            .expect("chain dimensions are validated at construction")
    }

    /// `P(x2) = P(x2|k) P(k)`.
    pub fn marginal_x2(&self) -> ProbVec {
        self.p_x2_given_k
            .apply(&self.marginal_k())
            .expect("chain dimensions are validated at construction")
    }

    /// Diagonal embedding into a Hilbert space of dimension `max(n1, n2)`:
    /// the pre-measurement state `diag(P(x1))` and, per middle outcome `k`,
    /// the post-measurement state `diag(column k of P(x2|k))`, weighted by
    /// `P(k)`. Classical and quantum information quantities agree on this
    /// embedding.
    pub fn to_ensemble(&self) -> Result<(DensityMatrix, Ensemble)> {
        let (n2, nk, n1) = self.dims();
        let dim = n1.max(n2);
        let rho1 = DensityMatrix::from_diagonal_padded(&self.p_x1, dim)?;
        let weights = self.marginal_k();
        let states = (0..nk)
            .map(|k| {
                let col = ProbVec::from_normalized(self.p_x2_given_k.column(k));
                DensityMatrix::from_diagonal_padded(&col, dim)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((rho1, Ensemble::new(weights, states)?))
    }
}

/// A joint distribution over `(x2, k, x1)`, stored `x2`-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint3 {
    n2: usize,
    nk: usize,
    n1: usize,
    probs: Vec<f64>,
}

impl Joint3 {
    /// Alphabet sizes `(n2, nk, n1)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n2, self.nk, self.n1)
    }

    /// `P(x2, k, x1)`.
    pub fn prob(&self, x2: usize, k: usize, x1: usize) -> f64 {
        assert!(x2 < self.n2 && k < self.nk && x1 < self.n1);
        self.probs[(x2 * self.nk + k) * self.n1 + x1]
    }

    /// Total mass; 1 up to the accumulated roundoff of the factors.
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// The pair marginal `P(x1, k)`, summing out `x2`.
    pub fn marginal_x1_k(&self) -> Joint2 {
        let mut probs = vec![0.0; self.n1 * self.nk];
        for x2 in 0..self.n2 {
            for k in 0..self.nk {
                for x1 in 0..self.n1 {
                    probs[x1 * self.nk + k] += self.prob(x2, k, x1);
                }
            }
        }
        Joint2::from_probs_normalized(self.n1, self.nk, probs)
    }
}

/// Fixture: binary chain with maximally mixing `P(x2|k)` columns and a
/// deterministic initial state. Its classical-quantum information is
/// exactly `-ln 2`, undershooting the candidate lower bound 0.
///
/// Only `P(x2|k)` and `P(x1)` matter for the value — every column of
/// `P(x2|k)` has entropy `ln 2`, so any middle kernel gives the same
/// answer; this fixture uses the uniform kernel.
pub fn example1() -> MarkovChain3 {
    let half = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
    MarkovChain3::new(
        CondMatrix::from_rows(half.clone()).expect("fixture matrix is valid"),
        CondMatrix::from_rows(half).expect("fixture matrix is valid"),
        ProbVec::new(vec![1.0, 0.0]).expect("fixture distribution is valid"),
    )
    .expect("fixture dimensions agree")
}

/// Fixture: binary chain whose middle outcome is the constant `k = 1` while
/// the initial state is uniform and `P(x2|k)` is the identity. Its
/// classical-quantum information is exactly `+ln 2` against a middle
/// marginal `P(k) = [0, 1]` of zero entropy, overshooting the candidate
/// upper bound `H(k)`.
pub fn example2() -> MarkovChain3 {
    MarkovChain3::new(
        CondMatrix::identity(2),
        CondMatrix::from_rows(vec![vec![0.0, 0.0], vec![1.0, 1.0]])
            .expect("fixture matrix is valid"),
        ProbVec::new(vec![0.5, 0.5]).expect("fixture distribution is valid"),
    )
    .expect("fixture dimensions agree")
}

/// One draw from the flat Dirichlet over `len` outcomes, via normalized
/// unit-exponential variates.
pub fn random_prob_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> ProbVec {
    assert!(len >= 1, "a distribution needs at least one outcome");
    let draws: Vec<f64> = (0..len).map(|_| unit_exponential(rng)).collect();
    let sum: f64 = draws.iter().sum();
    ProbVec::from_normalized(draws.into_iter().map(|x| x / sum).collect())
}

/// A conditional matrix whose columns are independent flat-Dirichlet draws.
pub fn random_cond_matrix<R: Rng + ?Sized>(n_out: usize, n_in: usize, rng: &mut R) -> CondMatrix {
    assert!(n_out >= 1 && n_in >= 1);
    let columns: Vec<Vec<f64>> = (0..n_in)
        .map(|_| random_prob_vec(n_out, rng).as_slice().to_vec())
        .collect();
    CondMatrix::from_columns_normalized(columns)
}

/// A chain with the given `(n2, nk, n1)` alphabet sizes, all factors drawn
/// from flat Dirichlets.
pub fn random_chain<R: Rng + ?Sized>(dims: (usize, usize, usize), rng: &mut R) -> MarkovChain3 {
    let (n2, nk, n1) = dims;
    MarkovChain3::new(
        random_cond_matrix(n2, nk, rng),
        random_cond_matrix(nk, n1, rng),
        random_prob_vec(n1, rng),
    )
    .expect("sampled dimensions agree by construction")
}

fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Rejects u = 0 so the variate is finite and the normalizing sum is
    // strictly positive.
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return -u.ln();
        }
    }
}
