//! Information quantities over finite-state systems, and what happens to
//! their familiar bounds under measurement and feedback.
//!
//! The crate is organized around one central quantity: the
//! *classical-quantum information* of a measurement, `S(rho1) - sum_k p_k
//! S(rho2_k)` in its quantum form, `H(x1) - H(x2|k)` in its classical form
//! on a chain `x2 <- k <- x1`. The candidate bounds `0 <= iqc <= H(k)` --
//! natural-looking because they hold for genuine mutual informations --
//! fail, and everything here exists to compute, certify, and stress that
//! failure:
//!
//! - [`info`]: Shannon, binary, von Neumann, conditional entropy, mutual
//!   information, and the classical-quantum information itself, over
//!   validated distribution, channel, and density-matrix types. Nats
//!   throughout.
//! - [`markov`]: three-variable chains, their joints and marginals, two
//!   bundled fixture chains violating one candidate bound each by exactly
//!   `ln 2`, the diagonal quantum embedding, and samplers for randomized
//!   testing.
//! - [`bounds`]: per-chain bound reports with violation magnitudes and a
//!   fixture self-check.
//! - [`search`]: derivative-free multistart search for violations over
//!   softmax-parameterized chains, plus an exhaustive simplex-grid oracle
//!   that certifies attainable values with no optimizer in the loop.
//! - [`fluctuation`]: discrete measurement-feedback processes, pointwise
//!   entropy production and measurement information, and the exponential
//!   average `<exp(-sigma - i_c)> = 1` checked exhaustively and by Monte
//!   Carlo. The violating chains embed as processes with vanishing entropy
//!   production, reconciling the bound violations with the second law.
//!
//! Randomized operations (search restarts, Monte Carlo shards) derive
//! per-unit RNG streams from a single seed, so results are bitwise
//! reproducible for a given seed even with internal parallelism.
//!
//! ```
//! use infobound::{bounds, markov};
//!
//! let report = bounds::check_bounds(&markov::example1());
//! assert_eq!(report.iqc, -std::f64::consts::LN_2);
//! assert_eq!(report.verdict, bounds::Verdict::ViolatesLower);
//! ```

pub mod bounds;
mod error;
pub mod fluctuation;
pub mod info;
pub mod markov;
pub mod search;
mod stream;

pub use error::{Error, Result};
