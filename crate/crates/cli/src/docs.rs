//! JSON document shapes accepted and produced on the command line.
//!
//! Documents are plain nested arrays so they can be written by hand or by
//! other tools; conversion into the core types revalidates everything and
//! annotates failures with a JSON pointer to the offending field.

use infobound::fluctuation::FeedbackModel;
use infobound::info::{CondMatrix, ProbVec};
use infobound::markov::MarkovChain3;
use serde::{Deserialize, Serialize};

/// A conversion failure, carrying a JSON pointer into the source document
/// when the offending field is known.
#[derive(Debug, Clone, PartialEq)]
pub struct DocError {
    pub pointer: Option<String>,
    pub source: infobound::Error,
}

impl DocError {
    fn at(pointer: impl Into<String>, source: infobound::Error) -> Self {
        Self {
            pointer: Some(pointer.into()),
            source,
        }
    }

    fn bare(source: infobound::Error) -> Self {
        Self {
            pointer: None,
            source,
        }
    }
}

impl std::fmt::Display for DocError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.pointer {
            Some(p) => write!(f, "at {p}: {}", self.source),
            None => self.source.fmt(f),
        }
    }
}

impl std::error::Error for DocError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// A three-step chain `x1 -> k -> x2`.
///
/// The conditional matrices are row-major with `entry[i][j] = P(out = i |
/// in = j)`, so every column sums to one; `p_x1` is the distribution of
/// the initial variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument {
    pub p_x2_given_k: Vec<Vec<f64>>,
    pub p_k_given_x1: Vec<Vec<f64>>,
    pub p_x1: Vec<f64>,
}

impl ChainDocument {
    pub fn to_chain(&self) -> Result<MarkovChain3, DocError> {
        let x2_given_k = CondMatrix::from_rows(self.p_x2_given_k.clone())
            .map_err(|e| DocError::at("/p_x2_given_k", e))?;
        let k_given_x1 = CondMatrix::from_rows(self.p_k_given_x1.clone())
            .map_err(|e| DocError::at("/p_k_given_x1", e))?;
        let p_x1 = ProbVec::new(self.p_x1.clone()).map_err(|e| DocError::at("/p_x1", e))?;
        MarkovChain3::new(x2_given_k, k_given_x1, p_x1).map_err(DocError::bare)
    }

    pub fn from_chain(chain: &MarkovChain3) -> Self {
        Self {
            p_x2_given_k: chain.p_x2_given_k().rows(),
            p_k_given_x1: chain.p_k_given_x1().rows(),
            p_x1: chain.p_x1().as_slice().to_vec(),
        }
    }
}

/// A measurement-feedback model.
///
/// `meas` is the measurement channel `P(k | x0)` and `feedback[k]` the
/// state update `P(x1 | x0)` applied under outcome `k`. The reverse
/// process may be given explicitly (`reverse[k]` together with the
/// per-outcome reference `p1_ref[k]`) or derived as the Bayesian reverse
/// of the forward dynamics, which is the default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub p0: Vec<f64>,
    pub meas: Vec<Vec<f64>>,
    pub feedback: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reverse: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1_ref: Option<Vec<Vec<f64>>>,
    /// Defaults to `true`; set to `false` only alongside an explicit
    /// reverse process.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bayesian_reverse: Option<bool>,
}

impl ModelDocument {
    pub fn to_model(&self) -> Result<FeedbackModel, DocError> {
        let p0 = ProbVec::new(self.p0.clone()).map_err(|e| DocError::at("/p0", e))?;
        let meas =
            CondMatrix::from_rows(self.meas.clone()).map_err(|e| DocError::at("/meas", e))?;
        let feedback = matrices_at(&self.feedback, "/feedback")?;

        match (&self.reverse, &self.p1_ref) {
            (Some(reverse), Some(p1_ref)) => {
                if self.bayesian_reverse == Some(true) {
                    return Err(DocError::at(
                        "/bayesian_reverse",
                        infobound::Error::Domain(
                            "bayesian_reverse cannot be combined with an explicit reverse process"
                                .into(),
                        ),
                    ));
                }
                let reverse = matrices_at(reverse, "/reverse")?;
                let p1_ref = p1_ref
                    .iter()
                    .enumerate()
                    .map(|(k, entries)| {
                        ProbVec::new(entries.clone())
                            .map_err(|e| DocError::at(format!("/p1_ref/{k}"), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                FeedbackModel::new(p0, meas, feedback, reverse, p1_ref).map_err(DocError::bare)
            }
            (None, None) => {
                if self.bayesian_reverse == Some(false) {
                    return Err(DocError::at(
                        "/bayesian_reverse",
                        infobound::Error::Domain(
                            "an explicit reverse process and reference are required when \
                             bayesian_reverse is false"
                                .into(),
                        ),
                    ));
                }
                FeedbackModel::with_bayesian_reverse(p0, meas, feedback).map_err(DocError::bare)
            }
            (Some(_), None) => Err(DocError::at(
                "/p1_ref",
                infobound::Error::Domain(
                    "reverse was given without p1_ref; provide both or neither".into(),
                ),
            )),
            (None, Some(_)) => Err(DocError::at(
                "/reverse",
                infobound::Error::Domain(
                    "p1_ref was given without reverse; provide both or neither".into(),
                ),
            )),
        }
    }
}

fn matrices_at(raw: &[Vec<Vec<f64>>], base: &str) -> Result<Vec<CondMatrix>, DocError> {
    raw.iter()
        .enumerate()
        .map(|(k, rows)| {
            CondMatrix::from_rows(rows.clone()).map_err(|e| DocError::at(format!("{base}/{k}"), e))
        })
        .collect()
}
