//! Serializable report shapes emitted on stdout.
//!
//! Core quantities are always computed in nats; the [`Units`] chosen on
//! the command line scales information-valued fields at the moment a
//! report is assembled. Probabilities and the exponential average itself
//! are dimensionless and never rescaled.

use infobound::bounds::{BoundReport, MutualBoundReport, Verdict};
use infobound::fluctuation::Averages;
use serde::Serialize;
use std::f64::consts::LN_2;

use crate::docs::ChainDocument;

/// Unit in which information quantities are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    pub fn label(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }

    /// Scales a quantity given in nats into these units.
    pub fn scale(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / LN_2,
        }
    }
}

fn verdict_label(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::Holds => "holds",
        Verdict::ViolatesLower => "violates_lower",
        Verdict::ViolatesUpper => "violates_upper",
        Verdict::ViolatesBoth => "violates_both",
    }
}

#[derive(Debug, Serialize)]
pub struct BoundsDto {
    pub iqc: f64,
    pub h_x1: f64,
    pub h_x2_given_k: f64,
    pub h_k: f64,
    pub mutual_x1_k: f64,
    pub lower_violation: f64,
    pub upper_violation: f64,
    pub verdict: &'static str,
}

impl BoundsDto {
    pub fn new(report: &BoundReport, units: Units) -> Self {
        Self {
            iqc: units.scale(report.iqc),
            h_x1: units.scale(report.h_x1),
            h_x2_given_k: units.scale(report.h_x2_given_k),
            h_k: units.scale(report.h_k),
            mutual_x1_k: units.scale(report.mutual_x1_k),
            lower_violation: units.scale(report.lower_violation),
            upper_violation: units.scale(report.upper_violation),
            verdict: verdict_label(report.verdict),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MutualDto {
    pub mutual_x1_k: f64,
    pub h_k: f64,
    pub holds: bool,
}

impl MutualDto {
    pub fn new(report: &MutualBoundReport, units: Units) -> Self {
        Self {
            mutual_x1_k: units.scale(report.mutual_x1_k),
            h_k: units.scale(report.h_k),
            holds: report.holds,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyDto {
    pub status: &'static str,
    pub units: &'static str,
    pub example1: BoundsDto,
    pub example2: BoundsDto,
}

#[derive(Debug, Serialize)]
pub struct CheckDto {
    pub units: &'static str,
    pub bounds: BoundsDto,
    pub mutual: MutualDto,
}

#[derive(Debug, Serialize)]
pub struct OracleDto {
    pub steps: usize,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct SearchDto {
    pub units: &'static str,
    pub objective: &'static str,
    pub dims: [usize; 3],
    pub seed: u64,
    pub restarts: usize,
    pub budget: u64,
    pub evaluations: u64,
    pub converged: bool,
    pub best_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDto>,
    pub bounds: BoundsDto,
    pub best_chain: ChainDocument,
}

#[derive(Debug, Serialize)]
pub struct AveragesDto {
    pub avg_sigma: f64,
    pub avg_ic: f64,
    pub avg_sigma_plus_ic: f64,
}

impl AveragesDto {
    pub fn new(averages: &Averages, units: Units) -> Self {
        Self {
            avg_sigma: units.scale(averages.avg_sigma),
            avg_ic: units.scale(averages.avg_ic),
            avg_sigma_plus_ic: units.scale(averages.avg_sigma_plus_ic),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DimsDto {
    pub n0: usize,
    pub n_outcomes: usize,
    pub n1: usize,
}

/// Exact quantities for a model embedded from a chain: the chain's I_QC,
/// the average feedback information, and how far `<sigma> + I_QC` falls
/// below zero.
#[derive(Debug, Serialize)]
pub struct ChainGapDto {
    pub iqc: f64,
    pub avg_sigma: f64,
    pub avg_ic: f64,
    pub gap: f64,
    pub sigma_plus_iqc: f64,
}

#[derive(Debug, Serialize)]
pub struct JarzynskiDto {
    pub units: &'static str,
    pub mode: &'static str,
    pub dims: DimsDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jarzynski: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub averages: Option<AveragesDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainGapDto>,
}
