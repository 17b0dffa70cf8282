//! Single-photon detection statistics and Fisher information with respect to
//! the dimensionless Zeeman shift x = δ/γ.
//!
//! A vertically polarized probe photon leaves the cavity horizontally
//! polarized, vertically polarized, or not at all. The `(g_L μ_B)²` prefactor
//! that turns these quantities into per-tesla² information lives in
//! [`crate::sensitivity`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, VelocityClass};
use crate::response::transfer_pair;

/// Probabilities below this are treated as vanishing in the Fisher sum.
pub const PROBABILITY_FLOOR: f64 = 1e-15;
/// Derivatives below this accompany a vanishing probability in the 0²/0 → 0 limit.
pub const SLOPE_FLOOR: f64 = 1e-12;
/// Finite stand-in for a divergent Fisher information.
pub const FISHER_CAP: f64 = 1e18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub p_h: f64,
    pub p_v: f64,
    pub p_0: f64,
}

impl OutcomeDistribution {
    pub fn from_amplitudes(plus: Complex64, minus: Complex64) -> Self {
        let p_h = (plus - minus).norm_sqr() / 4.0;
        let p_v = (plus + minus).norm_sqr() / 4.0;
        Self::from_detected(p_h, p_v)
    }

    /// Completes `(p_h, p_v)` with the no-photon probability.
    pub fn from_detected(p_h: f64, p_v: f64) -> Self {
        debug_assert!(p_h + p_v <= 1.0 + 1e-12, "p_h + p_v = {}", p_h + p_v);
        OutcomeDistribution {
            p_h,
            p_v,
            p_0: 1.0 - p_h - p_v,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p_h, self.p_v, self.p_0]
    }
}

pub fn outcome_probabilities(p: &ModelParams, v: VelocityClass) -> Result<OutcomeDistribution> {
    let (plus, minus) = transfer_pair(p, v)?;
    Ok(OutcomeDistribution::from_amplitudes(plus, minus))
}

/// Derivatives of the three outcome probabilities with respect to x = δ/γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilitySlopes {
    pub d_h: f64,
    pub d_v: f64,
    pub d_0: f64,
    pub step: f64,
}

impl ProbabilitySlopes {
    pub fn as_array(&self) -> [f64; 3] {
        [self.d_h, self.d_v, self.d_0]
    }
}

/// Central-difference step used at x.
pub fn derivative_step(x: f64) -> f64 {
    (1e-4 * x.abs()).max(1e-6)
}

/// Central difference of the detected pair `(p_h, p_v)` as a function of x.
///
/// `d_0` is the exact negative sum of the other two, so the three slopes sum
/// to zero.
pub fn central_slopes<F>(mut detected: F, x: f64) -> Result<ProbabilitySlopes>
where
    F: FnMut(f64) -> Result<[f64; 2]>,
{
    let h = derivative_step(x);
    let (xp, xm) = (x + h, x - h);
    if xp == x || xm == x {
        return Err(Error::StepUnderflow { x, step: h });
    }
    let up = detected(xp)?;
    let dn = detected(xm)?;
    let span = xp - xm;
    let d_h = (up[0] - dn[0]) / span;
    let d_v = (up[1] - dn[1]) / span;
    Ok(ProbabilitySlopes {
        d_h,
        d_v,
        d_0: -(d_h + d_v),
        step: h,
    })
}

pub fn d_prob_d_delta(p: &ModelParams, v: VelocityClass) -> Result<ProbabilitySlopes> {
    central_slopes(
        |x| {
            let d = outcome_probabilities(&p.with_delta(x), v)?;
            Ok([d.p_h, d.p_v])
        },
        p.delta,
    )
}

/// How a Doppler average was combined with the Fisher sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FisherAverage {
    /// Velocity average of the per-class Fisher information.
    #[default]
    AverageOfFisher,
    /// Fisher information of the velocity-averaged outcome distribution.
    FisherOfAverage,
}

impl FisherAverage {
    pub fn as_str(self) -> &'static str {
        match self {
            FisherAverage::AverageOfFisher => "average_of_fisher",
            FisherAverage::FisherOfAverage => "fisher_of_average",
        }
    }
}

impl std::str::FromStr for FisherAverage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average_of_fisher" | "average-of-fisher" => Ok(FisherAverage::AverageOfFisher),
            "fisher_of_average" | "fisher-of-average" => Ok(FisherAverage::FisherOfAverage),
            other => Err(Error::Config(format!("unknown Fisher average mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherResult {
    /// Σ over H, V, 0 of (∂ₓp)²/p.
    pub f_total: f64,
    /// (∂ₓp_H)²/p_H.
    pub f_h: f64,
    pub derivative_step: f64,
    pub doppler_applied: bool,
    /// Set when a vanishing probability has a non-vanishing slope; the
    /// affected terms are capped at [`FISHER_CAP`].
    pub singular: bool,
    pub averaging: Option<FisherAverage>,
}

/// One outcome's contribution and whether it hit the divergent limit.
fn fisher_term(prob: f64, slope: f64) -> (f64, bool) {
    if prob < PROBABILITY_FLOOR {
        if slope.abs() < SLOPE_FLOOR {
            (0.0, false)
        } else {
            (FISHER_CAP, true)
        }
    } else {
        ((slope * slope / prob).min(FISHER_CAP), false)
    }
}

/// Fisher sums from a distribution and its slopes.
pub fn fisher_from(dist: &OutcomeDistribution, slopes: &ProbabilitySlopes) -> FisherResult {
    let mut singular = false;
    let mut total = 0.0;
    let mut f_h = 0.0;
    for (i, (prob, slope)) in dist.as_array().into_iter().zip(slopes.as_array()).enumerate() {
        let (term, hit) = fisher_term(prob, slope);
        singular |= hit;
        if i == 0 {
            f_h = term;
        }
        total += term;
    }
    FisherResult {
        f_total: total.min(FISHER_CAP),
        f_h,
        derivative_step: slopes.step,
        doppler_applied: false,
        singular,
        averaging: None,
    }
}

pub fn fisher_information(p: &ModelParams, v: VelocityClass) -> Result<FisherResult> {
    let dist = outcome_probabilities(p, v)?;
    let slopes = d_prob_d_delta(p, v)?;
    Ok(fisher_from(&dist, &slopes))
}

pub fn fisher_h(p: &ModelParams, v: VelocityClass) -> Result<f64> {
    Ok(fisher_information(p, v)?.f_h)
}

/// Leading small-field term (2/κ²)(g²N/Ω²)².
pub fn fisher_small_field_expansion(p: &ModelParams) -> Result<f64> {
    if p.omega <= 0.0 {
        return Err(Error::invalid("omega", "expansion needs omega > 0"));
    }
    let ratio = p.g2n / (p.omega * p.omega);
    Ok(2.0 / (p.kappa * p.kappa) * ratio * ratio)
}
