//! Thermal averaging over the one-dimensional Maxwell–Boltzmann distribution
//! of Doppler shifts, (1/√π Δ) ∫ f(kv) e^{−(kv)²/Δ²} d(kv).

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, ShiftMode, VelocityClass};
use crate::quadrature::{pairwise_sum, GaussHermite};
use crate::stats::{self, FisherAverage, FisherResult, OutcomeDistribution};

pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// ⁸⁷Rb atomic mass.
pub const RB87_MASS: f64 = 1.443_160_6e-25;
/// Rb D1 vacuum wavelength.
pub const RB_D1_WAVELENGTH: f64 = 794.979e-9;

/// Integrand magnitude at the outermost node above which the average is refused.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DopplerConfig {
    /// K
    pub temperature: f64,
    /// kg
    pub atomic_mass: f64,
    /// Probe carrier angular frequency, rad/s.
    pub angular_frequency: f64,
    /// Width Δω_D in rad/s used instead of the thermal formula.
    pub width_override: Option<f64>,
    pub quadrature_order: usize,
    pub shift_mode: ShiftMode,
    pub fisher_average: FisherAverage,
}

impl Default for DopplerConfig {
    fn default() -> Self {
        DopplerConfig {
            temperature: 1e-3,
            atomic_mass: RB87_MASS,
            angular_frequency: 2.0 * PI * SPEED_OF_LIGHT / RB_D1_WAVELENGTH,
            width_override: None,
            quadrature_order: 64,
            shift_mode: ShiftMode::Copropagating,
            fisher_average: FisherAverage::AverageOfFisher,
        }
    }
}

impl DopplerConfig {
    pub fn with_temperature(self, temperature: f64) -> Self {
        DopplerConfig {
            temperature,
            ..self
        }
    }

    pub fn with_order(self, quadrature_order: usize) -> Self {
        DopplerConfig {
            quadrature_order,
            ..self
        }
    }

    pub fn with_width(self, width: f64) -> Self {
        DopplerConfig {
            width_override: Some(width),
            ..self
        }
    }

    pub fn with_shift_mode(self, shift_mode: ShiftMode) -> Self {
        DopplerConfig { shift_mode, ..self }
    }

    pub fn with_fisher_average(self, fisher_average: FisherAverage) -> Self {
        DopplerConfig {
            fisher_average,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid("temperature", "must be > 0"));
        }
        if !(self.atomic_mass > 0.0) {
            return Err(Error::invalid("atomic_mass", "must be > 0"));
        }
        if !(self.angular_frequency > 0.0) {
            return Err(Error::invalid("angular_frequency", "must be > 0"));
        }
        if let Some(w) = self.width_override {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::invalid("width_override", "must be > 0"));
            }
        }
        if self.quadrature_order < 2 {
            return Err(Error::invalid("quadrature_order", "must be >= 2"));
        }
        Ok(())
    }

    /// Width in units of the linewidth `gamma_si` (rad/s).
    pub fn width_in_gamma(&self, gamma_si: f64) -> Result<f64> {
        Ok(doppler_width(self)? / gamma_si)
    }
}

/// Δω_D = √(2 k_B T ω² / (m c²)) in rad/s, or the override when set.
pub fn doppler_width(cfg: &DopplerConfig) -> Result<f64> {
    cfg.validate()?;
    if let Some(w) = cfg.width_override {
        return Ok(w);
    }
    let w = cfg.angular_frequency;
    Ok((2.0 * BOLTZMANN * cfg.temperature * w * w / (cfg.atomic_mass * SPEED_OF_LIGHT * SPEED_OF_LIGHT)).sqrt())
}

/// Gaussian average of an `N`-valued observable of kv (γ units), width `width`.
pub fn gaussian_average<const N: usize, F>(rule: &GaussHermite, width: f64, mut f: F) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let n = rule.order();
    let mut terms = vec![[0.0; N]; n];
    for (i, (&u, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let v = f(width * u)?;
        if i == 0 || i == n - 1 {
            if let Some(&big) = v.iter().find(|x| !(x.abs() <= DIVERGENCE_LIMIT)) {
                return Err(Error::QuadratureDivergence { value: big });
            }
        }
        for k in 0..N {
            terms[i][k] = w * v[k];
        }
    }
    let norm = PI.sqrt();
    let mut out = [0.0; N];
    let mut column = vec![0.0; n];
    for k in 0..N {
        for i in 0..n {
            column[i] = terms[i][k];
        }
        out[k] = pairwise_sum(&column) / norm;
    }
    Ok(out)
}

/// Doppler average of a scalar observable f(kv), kv in γ units.
pub fn doppler_average<F>(mut f: F, cfg: &DopplerConfig, gamma_si: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let width = cfg.width_in_gamma(gamma_si)?;
    let rule = GaussHermite::new(cfg.quadrature_order);
    Ok(gaussian_average(&rule, width, |kv| Ok([f(kv)?]))?[0])
}

/// Velocity-averaged outcome distribution at the parameters' δ.
pub fn averaged_outcomes(p: &ModelParams, cfg: &DopplerConfig, gamma_si: f64) -> Result<OutcomeDistribution> {
    let width = cfg.width_in_gamma(gamma_si)?;
    let rule = GaussHermite::new(cfg.quadrature_order);
    let [h, v] = detected_average(p, &rule, width, cfg.shift_mode)?;
    Ok(OutcomeDistribution::from_detected(h, v))
}

fn detected_average(p: &ModelParams, rule: &GaussHermite, width: f64, mode: ShiftMode) -> Result<[f64; 2]> {
    gaussian_average(rule, width, |kv| {
        let d = stats::outcome_probabilities(p, VelocityClass::new(kv, mode))?;
        Ok([d.p_h, d.p_v])
    })
}

/// Doppler-averaged total and horizontal-channel Fisher information.
pub fn averaged_fisher(p: &ModelParams, cfg: &DopplerConfig, gamma_si: f64) -> Result<FisherResult> {
    p.validate()?;
    let width = cfg.width_in_gamma(gamma_si)?;
    let rule = GaussHermite::new(cfg.quadrature_order);
    let mode = cfg.shift_mode;

    let mut result = match cfg.fisher_average {
        FisherAverage::AverageOfFisher => {
            let singular = Cell::new(false);
            let step = Cell::new(stats::derivative_step(p.delta));
            let [total, h] = gaussian_average(&rule, width, |kv| {
                let f = stats::fisher_information(p, VelocityClass::new(kv, mode))?;
                singular.set(singular.get() | f.singular);
                step.set(f.derivative_step);
                Ok([f.f_total, f.f_h])
            })?;
            FisherResult {
                f_total: total.min(stats::FISHER_CAP),
                f_h: h.min(stats::FISHER_CAP),
                derivative_step: step.get(),
                doppler_applied: true,
                singular: singular.get(),
                averaging: None,
            }
        }
        FisherAverage::FisherOfAverage => {
            let [h, v] = detected_average(p, &rule, width, mode)?;
            let dist = OutcomeDistribution::from_detected(h, v);
            let slopes = stats::central_slopes(|x| detected_average(&p.with_delta(x), &rule, width, mode), p.delta)?;
            stats::fisher_from(&dist, &slopes)
        }
    };
    result.doppler_applied = true;
    result.averaging = Some(cfg.fisher_average);
    Ok(result)
}

/// Fisher information with or without Doppler averaging.
pub fn fisher_with(p: &ModelParams, doppler: Option<&DopplerConfig>, gamma_si: f64) -> Result<FisherResult> {
    match doppler {
        Some(cfg) => averaged_fisher(p, cfg, gamma_si),
        None => {
            p.validate()?;
            stats::fisher_information(p, VelocityClass::AT_REST)
        }
    }
}
