//! SI bridge between field and Zeeman shift, and the single- and multi-photon
//! sensitivity bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::doppler::{self, DopplerConfig, BOLTZMANN, RB87_MASS, RB_D1_WAVELENGTH};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::response::{response, transparency_width_analytic};
use crate::search::{self, Extremum};
use crate::stats::FisherResult;

pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
/// Bohr magneton over h, Hz/T.
pub const BOHR_HZ_PER_TESLA: f64 = 14.0e9;
/// |g_F| of the ⁸⁷Rb 5²S₁/₂ F = 1 manifold.
pub const DEFAULT_G_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalConstants {
    /// Excited-state half-linewidth γ, rad/s.
    pub gamma_si: f64,
    /// g_L μ_B in rad·s⁻¹·T⁻¹.
    pub gl_mub: f64,
    /// Probe photon energy ħω_p, J.
    pub photon_energy: f64,
    pub boltzmann: f64,
    pub atomic_mass: f64,
    pub wavelength: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            gamma_si: PI * 6.06e6,
            gl_mub: DEFAULT_G_FACTOR * 2.0 * PI * BOHR_HZ_PER_TESLA,
            photon_energy: 1.559 * ELECTRON_VOLT,
            boltzmann: BOLTZMANN,
            atomic_mass: RB87_MASS,
            wavelength: RB_D1_WAVELENGTH,
        }
    }
}

impl PhysicalConstants {
    pub fn with_g_factor(self, g: f64) -> Self {
        PhysicalConstants {
            gl_mub: g * 2.0 * PI * BOHR_HZ_PER_TESLA,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma_si", self.gamma_si),
            ("gl_mub", self.gl_mub),
            ("photon_energy", self.photon_energy),
            ("boltzmann", self.boltzmann),
            ("atomic_mass", self.atomic_mass),
            ("wavelength", self.wavelength),
        ];
        for (field, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Zeeman shift per tesla in γ units.
    pub fn shift_per_tesla(&self) -> f64 {
        self.gl_mub / self.gamma_si
    }

    pub fn doppler_config(&self) -> DopplerConfig {
        DopplerConfig {
            atomic_mass: self.atomic_mass,
            angular_frequency: 2.0 * PI * doppler::SPEED_OF_LIGHT / self.wavelength,
            ..DopplerConfig::default()
        }
    }

    pub fn assumptions(&self) -> Vec<String> {
        vec![
            format!(
                "g_L*mu_B = {:e} rad/s/T (default |g_F| = 1/2 with mu_B/h = 14.0 GHz/T and an explicit 2*pi)",
                self.gl_mub
            ),
            format!("gamma = {:e} rad/s is the excited-state half-linewidth", self.gamma_si),
            "Fisher information is taken per unit x = delta/gamma and converted with (g_L*mu_B/gamma)^2".into(),
        ]
    }
}

/// δ/γ produced by a field `b` in tesla.
pub fn zeeman_shift(b: f64, c: &PhysicalConstants) -> f64 {
    c.gl_mub * b / c.gamma_si
}

/// Field in tesla producing the shift `delta` (γ units).
pub fn field_for_shift(delta: f64, c: &PhysicalConstants) -> f64 {
    delta * c.gamma_si / c.gl_mub
}

/// Dimensionless Fisher information in T⁻².
pub fn fisher_to_physical(f: f64, c: &PhysicalConstants) -> f64 {
    let s = c.shift_per_tesla();
    s * s * f
}

/// S = 1/√(ς F); infinite when F = 0.
pub fn single_photon_sensitivity(f_physical: f64, repetitions_per_second: f64) -> Result<f64> {
    if !(repetitions_per_second > 0.0) {
        return Err(Error::invalid("repetitions_per_second", "must be > 0"));
    }
    if !(f_physical >= 0.0) {
        return Err(Error::invalid("fisher", "must be >= 0"));
    }
    if f_physical == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (repetitions_per_second * f_physical).sqrt())
}

/// Probe rate ς at which the single-photon bound equals `target_s`.
pub fn calibrate_repetition_rate(target_s: f64, f_physical: f64) -> Result<f64> {
    if !(target_s > 0.0) {
        return Err(Error::invalid("target_s", "must be > 0"));
    }
    if !(f_physical > 0.0) {
        return Err(Error::invalid("fisher", "must be > 0"));
    }
    Ok(1.0 / (target_s * target_s * f_physical))
}

/// Where the multiphoton bound is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatingPoint {
    /// δ maximizing the total Fisher information on (0, w_t].
    #[default]
    FisherOptimal,
    /// The given δ (γ units).
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiphotonInputs {
    /// Detection temperature entering the 2k_BT noise term, K.
    pub temperature: f64,
    /// Input probe power, W.
    pub power_in: f64,
    pub operating: OperatingPoint,
    /// Probe repetitions per second for the single-photon figure.
    pub repetitions_per_second: Option<f64>,
    /// Single-photon sensitivity to invert for ς, T/√Hz.
    pub calibration_target: Option<f64>,
}

impl MultiphotonInputs {
    pub fn new(temperature: f64, power_in: f64) -> Self {
        MultiphotonInputs {
            temperature,
            power_in,
            operating: OperatingPoint::FisherOptimal,
            repetitions_per_second: None,
            calibration_target: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub target_s: f64,
    pub repetitions_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub operating_delta: f64,
    /// Field in tesla corresponding to `operating_delta`.
    pub operating_field: f64,
    /// (t₊², t₋²)
    pub transmissions: [f64; 2],
    pub faraday: f64,
    pub fisher: f64,
    pub fisher_h: f64,
    /// T⁻²
    pub fisher_physical: f64,
    pub fisher_h_physical: f64,
    /// Cramér–Rao bound for one probe photon, T.
    pub per_probe_uncertainty: f64,
    pub repetitions_per_second: Option<f64>,
    /// T/√Hz
    pub single_photon_s: Option<f64>,
    pub calibration: Option<Calibration>,
    pub power_in: f64,
    pub temperature: f64,
    /// T/√Hz
    pub multiphoton_s: f64,
    pub small_delta: f64,
    pub small_delta_multiphoton_s: f64,
    pub doppler_applied: bool,
    pub assumptions: Vec<String>,
    pub flags: Vec<String>,
}

/// Multiphoton bound S = (t/√F_H) √((ħω_p sin²φ + 2k_BT)/P_in).
pub fn multiphoton_bound(t: f64, faraday: f64, f_h_physical: f64, c: &PhysicalConstants, temperature: f64, power_in: f64) -> f64 {
    if f_h_physical <= 0.0 {
        return f64::INFINITY;
    }
    let noise = c.photon_energy * faraday.sin().powi(2) + 2.0 * c.boltzmann * temperature;
    t / f_h_physical.sqrt() * (noise / power_in).sqrt()
}

struct PointEval {
    t_plus: f64,
    t_minus: f64,
    faraday: f64,
    fisher: FisherResult,
}

fn evaluate_point(p: &ModelParams, cfg: Option<&DopplerConfig>, c: &PhysicalConstants) -> Result<PointEval> {
    let r = response(p)?;
    let fisher = doppler::fisher_with(p, cfg, c.gamma_si)?;
    Ok(PointEval {
        t_plus: r.t_plus,
        t_minus: r.t_minus,
        faraday: r.faraday,
        fisher,
    })
}

/// Multiphoton bound at the parameters' own δ.
pub fn multiphoton_s_at(p: &ModelParams, cfg: Option<&DopplerConfig>, c: &PhysicalConstants, temperature: f64, power_in: f64) -> Result<f64> {
    let e = evaluate_point(p, cfg, c)?;
    Ok(multiphoton_bound(
        e.t_plus,
        e.faraday,
        fisher_to_physical(e.fisher.f_h, c),
        c,
        temperature,
        power_in,
    ))
}

/// δ in (0, w_t] with the largest total Fisher information.
pub fn fisher_optimal_delta(p: &ModelParams, cfg: Option<&DopplerConfig>, c: &PhysicalConstants) -> Result<f64> {
    let wt = transparency_width_analytic(p)?;
    let lo = 1e-3 * wt;
    let mut failure = None;
    let mut objective = |d: f64| match doppler::fisher_with(&p.with_delta(d), cfg, c.gamma_si) {
        Ok(f) => f.f_total,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let located = search::find_extremum(&mut objective, lo, wt, 201, Extremum::Max, 1e-9 * wt);
    let best = match located {
        Ok(l) => l.x,
        Err(Error::NoBracket { .. }) => {
            if objective(lo) >= objective(wt) {
                lo
            } else {
                wt
            }
        }
        Err(e) => return Err(e),
    };
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

pub fn multiphoton_sensitivity(
    p: &ModelParams,
    cfg: Option<&DopplerConfig>,
    c: &PhysicalConstants,
    inputs: &MultiphotonInputs,
) -> Result<SensitivityReport> {
    p.validate()?;
    c.validate()?;
    if !(inputs.power_in > 0.0) {
        return Err(Error::invalid("power_in", "must be > 0"));
    }
    if !(inputs.temperature >= 0.0) {
        return Err(Error::invalid("temperature", "must be >= 0"));
    }
    let wt = transparency_width_analytic(p)?;
    let mut flags = Vec::new();
    let mut assumptions = c.assumptions();

    let delta = match inputs.operating {
        OperatingPoint::Fixed(d) => d,
        OperatingPoint::FisherOptimal => fisher_optimal_delta(p, cfg, c)?,
    };
    assumptions.push(match inputs.operating {
        OperatingPoint::Fixed(_) => "operating delta fixed by the caller".to_string(),
        OperatingPoint::FisherOptimal => {
            "operating delta maximizes the total Fisher information on (0, w_t]; S itself decreases monotonically toward delta = 0".to_string()
        }
    });
    assumptions.push("t in the multiphoton bound is the common amplitude transmission t+ = t- at delta_p = 0".into());
    assumptions.push(format!("sigma_mapping={}", p.sigma_mapping.as_str()));
    if let Some(d) = cfg {
        assumptions.push(format!(
            "doppler: shift_mode={}, fisher_average={}, quadrature_order={}",
            d.shift_mode.as_str(),
            d.fisher_average.as_str(),
            d.quadrature_order
        ));
    }
    if delta.abs() > wt {
        flags.push(format!("operating delta {delta:e} lies outside the transparency width {wt:e}"));
    }
    if !p.is_resonant() {
        flags.push("off-resonant detunings: t+ != t- and t+ is used".into());
    }

    let op = p.with_delta(delta);
    let e = evaluate_point(&op, cfg, c)?;
    if e.fisher.singular {
        flags.push("Fisher information is singular at the operating point (capped)".into());
    }
    let fisher_physical = fisher_to_physical(e.fisher.f_total, c);
    let fisher_h_physical = fisher_to_physical(e.fisher.f_h, c);
    let multiphoton_s = multiphoton_bound(e.t_plus, e.faraday, fisher_h_physical, c, inputs.temperature, inputs.power_in);
    if multiphoton_s.is_infinite() {
        flags.push("no field information in the H channel: multiphoton bound is infinite".into());
    }

    let small_delta = 1e-3 * wt;
    let small_delta_multiphoton_s = multiphoton_s_at(&p.with_delta(small_delta), cfg, c, inputs.temperature, inputs.power_in)?;

    let single_photon_s = match inputs.repetitions_per_second {
        Some(rate) => Some(single_photon_sensitivity(fisher_physical, rate)?),
        None => None,
    };
    let calibration = match inputs.calibration_target {
        Some(target) => Some(Calibration {
            target_s: target,
            repetitions_per_second: calibrate_repetition_rate(target, fisher_physical)?,
        }),
        None => None,
    };

    Ok(SensitivityReport {
        operating_delta: delta,
        operating_field: field_for_shift(delta, c),
        transmissions: [e.t_plus * e.t_plus, e.t_minus * e.t_minus],
        faraday: e.faraday,
        fisher: e.fisher.f_total,
        fisher_h: e.fisher.f_h,
        fisher_physical,
        fisher_h_physical,
        per_probe_uncertainty: if fisher_physical > 0.0 {
            1.0 / fisher_physical.sqrt()
        } else {
            f64::INFINITY
        },
        repetitions_per_second: inputs.repetitions_per_second,
        single_photon_s,
        calibration,
        power_in: inputs.power_in,
        temperature: inputs.temperature,
        multiphoton_s,
        small_delta,
        small_delta_multiphoton_s,
        doppler_applied: cfg.is_some(),
        assumptions,
        flags,
    })
}
