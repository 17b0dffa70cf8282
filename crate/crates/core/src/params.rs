//! Spectroscopic parameters of the atom–cavity system.
//!
//! Every rate and detuning is expressed in units of the excited-state
//! half-linewidth γ, which is identically 1 inside the model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which pair of detuning denominators drives each circular component.
///
/// `AsWritten` pairs σ₊ with the `+δ` denominators, which puts the σ₊
/// transparency window at Δ_p = −δ. `Swapped` pairs σ₊ with `−δ` so the σ₊
/// window sits at Δ_p = +δ. Only the sign of the Faraday angle depends on
/// the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMapping {
    AsWritten,
    #[default]
    Swapped,
}

impl SigmaMapping {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaMapping::AsWritten => "as_written",
            SigmaMapping::Swapped => "swapped",
        }
    }

    /// Sign multiplying δ inside the denominators used for `pol`.
    pub fn zeeman_sign(self, pol: Polarization) -> f64 {
        match (self, pol) {
            (SigmaMapping::AsWritten, Polarization::SigmaPlus) => 1.0,
            (SigmaMapping::AsWritten, Polarization::SigmaMinus) => -1.0,
            (SigmaMapping::Swapped, Polarization::SigmaPlus) => -1.0,
            (SigmaMapping::Swapped, Polarization::SigmaMinus) => 1.0,
        }
    }

    /// Sign of the Faraday angle for δ > 0 in the small-field regime.
    pub fn faraday_sign(self) -> f64 {
        match self {
            SigmaMapping::AsWritten => -1.0,
            SigmaMapping::Swapped => 1.0,
        }
    }
}

impl std::str::FromStr for SigmaMapping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as_written" | "as-written" => Ok(SigmaMapping::AsWritten),
            "swapped" => Ok(SigmaMapping::Swapped),
            other => Err(Error::Config(format!(
                "unknown sigma mapping `{other}` (expected as_written|swapped)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    SigmaPlus,
    SigmaMinus,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::SigmaPlus, Polarization::SigmaMinus];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Collective coupling g²N (γ²).
    pub g2n: f64,
    /// Drive half-Rabi frequency Ω.
    pub omega: f64,
    /// Cavity decay κ as it appears in the transmission amplitude.
    pub kappa: f64,
    /// Ground-state dephasing γ′.
    pub gamma_prime: f64,
    /// Probe one-photon detuning Δ_p.
    pub delta_p: f64,
    /// Drive detuning Δ_d.
    pub delta_d: f64,
    /// Probe–cavity detuning Δ.
    pub delta_c: f64,
    /// Zeeman shift δ; the sign follows the field direction.
    pub delta: f64,
    #[serde(default)]
    pub sigma_mapping: SigmaMapping,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::fig2()
    }
}

impl ModelParams {
    /// g√N = 10, Ω = 1, κ = 2, γ′ = 10⁻³, δ = 10⁻², all detunings zero.
    pub fn fig2() -> Self {
        ModelParams {
            g2n: 100.0,
            omega: 1.0,
            kappa: 2.0,
            gamma_prime: 1e-3,
            delta_p: 0.0,
            delta_d: 0.0,
            delta_c: 0.0,
            delta: 1e-2,
            sigma_mapping: SigmaMapping::Swapped,
        }
    }

    /// g²N = 200, Ω = 0.5, γ′ = 5×10⁻⁴, δ = 10⁻³.
    pub fn improved() -> Self {
        ModelParams {
            g2n: 200.0,
            omega: 0.5,
            gamma_prime: 5e-4,
            delta: 1e-3,
            ..ModelParams::fig2()
        }
    }

    /// Empty resonant cavity.
    pub fn bare_cavity() -> Self {
        ModelParams {
            g2n: 0.0,
            ..ModelParams::fig2()
        }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        ModelParams { delta, ..self }
    }

    pub fn with_delta_p(self, delta_p: f64) -> Self {
        ModelParams { delta_p, ..self }
    }

    pub fn with_gamma_prime(self, gamma_prime: f64) -> Self {
        ModelParams {
            gamma_prime,
            ..self
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        ModelParams { omega, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("g2n", self.g2n),
            ("omega", self.omega),
            ("kappa", self.kappa),
            ("gamma_prime", self.gamma_prime),
            ("delta_p", self.delta_p),
            ("delta_d", self.delta_d),
            ("delta_c", self.delta_c),
            ("delta", self.delta),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(field, format!("must be finite, got {v}")));
            }
        }
        if self.g2n < 0.0 {
            return Err(Error::invalid("g2n", "must be >= 0"));
        }
        if self.kappa <= 0.0 {
            return Err(Error::invalid("kappa", "must be > 0"));
        }
        if self.gamma_prime < 0.0 {
            return Err(Error::invalid("gamma_prime", "must be >= 0"));
        }
        if self.omega < 0.0 {
            return Err(Error::invalid("omega", "must be >= 0"));
        }
        Ok(())
    }

    /// True at Δ_p = Δ_d = Δ = 0, where t₊ = t₋ and the statistics are even in δ.
    pub fn is_resonant(&self) -> bool {
        self.delta_p == 0.0 && self.delta_d == 0.0 && self.delta_c == 0.0
    }

    pub fn named(preset: &str) -> Option<Self> {
        match preset {
            "fig2" | "fig3" | "fig4" | "base" => Some(ModelParams::fig2()),
            "improved" => Some(ModelParams::improved()),
            "bare" => Some(ModelParams::bare_cavity()),
            _ => None,
        }
    }
}

/// Where a velocity class's Doppler shift enters the detunings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMode {
    /// Probe and drive co-propagate: Δ_p and Δ_d both shift by −kv, so the
    /// two-photon detuning is velocity independent.
    #[default]
    Copropagating,
    /// Only Δ_p shifts.
    ProbeOnly,
}

impl ShiftMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ShiftMode::Copropagating => "copropagating",
            ShiftMode::ProbeOnly => "probe_only",
        }
    }
}

impl std::str::FromStr for ShiftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "copropagating" => Ok(ShiftMode::Copropagating),
            "probe_only" | "probe-only" => Ok(ShiftMode::ProbeOnly),
            other => Err(Error::Config(format!(
                "unknown shift mode `{other}` (expected copropagating|probe-only)"
            ))),
        }
    }
}

/// Doppler shift kv (γ units) of one velocity class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityClass {
    pub kv: f64,
    pub mode: ShiftMode,
}

impl VelocityClass {
    pub const AT_REST: VelocityClass = VelocityClass {
        kv: 0.0,
        mode: ShiftMode::Copropagating,
    };

    pub fn new(kv: f64, mode: ShiftMode) -> Self {
        VelocityClass { kv, mode }
    }

    /// Probe and drive detunings seen by atoms in this class.
    pub fn detunings(&self, p: &ModelParams) -> (f64, f64) {
        match self.mode {
            ShiftMode::Copropagating => (p.delta_p - self.kv, p.delta_d - self.kv),
            ShiftMode::ProbeOnly => (p.delta_p - self.kv, p.delta_d),
        }
    }
}
