//! Polarization-resolved steady-state response of the atom–cavity system.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, Polarization, VelocityClass};
use crate::search::{self, Extremum};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Unit of every rate in the model.
pub const GAMMA: f64 = 1.0;

/// Atomic susceptibility χ for one circular component.
///
/// Evaluated as −i g²N d₁ / [2(d₀d₁ + Ω²)], which stays finite at exact
/// two-photon resonance where d₁ vanishes.
pub fn susceptibility(p: &ModelParams, pol: Polarization, v: VelocityClass) -> Result<Complex64> {
    let s = p.sigma_mapping.zeeman_sign(pol);
    let (dp, dd) = v.detunings(p);
    let d0 = Complex64::new(-GAMMA, dp + s * p.delta);
    let d1 = Complex64::new(-p.gamma_prime, dp - dd + s * p.delta);

    let chi = if p.omega == 0.0 {
        // two-level limit; Ω²/d₁ is identically zero
        -I * p.g2n / (2.0 * d0)
    } else {
        let den = 2.0 * (d0 * d1 + p.omega * p.omega);
        if den == Complex64::new(0.0, 0.0) {
            return Err(Error::Degenerate(format!(
                "d0*d1 + Omega^2 vanishes for {pol:?} at kv = {}",
                v.kv
            )));
        }
        -I * p.g2n * d1 / den
    };
    if !(chi.re.is_finite() && chi.im.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite susceptibility for {pol:?}")));
    }
    // absorptive medium: with T = κ/(κ − iΔ − iχ) this is Im χ ≥ 0
    debug_assert!(chi.im >= -1e-12 * (1.0 + chi.norm()), "Im chi = {}", chi.im);
    Ok(chi)
}

/// Complex amplitude transmission κ/(κ − iΔ − iχ).
pub fn cavity_transfer(p: &ModelParams, pol: Polarization, v: VelocityClass) -> Result<Complex64> {
    let chi = susceptibility(p, pol, v)?;
    Ok(p.kappa / (p.kappa - I * p.delta_c - I * chi))
}

/// Transmission amplitudes (σ₊, σ₋).
pub fn transfer_pair(p: &ModelParams, v: VelocityClass) -> Result<(Complex64, Complex64)> {
    Ok((
        cavity_transfer(p, Polarization::SigmaPlus, v)?,
        cavity_transfer(p, Polarization::SigmaMinus, v)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldResponse {
    pub t_plus: f64,
    pub t_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    /// (φ₋ − φ₊)/2 in radians.
    pub faraday: f64,
}

impl FieldResponse {
    pub fn from_amplitudes(plus: Complex64, minus: Complex64) -> Self {
        Self::from_polar(plus.norm(), plus.arg(), minus.norm(), minus.arg())
    }

    fn from_polar(t_plus: f64, phi_plus: f64, t_minus: f64, phi_minus: f64) -> Self {
        FieldResponse {
            t_plus,
            t_minus,
            phi_plus,
            phi_minus,
            faraday: (phi_minus - phi_plus) / 2.0,
        }
    }

    pub fn t(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::SigmaPlus => self.t_plus,
            Polarization::SigmaMinus => self.t_minus,
        }
    }

    pub fn phi(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::SigmaPlus => self.phi_plus,
            Polarization::SigmaMinus => self.phi_minus,
        }
    }
}

/// Response of both components for atoms at rest.
pub fn response(p: &ModelParams) -> Result<FieldResponse> {
    p.validate()?;
    let (plus, minus) = transfer_pair(p, VelocityClass::AT_REST)?;
    Ok(FieldResponse::from_amplitudes(plus, minus))
}

/// Closed-form response at Δ_p = Δ_d = Δ = 0 with γ′ = 0.
///
/// With δ′ = δ − Ω²/δ and D = δ′² + γ², each component reads
/// T = 2κD / (2κD + g²Nγ + i s g²N δ′). Numerator and denominator are
/// multiplied through by δ² so nothing overflows as δ → 0, where the
/// transmission tends to 1 with zero phase.
pub fn resonant_closed_form(p: &ModelParams) -> Result<FieldResponse> {
    p.validate()?;
    if !p.is_resonant() {
        return Err(Error::RegimeViolation(format!(
            "needs delta_p = delta_d = delta_c = 0, got ({}, {}, {})",
            p.delta_p, p.delta_d, p.delta_c
        )));
    }
    if p.gamma_prime != 0.0 {
        return Err(Error::RegimeViolation(format!(
            "needs gamma_prime = 0, got {}",
            p.gamma_prime
        )));
    }
    if p.delta == 0.0 && p.omega > 0.0 {
        return Ok(FieldResponse::from_polar(1.0, 0.0, 1.0, 0.0));
    }

    let (g, k, d, om2) = (p.g2n, p.kappa, p.delta, p.omega * p.omega);
    // (scaled D, scaled g²Nγ, scaled g²N δ′)
    let (d_scaled, gg, gd) = if om2 == 0.0 {
        (d * d + GAMMA * GAMMA, g * GAMMA, g * d)
    } else {
        let q = d * d - om2; // δ·δ′
        (q * q + d * d * GAMMA * GAMMA, g * GAMMA * d * d, g * d * q)
    };
    let component = |pol: Polarization| {
        let s = p.sigma_mapping.zeeman_sign(pol);
        let re = 2.0 * k * d_scaled + gg;
        let im = s * gd;
        let t = 2.0 * k * d_scaled / re.hypot(im);
        (t, -im.atan2(re))
    };
    let (tp, pp) = component(Polarization::SigmaPlus);
    let (tm, pm) = component(Polarization::SigmaMinus);
    Ok(FieldResponse::from_polar(tp, pp, tm, pm))
}

/// Leading small-field Faraday angle (δ/2κ)(g²N/Ω²), signed like `response`.
pub fn small_field_faraday(p: &ModelParams) -> Result<f64> {
    if p.omega <= 0.0 {
        return Err(Error::invalid("omega", "small-field angle needs omega > 0"));
    }
    Ok(p.sigma_mapping.faraday_sign() * p.delta / (2.0 * p.kappa) * p.g2n / (p.omega * p.omega))
}

/// Transparency half-width γ′ + 2κΩ²/g²N.
pub fn transparency_width_analytic(p: &ModelParams) -> Result<f64> {
    if p.g2n <= 0.0 {
        return Err(Error::Degenerate("transparency width divides by g2n = 0".into()));
    }
    Ok(p.gamma_prime + 2.0 * p.kappa * p.omega * p.omega / p.g2n)
}

/// Two-photon resonance of `pol` on the Δ_p axis.
pub fn transparency_center(p: &ModelParams, pol: Polarization) -> f64 {
    p.delta_d - p.sigma_mapping.zeeman_sign(pol) * p.delta
}

/// Half-width at half-maximum of the t²(Δ_p) transparency peak of `pol`.
///
/// The peak is bracketed on a grid spanning ±10 analytic widths around the
/// two-photon resonance and refined by golden section. The half level sits
/// midway between the peak and the lowest t² in the window; each edge is
/// found by bisection and the two half-widths are averaged.
pub fn transparency_width_measured(p: &ModelParams, pol: Polarization) -> Result<f64> {
    p.validate()?;
    let w = match transparency_width_analytic(p) {
        Ok(w) if w > 0.0 => w,
        _ => p.kappa,
    };
    let center = transparency_center(p, pol);
    let (lo, hi) = (center - 10.0 * w, center + 10.0 * w);

    let mut failure = None;
    let mut t2 = |x: f64| match cavity_transfer(&p.with_delta_p(x), pol, VelocityClass::AT_REST) {
        Ok(t) => t.norm_sqr(),
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };

    let grid = search::linspace(lo, hi, 801);
    let values: Vec<f64> = grid.iter().map(|&x| t2(x)).collect();
    let (mut ipk, mut baseline) = (0usize, f64::INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > values[ipk] {
            ipk = i;
        }
        baseline = baseline.min(v);
    }
    let contrast = values[ipk] - baseline;
    if !(contrast >= 1e-6) || ipk == 0 || ipk == grid.len() - 1 {
        return Err(Error::NoPeak {
            contrast: if contrast.is_finite() { contrast } else { 0.0 },
        });
    }

    let peak = search::golden_section(&mut t2, grid[ipk - 1], grid[ipk + 1], Extremum::Max, 1e-12 * w.max(1e-300), 500);
    let half = baseline + (peak.value - baseline) / 2.0;

    let left_idx = (0..ipk).rev().find(|&i| values[i] < half);
    let right_idx = (ipk + 1..grid.len()).find(|&i| values[i] < half);
    let (Some(li), Some(ri)) = (left_idx, right_idx) else {
        return Err(Error::NoPeak { contrast });
    };
    let tol = 1e-13 * w;
    let left = search::bisect(|x| t2(x) - half, grid[li], peak.x, tol);
    let right = search::bisect(|x| t2(x) - half, peak.x, grid[ri], tol);
    if let Some(e) = failure {
        return Err(e);
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok(0.5 * ((peak.x - l) + (r - peak.x))),
        _ => Err(Error::NoPeak { contrast }),
    }
}
