//! Conversion from physical parameters to the dimensionless model couplings.
//!
//! With the Coulomb length unit `L = ħ²/(m_e K)` (energy unit `m_e K²/ħ²`)
//! the model depends on the box radius `r0/L` and the field strength
//! `λ = f e ħ⁴/(m_e² K³)`. With `L = r0` and no field, the only coupling is
//! `β = m_e r0 K/ħ²`. Everything downstream consumes [`ModelParams`] or
//! [`BetaParams`]; no other module knows about units.

use crate::error::{Error, Result};

/// Raw physical inputs. The caller is responsible for a consistent unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub electron_mass: f64,
    pub coulomb_strength: f64,
    /// Signed field magnitude; flipping the sign flips λ.
    pub field_magnitude: f64,
    pub elementary_charge: f64,
    pub hbar: f64,
    pub box_radius: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("electron_mass", self.electron_mass),
            ("coulomb_strength", self.coulomb_strength),
            ("elementary_charge", self.elementary_charge),
            ("hbar", self.hbar),
            ("box_radius", self.box_radius),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if !self.field_magnitude.is_finite() {
            return Err(Error::Domain(format!(
                "field_magnitude must be finite, got {}",
                self.field_magnitude
            )));
        }
        Ok(())
    }
}

/// Dimensionless box radius and field strength in Coulomb units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub r0: f64,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(r0: f64, lambda: f64) -> Result<Self> {
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(Error::Domain(format!(
                "r0 must be positive and finite, got {r0}"
            )));
        }
        if !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda must be finite, got {lambda}"
            )));
        }
        Ok(Self { r0, lambda })
    }
}

/// Coulomb coupling of the field-free problem on the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    pub beta: f64,
}

impl BetaParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Domain(format!(
                "beta must be non-negative and finite, got {beta}"
            )));
        }
        Ok(Self { beta })
    }
}

/// `λ = f e ħ⁴ / (m_e² K³)`.
pub fn lambda_from_physical(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    let hbar2 = p.hbar * p.hbar;
    Ok(p.field_magnitude * p.elementary_charge * hbar2 * hbar2
        / (p.electron_mass * p.electron_mass * p.coulomb_strength.powi(3)))
}

/// `β = m_e r0 K / ħ²`.
pub fn beta_from_physical(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    Ok(p.electron_mass * p.box_radius * p.coulomb_strength / (p.hbar * p.hbar))
}

/// `r0 / L` with `L = ħ²/(m_e K)`. Same number as β, evaluated in the same order.
pub fn dimensionless_r0(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    Ok(p.electron_mass * p.box_radius * p.coulomb_strength / (p.hbar * p.hbar))
}

/// Both dimensionless formulations of the same physical system.
pub fn model_params(p: &PhysicalParams) -> Result<ModelParams> {
    ModelParams::new(dimensionless_r0(p)?, lambda_from_physical(p)?)
}
