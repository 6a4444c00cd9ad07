//! Physical constants, the magnetic length, and the electron-mediated
//! flip-flop coupling law between two nuclear spins.
//!
//! Unit conventions used throughout the crate: energies are angular
//! frequencies (E/ħ, rad/s), lengths are nanometers, fields are tesla and
//! times are seconds. The Gaussian-units magnetic length `sqrt(ħc/eH)` is
//! evaluated in SI as `sqrt(ħ/(eH))`, which has the same value.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Reduced Planck constant, CODATA 2018 (J·s).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Elementary charge, CODATA 2018 (C).
pub const ELECTRON_CHARGE_SI: f64 = 1.602_176_634e-19;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Default strength anchor for the coupling prefactor: 1e-16 erg.
pub const DEFAULT_ANCHOR_ENERGY_J: f64 = 1e-23;

const METERS_TO_NM: f64 = 1e9;

/// CODATA 2018 constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    hbar: T,
    electron_charge: T,
    speed_of_light: T,
}

impl<T: Real> PhysicalConstants<T> {
    pub fn codata2018() -> Self {
        Self {
            hbar: T::lit(HBAR_SI),
            electron_charge: T::lit(ELECTRON_CHARGE_SI),
            speed_of_light: T::lit(SPEED_OF_LIGHT_SI),
        }
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn electron_charge(&self) -> T {
        self.electron_charge
    }

    pub fn speed_of_light(&self) -> T {
        self.speed_of_light
    }
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Prefactor `V` (rad·s⁻¹·T) and decay constant `c` of the coupling law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams<T> {
    pub v_prefactor: T,
    pub c_dimensionless: T,
}

impl<T: Real> CouplingParams<T> {
    pub fn new(v_prefactor: T, c_dimensionless: T) -> Result<Self> {
        let params = Self {
            v_prefactor,
            c_dimensionless,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_prefactor.is_finite() && self.v_prefactor > T::zero()) {
            return Err(domain(format!(
                "coupling prefactor must be positive and finite, got {}",
                self.v_prefactor
            )));
        }
        if !(self.c_dimensionless.is_finite() && self.c_dimensionless > T::zero()) {
            return Err(domain(format!(
                "dimensionless decay constant must be positive and finite, got {}",
                self.c_dimensionless
            )));
        }
        Ok(())
    }
}

/// One spin-½ nucleus of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NucleusSpec<T> {
    pub label: String,
    pub atomic_number: u32,
    /// rad·s⁻¹·T⁻¹, may be negative.
    pub gyromagnetic_ratio: T,
}

impl<T: Real> NucleusSpec<T> {
    pub fn new(label: impl Into<String>, atomic_number: u32, gyromagnetic_ratio: T) -> Self {
        Self {
            label: label.into(),
            atomic_number,
            gyromagnetic_ratio,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.atomic_number < 1 {
            return Err(domain(format!(
                "nucleus '{}': atomic number must be at least 1",
                self.label
            )));
        }
        if !self.gyromagnetic_ratio.is_finite() {
            return Err(domain(format!(
                "nucleus '{}': gyromagnetic ratio must be finite",
                self.label
            )));
        }
        Ok(())
    }

    pub fn z(&self) -> T {
        T::lit(f64::from(self.atomic_number))
    }
}

fn check_field<T: Real>(field: T) -> Result<()> {
    if field.is_finite() && field > T::zero() {
        Ok(())
    } else {
        Err(domain(format!(
            "applied field must be positive and finite, got {field} T"
        )))
    }
}

/// Magnetic length `sqrt(ħ/(e·H))` in nanometers.
pub fn magnetic_length<T: Real>(field: T) -> Result<T> {
    check_field(field)?;
    let k = PhysicalConstants::<T>::codata2018();
    // ħ/e first keeps the f32 path inside the normal range.
    let ratio = k.hbar() / k.electron_charge();
    Ok((ratio / field).sqrt() * T::lit(METERS_TO_NM))
}

/// Distance profile of the coupling, `sqrt(c/x)·exp(-c·x)` with `x = r/ℓ_H`.
pub fn coupling_profile<T: Real>(x: T, c: T) -> T {
    (c / x).sqrt() * (-(c * x)).exp()
}

/// Magnitude `J` (rad/s) of the flip-flop coupling between two nuclei with
/// atomic numbers `z1`, `z2` separated by `separation` nm.
///
/// The Hamiltonian term is `-J·(σ₊σ₋ + σ₋σ₊)`; `J` itself is always positive.
pub fn coupling_strength<T: Real>(
    params: &CouplingParams<T>,
    z1: T,
    z2: T,
    field: T,
    separation: T,
) -> Result<T> {
    check_field(field)?;
    if !(separation.is_finite() && separation > T::zero()) {
        return Err(domain(format!(
            "spin separation must be positive and finite, got {separation} nm"
        )));
    }
    params.validate()?;
    let ell = magnetic_length(field)?;
    let amplitude = params.v_prefactor * z1 * z2 / field;
    Ok(amplitude * coupling_profile(separation / ell, params.c_dimensionless))
}

/// Fixes `V` so that two nuclei with atomic number `z_ref` at separation
/// `ℓ_H(field_ref)` couple with strength `anchor_energy/ħ`. Uses `c = 1`.
pub fn calibrate_prefactor<T: Real>(
    anchor_energy: T,
    z_ref: T,
    field_ref: T,
) -> Result<CouplingParams<T>> {
    calibrate_prefactor_with_decay(anchor_energy, z_ref, field_ref, T::one())
}

/// [`calibrate_prefactor`] for an arbitrary decay constant `c`.
pub fn calibrate_prefactor_with_decay<T: Real>(
    anchor_energy: T,
    z_ref: T,
    field_ref: T,
    c_dimensionless: T,
) -> Result<CouplingParams<T>> {
    if !(anchor_energy.is_finite() && anchor_energy > T::zero()) {
        return Err(domain(format!(
            "anchor energy must be positive and finite, got {anchor_energy} J"
        )));
    }
    if !(z_ref.is_finite() && z_ref > T::zero()) {
        return Err(domain(format!(
            "reference atomic number must be positive, got {z_ref}"
        )));
    }
    check_field(field_ref)?;
    if !(c_dimensionless.is_finite() && c_dimensionless > T::zero()) {
        return Err(domain("dimensionless decay constant must be positive"));
    }
    let k = PhysicalConstants::<T>::codata2018();
    let target = anchor_energy / k.hbar();
    // At r = ℓ_H the profile is sqrt(c)·exp(-c).
    let profile = coupling_profile(T::one(), c_dimensionless);
    CouplingParams::new(
        target * field_ref / (z_ref * z_ref * profile),
        c_dimensionless,
    )
}

/// Signed Larmor angular frequency `ω = γ·H` (rad/s).
pub fn larmor_frequency<T: Real>(nucleus: &NucleusSpec<T>, field: T) -> T {
    nucleus.gyromagnetic_ratio * field
}

/// Converts an energy in joules to the internal angular-frequency unit.
pub fn energy_to_angular_frequency<T: Real>(energy_joules: T) -> T {
    energy_joules / PhysicalConstants::<T>::codata2018().hbar()
}
