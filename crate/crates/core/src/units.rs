//! Physical constants (exact SI values) and a few conversions.

use std::f64::consts::PI;

/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Angular frequency (rad/s) of an ordinary frequency in Hz.
#[inline]
pub fn angular(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}

/// `h f / (k_B T)` for a frequency in Hz and a temperature in K.
#[inline]
pub fn reduced_energy(f_hz: f64, temperature: f64) -> f64 {
    PLANCK * f_hz / (BOLTZMANN * temperature)
}

/// Energy in joules of a quantum `h f`.
#[inline]
pub fn quantum_energy(f_hz: f64) -> f64 {
    PLANCK * f_hz
}

/// Excited-state population of a two-level system in equilibrium at `temperature`.
pub fn thermal_excited_population(f_hz: f64, temperature: f64) -> f64 {
    let x = reduced_energy(f_hz, temperature);
    1.0 / (1.0 + x.exp())
}
