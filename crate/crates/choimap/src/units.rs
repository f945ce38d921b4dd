//! Unit conventions.
//!
//! Model files carry energies, frequencies, couplings and disorder strengths
//! in wavenumbers (cm⁻¹). Internally every Hamiltonian is assembled in
//! angular frequency units of rad/fs with ħ = 1, and all times are in fs.
//! Inverse temperatures are carried as `beta_cm` with units of cm (so that
//! `beta_cm * omega_cm` is dimensionless).

/// Speed of light in cm/fs.
pub const SPEED_OF_LIGHT_CM_PER_FS: f64 = 2.99792458e-5;

/// Boltzmann constant in cm⁻¹/K.
pub const BOLTZMANN_CM_PER_K: f64 = 0.695_034_800_4;

/// Conversion factor from cm⁻¹ to rad/fs: one wavenumber equals 2πc rad/fs.
pub const CM_TO_RAD_PER_FS: f64 = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_CM_PER_FS;

/// Convert an energy or frequency in cm⁻¹ to rad/fs.
#[inline]
pub fn cm_to_rad_fs(x_cm: f64) -> f64 {
    x_cm * CM_TO_RAD_PER_FS
}

/// Inverse temperature (in cm) for a temperature in kelvin.
#[inline]
pub fn beta_cm_from_kelvin(t_kelvin: f64) -> f64 {
    if t_kelvin == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (BOLTZMANN_CM_PER_K * t_kelvin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_factor_value() {
        // 1 cm^-1 = 2*pi*c rad/fs with c = 2.99792458e-5 cm/fs.
        assert!((CM_TO_RAD_PER_FS - 1.8836515673e-4).abs() < 1e-13);
    }

    #[test]
    fn room_temperature_beta() {
        let beta = beta_cm_from_kelvin(300.0);
        // kT at 300 K is about 208.5 cm^-1.
        assert!((1.0 / beta - 208.5104).abs() < 1e-3);
    }
}
