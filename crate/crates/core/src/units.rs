//! Unit system and physical constants.
//!
//! All internal computations use energies in eV and times in 1/eV, so that
//! ħ never appears in a dynamical formula. Times cross the I/O boundary in
//! femtoseconds and are converted with ħ = 0.6582119569 eV·fs; lengths enter
//! only through the photon momentum k = √ε_b·ω/ħc with ħc in eV·nm.

/// Reduced Planck constant, eV·fs (CODATA).
pub const HBAR_EV_FS: f64 = 0.658_211_956_9;

/// ħc in eV·nm (CODATA), converting photon energy to inverse length.
pub const HBARC_EV_NM: f64 = 197.326_980_4;

/// Convert a time in femtoseconds to internal units of 1/eV.
pub fn fs_to_inv_ev(t_fs: f64) -> f64 {
    t_fs / HBAR_EV_FS
}

/// Convert a time in internal units of 1/eV to femtoseconds.
pub fn inv_ev_to_fs(t_inv_ev: f64) -> f64 {
    t_inv_ev * HBAR_EV_FS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_conversion_round_trips() {
        let t = 137.036;
        assert!((inv_ev_to_fs(fs_to_inv_ev(t)) - t).abs() < 1e-12);
    }

    #[test]
    fn one_ev_period_is_hbar_femtoseconds() {
        // A 1 eV oscillation has angular period 2π/eV = 2π·ħ fs.
        assert!((inv_ev_to_fs(1.0) - 0.6582119569).abs() < 1e-12);
    }
}
