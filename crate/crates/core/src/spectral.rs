//! Emitter-specific spectral densities built from enhancement factors.
//!
//! The emitter couples to the reservoir through two field components:
//! radial (along the sphere-emitter axis) and tangential. Their densities
//! are `J_rad = (Γ₀/2π)(λ⊥/2)s` and `J_tan = (Γ₀/2π)(λ∥/2)s`, where
//! `s = (ω/ω₀)³` carries the free-space mode-density growth and `s = 1`
//! under the flat-continuum approximation (FCA). For circularly polarized
//! transition dipoles the diagonal/cross memory kernels see the
//! combinations `J± = J_rad ± J_tan`, while a linear dipole along one axis
//! sees twice the corresponding single component and no cross coupling.

use crate::errors::{Error, Result};
use crate::table::EnhancementTable;
use crate::units::HBAR_EV_FS;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Transition-dipole arrangement of the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DipoleConfig {
    /// Degenerate V system with circular dipoles (ẑ ± ix̂)/√2: both excited
    /// states couple to both field components and to each other.
    VCircular,
    /// Two-level emitter, dipole along the sphere-emitter axis.
    LinearRadial,
    /// Two-level emitter, dipole tangential to the sphere surface.
    LinearTangential,
}

/// Linear-dipole orientation selector for two-level densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Along the sphere-emitter axis (radial).
    Z,
    /// Tangential to the sphere surface.
    X,
}

/// Which density combination to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityComponent {
    /// J_rad + J_tan — drives the diagonal memory kernel.
    Plus,
    /// J_rad − J_tan — drives the cross kernel.
    Minus,
    /// Radial component alone.
    Rad,
    /// Tangential component alone.
    Tan,
}

/// Emitter parameters: transition energy, free-space lifetime, dipole
/// arrangement, and the initial excited-state amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterSpec {
    /// Transition energy in eV.
    pub omega0_ev: f64,
    /// Free-space lifetime in fs.
    pub tau0_fs: f64,
    /// Dipole arrangement.
    pub dipole_config: DipoleConfig,
    /// Initial amplitude of excited state 1.
    pub a1: Complex64,
    /// Initial amplitude of excited state 2 (forced to 0 for linear dipoles).
    pub a2: Complex64,
}

impl EmitterSpec {
    /// Validate and construct. The initial state must be normalized to
    /// 1e-12; linear configs ignore `a2` and require a nonzero `a1`, which
    /// is rescaled to unit modulus.
    pub fn new(
        omega0_ev: f64,
        tau0_fs: f64,
        dipole_config: DipoleConfig,
        a1: Complex64,
        a2: Complex64,
    ) -> Result<Self> {
        if !(omega0_ev > 0.0) {
            return Err(Error::Domain(format!(
                "transition energy must be positive, got {omega0_ev} eV"
            )));
        }
        if !(tau0_fs > 0.0) {
            return Err(Error::Domain(format!(
                "free-space lifetime must be positive, got {tau0_fs} fs"
            )));
        }
        let (a1, a2) = match dipole_config {
            DipoleConfig::VCircular => {
                let norm = a1.norm_sqr() + a2.norm_sqr();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::Domain(format!(
                        "initial amplitudes must satisfy |a1|^2 + |a2|^2 = 1, got {norm}"
                    )));
                }
                (a1, a2)
            }
            DipoleConfig::LinearRadial | DipoleConfig::LinearTangential => {
                let m = a1.norm();
                if m == 0.0 {
                    return Err(Error::Domain(
                        "linear-dipole emitters need a nonzero first amplitude".into(),
                    ));
                }
                (a1 / m, Complex64::new(0.0, 0.0))
            }
        };
        Ok(EmitterSpec {
            omega0_ev,
            tau0_fs,
            dipole_config,
            a1,
            a2,
        })
    }

    /// Free-space decay rate at the transition energy, Γ₀(ω₀) = ħ/τ₀, in eV.
    pub fn gamma0_at_omega0(&self) -> f64 {
        HBAR_EV_FS / self.tau0_fs
    }

    /// Free-space decay rate Γ₀(ω) = Γ₀(ω₀)·(ω/ω₀)³ in eV.
    pub fn gamma0(&self, omega_ev: f64) -> Result<f64> {
        if !(omega_ev > 0.0) {
            return Err(Error::Domain(format!(
                "free-space rate requires a positive frequency, got {omega_ev} eV"
            )));
        }
        let r = omega_ev / self.omega0_ev;
        Ok(self.gamma0_at_omega0() * r * r * r)
    }
}

/// Spectral densities of one emitter at one distance from the sphere,
/// supported on a finite band and evaluated from a prebuilt enhancement
/// table (exactly at table nodes, bilinearly in between).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensityModel {
    /// Emitter parameters.
    pub emitter: EmitterSpec,
    /// Enhancement factors λ⊥, λ∥ over (ω, D).
    pub table: EnhancementTable,
    /// Surface-to-emitter distance in nm.
    pub d_nm: f64,
    /// Support band [ω_lo, ω_hi] in eV; densities are zero outside.
    pub band: (f64, f64),
    /// Flat-continuum approximation: drop the (ω/ω₀)³ factor.
    pub fca: bool,
}

impl SpectralDensityModel {
    /// Validate band/table consistency and construct.
    pub fn new(
        emitter: EmitterSpec,
        table: EnhancementTable,
        d_nm: f64,
        band: (f64, f64),
        fca: bool,
    ) -> Result<Self> {
        let (lo, hi) = band;
        if !(lo < hi) {
            return Err(Error::Config(format!(
                "band must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        let (tw_lo, tw_hi) = table.omega_range();
        if lo < tw_lo || hi > tw_hi {
            return Err(Error::Config(format!(
                "band [{lo}, {hi}] eV exceeds the table range [{tw_lo}, {tw_hi}] eV"
            )));
        }
        if !(emitter.omega0_ev >= lo && emitter.omega0_ev <= hi) {
            return Err(Error::Config(format!(
                "transition energy {} eV lies outside the band [{lo}, {hi}] eV",
                emitter.omega0_ev
            )));
        }
        let d_lo = table.distance_grid[0];
        let d_hi = table.distance_grid[table.distance_grid.len() - 1];
        if d_nm < d_lo || d_nm > d_hi {
            return Err(Error::Config(format!(
                "distance {d_nm} nm outside the table range [{d_lo}, {d_hi}] nm"
            )));
        }
        Ok(SpectralDensityModel {
            emitter,
            table,
            d_nm,
            band,
            fca,
        })
    }

    fn scale(&self, omega_ev: f64) -> f64 {
        if self.fca {
            1.0
        } else {
            let r = omega_ev / self.emitter.omega0_ev;
            r * r * r
        }
    }

    fn check_band(&self, omega_ev: f64) -> Result<()> {
        let (lo, hi) = self.band;
        if omega_ev < lo || omega_ev > hi {
            return Err(Error::Range(format!(
                "frequency {omega_ev} eV outside the density band [{lo}, {hi}] eV"
            )));
        }
        Ok(())
    }

    /// Evaluate one density component at `omega_ev` (inside the band), in eV.
    pub fn density(&self, component: DensityComponent, omega_ev: f64) -> Result<f64> {
        self.check_band(omega_ev)?;
        let (lambda_perp, lambda_par) = self.table.lookup(omega_ev, self.d_nm)?;
        let prefactor = self.emitter.gamma0_at_omega0() / (2.0 * PI) * self.scale(omega_ev);
        let rad = prefactor * 0.5 * lambda_perp;
        let tan = prefactor * 0.5 * lambda_par;
        Ok(match component {
            DensityComponent::Rad => rad,
            DensityComponent::Tan => tan,
            DensityComponent::Plus => rad + tan,
            DensityComponent::Minus => rad - tan,
        })
    }

    /// Density seen by a two-level emitter with a linear dipole: twice the
    /// matching single component; the cross kernel vanishes identically.
    pub fn two_level_density(&self, orientation: Orientation, omega_ev: f64) -> Result<f64> {
        let expected = match orientation {
            Orientation::Z => DipoleConfig::LinearRadial,
            Orientation::X => DipoleConfig::LinearTangential,
        };
        if self.emitter.dipole_config != expected {
            return Err(Error::Config(format!(
                "orientation {orientation:?} requires dipole_config {expected:?}, emitter has {:?}",
                self.emitter.dipole_config
            )));
        }
        let component = match orientation {
            Orientation::Z => DensityComponent::Rad,
            Orientation::X => DensityComponent::Tan,
        };
        Ok(2.0 * self.density(component, omega_ev)?)
    }

    /// The (diagonal, cross) density pair that drives the memory kernels of
    /// this emitter's amplitude equations, respecting the dipole
    /// arrangement: V systems couple through (J⁺, J⁻); linear dipoles see
    /// twice one component on the diagonal and no cross term.
    pub fn mode_densities(&self, omega_ev: f64) -> Result<(f64, f64)> {
        match self.emitter.dipole_config {
            DipoleConfig::VCircular => Ok((
                self.density(DensityComponent::Plus, omega_ev)?,
                self.density(DensityComponent::Minus, omega_ev)?,
            )),
            DipoleConfig::LinearRadial => {
                Ok((self.two_level_density(Orientation::Z, omega_ev)?, 0.0))
            }
            DipoleConfig::LinearTangential => {
                Ok((self.two_level_density(Orientation::X, omega_ev)?, 0.0))
            }
        }
    }

    /// Effective decay times (τ₀/λ⊥(ω₀,D), τ₀/λ∥(ω₀,D)) in fs: the
    /// Markov-limit lifetimes of the radially/tangentially coupled sectors.
    pub fn effective_times_fs(&self) -> Result<(f64, f64)> {
        let (lambda_perp, lambda_par) = self.table.lookup(self.emitter.omega0_ev, self.d_nm)?;
        Ok((
            self.emitter.tau0_fs / lambda_perp,
            self.emitter.tau0_fs / lambda_par,
        ))
    }

    /// CSV header shared by all density exports.
    pub fn csv_header() -> &'static str {
        "omega_ev,J_plus,J_minus,J_rad,J_tan,fca"
    }

    /// CSV rows (no header) sampling the band at `n_points` evenly spaced
    /// frequencies, endpoints included.
    pub fn densities_csv_rows(&self, n_points: usize) -> Result<String> {
        if n_points < 2 {
            return Err(Error::Domain(
                "density sampling needs at least 2 points".into(),
            ));
        }
        let (lo, hi) = self.band;
        let mut out = String::new();
        for i in 0..n_points {
            // Pin the last sample to the edge so rounding cannot push it
            // outside the band.
            let w = if i == n_points - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n_points - 1) as f64
            };
            writeln!(
                out,
                "{},{},{},{},{},{}",
                w,
                self.density(DensityComponent::Plus, w)?,
                self.density(DensityComponent::Minus, w)?,
                self.density(DensityComponent::Rad, w)?,
                self.density(DensityComponent::Tan, w)?,
                u8::from(self.fca),
            )
            .unwrap();
        }
        Ok(out)
    }

    /// Full CSV (header plus rows).
    pub fn densities_csv(&self, n_points: usize) -> Result<String> {
        Ok(format!(
            "{}\n{}",
            Self::csv_header(),
            self.densities_csv_rows(n_points)?
        ))
    }
}
