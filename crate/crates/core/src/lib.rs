//! Non-Markovian spontaneous emission of a degenerate V-type (or two-level)
//! quantum emitter next to a Drude-metal nanosphere.
//!
//! The pipeline has four physics stages, each independently testable:
//!
//! 1. [`mie`] — radial/tangential decay-rate enhancement factors λ⊥, λ∥
//!    from the exact multipole scattering series of the sphere.
//! 2. [`table`] — bilinear interpolation tables of those factors with a
//!    text cache, so sweeps do not recompute the series.
//! 3. [`spectral`] — anisotropic spectral densities J^±, J^rad, J^tan of
//!    the emitter–sphere system, with an optional flat-continuum variant.
//! 4. [`emde`] — discretization of the densities into effective modes and
//!    exact propagation of the amplitude equations by eigendecomposition,
//!    either of the full coupled system or of two decoupled ± chains.
//!
//! [`oracles`] holds independent reference solvers (direct Volterra
//! integration, a closed-form Lorentzian solution, the flat-reservoir
//! limit) used to validate the pipeline; [`config`], [`cli`], and
//! [`validate`] provide the command-line tool around it.
//!
//! Internally all energies are in eV and times in 1/eV; femtoseconds are
//! converted at the API boundaries ([`units`]).

pub mod cli;
pub mod config;
pub mod eigsolve;
pub mod emde;
pub mod errors;
pub mod ioutil;
pub mod mie;
pub mod oracles;
pub mod spectral;
pub mod table;
pub mod units;
pub mod validate;

pub use config::{InitialState, RunConfig, Solver};
pub use emde::{
    assemble, decouple_pm, discretize, discretize_fn, propagate_pm, time_grid,
    EffectiveHamiltonian, EffectiveModeSet, PmChain, Trajectory,
};
pub use errors::{Error, Result};
pub use mie::SphereSpec;
pub use oracles::{
    lorentzian_analytic, markov_solution, volterra_solve, volterra_solve_generic, ExpSum,
    KernelPair,
};
pub use spectral::{
    DensityComponent, DipoleConfig, EmitterSpec, Orientation, SpectralDensityModel,
};
pub use table::EnhancementTable;
