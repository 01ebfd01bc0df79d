//! Built-in verification suite: fast cross-checks between independent
//! computation routes, run by `plasmon-emit validate`.
//!
//! Every check compares two things that were computed differently (series
//! vs closed form, dense vs decoupled eigensolver, time stepping vs
//! spectral propagation), so a pass is evidence of correctness rather than
//! of self-consistency.

use crate::cli::{build_simulation, SimulationParts};
use crate::config::RunConfig;
use crate::emde::{
    assemble, decouple_pm, discretize_fn, propagate_pm, time_grid, EffectiveModeSet,
};
use crate::errors::{Error, Result};
use crate::mie::SphereSpec;
use crate::oracles::{lorentzian_analytic, volterra_solve, KernelPair};
use crate::spectral::DensityComponent;
use crate::table::EnhancementTable;
use crate::units::fs_to_inv_ev;
use num_complex::Complex64;

/// Outcome of one named check: Ok(detail) or Err(what went wrong).
type Outcome = std::result::Result<String, String>;

/// A named check result.
pub struct Check {
    /// Stable kebab-case identifier.
    pub name: &'static str,
    /// Pass detail or failure description.
    pub outcome: Outcome,
}

fn err_str(e: Error) -> String {
    format!("unexpected error: {e}")
}

fn demo_parts(m: usize) -> std::result::Result<SimulationParts, String> {
    let config = RunConfig {
        m,
        ..RunConfig::default()
    };
    build_simulation(&config).map_err(err_str)
}

fn drude_limits() -> Outcome {
    let sphere = SphereSpec::silver(5.0).map_err(err_str)?;
    let eps_high = sphere.drude_epsilon(2000.0).map_err(err_str)?;
    if (eps_high.re - sphere.eps_inf).abs() > 0.01 {
        return Err(format!(
            "high-frequency permittivity {} does not approach eps_inf {}",
            eps_high.re, sphere.eps_inf
        ));
    }
    let eps_vis = sphere.drude_epsilon(3.84).map_err(err_str)?;
    if eps_vis.re >= 0.0 || eps_vis.im <= 0.0 {
        return Err(format!(
            "metallic regime expects Re eps < 0 < Im eps at 3.84 eV, got {eps_vis}"
        ));
    }
    Ok(format!(
        "eps(3.84 eV) = {:.3}{:+.3}i, eps(2000 eV) -> {:.3}",
        eps_vis.re, eps_vis.im, eps_high.re
    ))
}

fn plasmon_peak_location() -> Outcome {
    let sphere = SphereSpec::silver(5.0).map_err(err_str)?;
    let resonances = sphere.lsp_resonances(1).map_err(err_str)?;
    let dipole = resonances[0];
    let expected = 9.176 / (3.718f64 + 2.0).sqrt();
    if (dipole - expected).abs() > 1e-9 {
        return Err(format!(
            "dipole resonance formula drifted: {dipole} vs {expected}"
        ));
    }
    let mut best = (0.0, 0.0);
    let mut w = 3.70;
    while w <= 3.96 {
        let (lp, _) = sphere
            .enhancement_factors(w, 1.0, crate::mie::DEFAULT_TRUNCATION)
            .map_err(err_str)?;
        if lp > best.1 {
            best = (w, lp);
        }
        w += 0.002;
    }
    if (best.0 - dipole).abs() > 0.05 {
        return Err(format!(
            "radial enhancement peaks at {} eV, expected within 0.05 eV of {dipole}",
            best.0
        ));
    }
    Ok(format!(
        "dipole mode at {dipole:.4} eV, enhancement peak at {:.4} eV",
        best.0
    ))
}

fn mie_anchor_values() -> Outcome {
    let sphere = SphereSpec::silver(5.0).map_err(err_str)?;
    // Frozen from an independent arbitrary-precision evaluation of the
    // same scattering series.
    let anchors = [
        (3.84, 1.0, 1.13628453e5, 2.85688276e4),
        (4.5, 3.0, 3.78771509e1, 1.48918159e1),
    ];
    for (w, d, perp, par) in anchors {
        let (lp, lt) = sphere
            .enhancement_factors(w, d, crate::mie::DEFAULT_TRUNCATION)
            .map_err(err_str)?;
        if ((lp - perp) / perp).abs() > 1e-6 || ((lt - par) / par).abs() > 1e-6 {
            return Err(format!(
                "anchor ({w} eV, {d} nm): got ({lp:.6e}, {lt:.6e}), expected ({perp:.6e}, {par:.6e})"
            ));
        }
    }
    Ok("2 frozen anchors reproduced to 1e-6 relative".to_string())
}

fn quasistatic_crosscheck() -> Outcome {
    let small = SphereSpec::new(0.5, 9.176, 3.718, 0.021, 1.0).map_err(err_str)?;
    let (lp, lt) = small
        .enhancement_factors(3.6, 0.2, crate::mie::DEFAULT_TRUNCATION)
        .map_err(err_str)?;
    let (qp, qt) = small.quasistatic_factors(3.6, 0.2).map_err(err_str)?;
    let dp = ((lp - qp) / qp).abs();
    let dt = ((lt - qt) / qt).abs();
    if dp > 5e-3 || dt > 5e-3 {
        return Err(format!(
            "full series vs quasi-static disagree: rel diffs {dp:.2e}, {dt:.2e}"
        ));
    }
    Ok(format!(
        "full vs quasi-static rel diffs {dp:.1e} (radial), {dt:.1e} (tangential)"
    ))
}

fn far_field_neutrality() -> Outcome {
    let sphere = SphereSpec::silver(5.0).map_err(err_str)?;
    let (lp, lt) = sphere
        .enhancement_factors(2.0, 50.0, crate::mie::DEFAULT_TRUNCATION)
        .map_err(err_str)?;
    if (lp - 1.0).abs() > 0.01 || (lt - 1.0).abs() > 0.01 {
        return Err(format!(
            "far from the sphere the factors should be ~1, got ({lp}, {lt})"
        ));
    }
    Ok(format!("at D = 50 nm: ({lp:.4}, {lt:.4})"))
}

fn anisotropy_ratio() -> Outcome {
    let sphere = SphereSpec::silver(5.0).map_err(err_str)?;
    let (lp, lt) = sphere
        .enhancement_factors(3.84, 1.5, crate::mie::DEFAULT_TRUNCATION)
        .map_err(err_str)?;
    let ratio = lp / lt;
    if !(3.5..=4.5).contains(&ratio) {
        return Err(format!("ratio {ratio:.3} outside [3.5, 4.5]"));
    }
    Ok(format!("radial/tangential = {ratio:.3} at (3.84 eV, 1.5 nm)"))
}

fn table_nodes_and_cache() -> Outcome {
    let sphere = SphereSpec::silver(5.0).map_err(err_str)?;
    let table = EnhancementTable::build(
        sphere,
        vec![3.6, 3.8, 4.0],
        vec![1.0, 2.0],
        crate::mie::DEFAULT_TRUNCATION,
    )
    .map_err(err_str)?;
    let (lp, lt) = table.lookup(3.8, 2.0).map_err(err_str)?;
    if lp != table.lambda_perp[3] || lt != table.lambda_par[3] {
        return Err("node lookup is not exact".to_string());
    }
    let restored =
        EnhancementTable::from_cache_string(&table.to_cache_string()).map_err(err_str)?;
    if restored != table {
        return Err("cache round trip lost information".to_string());
    }
    Ok("node lookups exact; cache round trip identical".to_string())
}

fn density_algebra() -> Outcome {
    let parts = demo_parts(8)?;
    for w in [3.6, 3.84, 4.4] {
        let jp = parts.model.density(DensityComponent::Plus, w).map_err(err_str)?;
        let jm = parts.model.density(DensityComponent::Minus, w).map_err(err_str)?;
        let jr = parts.model.density(DensityComponent::Rad, w).map_err(err_str)?;
        let jt = parts.model.density(DensityComponent::Tan, w).map_err(err_str)?;
        if ((jp + jm) - 2.0 * jr).abs() > 1e-12 * jp || ((jp - jm) - 2.0 * jt).abs() > 1e-12 * jp
        {
            return Err(format!("sum/difference algebra broken at {w} eV"));
        }
        if jm.abs() > jp {
            return Err(format!("|J-| > J+ at {w} eV"));
        }
    }
    let exact = parts
        .model
        .density(DensityComponent::Plus, 3.84)
        .map_err(err_str)?;
    let fca_config = RunConfig {
        m: 8,
        fca: true,
        ..RunConfig::default()
    };
    let fca_parts = build_simulation(&fca_config).map_err(err_str)?;
    let fca = fca_parts
        .model
        .density(DensityComponent::Plus, 3.84)
        .map_err(err_str)?;
    if exact != fca {
        return Err(format!(
            "flat-continuum density must equal the exact one at omega0: {exact} vs {fca}"
        ));
    }
    Ok("J+ ± J- = 2 J_rad/tan; |J-| <= J+; exact = flat at omega0".to_string())
}

fn single_mode_rabi() -> Outcome {
    let w_plus = 0.01;
    let modes = EffectiveModeSet::from_parts(vec![3.9], vec![w_plus], vec![0.0], (3.5, 4.5))
        .map_err(err_str)?;
    let times = time_grid(124.0, 0.5).map_err(err_str)?;
    let traj = propagate_pm(
        &modes,
        3.9,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        &times,
    )
    .map_err(err_str)?;
    let mut worst = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let expected = (w_plus.sqrt() * fs_to_inv_ev(t)).cos().powi(2);
        worst = worst.max((traj.p1(i) - expected).abs());
    }
    if worst > 1e-9 {
        return Err(format!("max deviation from cos² is {worst:.2e}"));
    }
    Ok(format!("max |p1 − cos²(√W t)| = {worst:.1e}"))
}

fn pm_vs_dense() -> Outcome {
    let parts = demo_parts(60)?;
    let times = time_grid(100.0, 1.0).map_err(err_str)?;
    let pm = propagate_pm(&parts.modes, 3.84, parts.a1, parts.a2, &times).map_err(err_str)?;
    let mut system = assemble(&parts.modes, 3.84);
    let dense = system.propagate(parts.a1, parts.a2, &times).map_err(err_str)?;
    let mut worst = 0.0f64;
    for i in 0..times.len() {
        worst = worst
            .max((pm.c1[i] - dense.c1[i]).norm())
            .max((pm.c2[i] - dense.c2[i]).norm());
    }
    if worst > 1e-10 {
        return Err(format!("max amplitude difference {worst:.2e}"));
    }
    Ok(format!("max amplitude difference {worst:.1e} (M = 60)"))
}

fn volterra_vs_eigen() -> Outcome {
    let parts = demo_parts(101)?;
    let kernels = KernelPair::from_modes(&parts.modes, 3.84);
    let fine = volterra_solve(&kernels, parts.a1, parts.a2, 0.01, 50.0).map_err(err_str)?;
    let coarse = fine.decimated(50);
    let pm = propagate_pm(&parts.modes, 3.84, parts.a1, parts.a2, &coarse.times_fs)
        .map_err(err_str)?;
    let mut worst = 0.0f64;
    for i in 0..coarse.len() {
        worst = worst.max((coarse.p1(i) - pm.p1(i)).abs());
    }
    if worst > 1e-4 {
        return Err(format!("max |Δp1| = {worst:.2e} exceeds 1e-4"));
    }
    Ok(format!("max |Δp1| = {worst:.1e} over 50 fs (M = 101)"))
}

fn lorentzian_oracle() -> Outcome {
    let (g2, kappa, delta_c) = (0.01, 0.05, 0.02);
    let kernels = KernelPair::lorentzian(g2, kappa, delta_c);
    let traj = volterra_solve(
        &kernels,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        0.01,
        60.0,
    )
    .map_err(err_str)?;
    let mut worst = 0.0f64;
    for i in 0..traj.len() {
        let exact = lorentzian_analytic(g2, kappa, delta_c, traj.times_fs[i]);
        worst = worst.max((traj.c1[i] - exact).norm());
    }
    if worst > 1e-3 {
        return Err(format!("max amplitude error {worst:.2e}"));
    }
    Ok(format!("Volterra vs closed form: max error {worst:.1e}"))
}

fn markov_flat_band() -> Outcome {
    let gamma = 0.05; // population decay rate in eV
    let j = gamma / (2.0 * std::f64::consts::PI);
    let modes = discretize_fn(|_| Ok(j), |_| Ok(0.0), (1.0, 7.0), 800).map_err(err_str)?;
    let times = time_grid(39.0, 1.0).map_err(err_str)?;
    let traj = propagate_pm(
        &modes,
        4.0,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        &times,
    )
    .map_err(err_str)?;
    let mut worst = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let expected = (-gamma * fs_to_inv_ev(t)).exp();
        worst = worst.max((traj.p1(i) - expected).abs());
    }
    if worst > 0.01 {
        return Err(format!(
            "max |p1 − exp(−Γt)| = {worst:.2e} over 3 lifetimes"
        ));
    }
    Ok(format!("max |p1 − exp(−Γt)| = {worst:.1e} (M = 800)"))
}

fn norm_conservation() -> Outcome {
    let parts = demo_parts(101)?;
    let (chain_plus, chain_minus) = decouple_pm(&parts.modes, 3.84);
    let ep = chain_plus.factorize().map_err(err_str)?;
    let em = chain_minus.factorize().map_err(err_str)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c0 = Complex64::new(s, 0.0);
    let mut worst = 0.0f64;
    for i in 0..=50 {
        let t = 10.0 * i as f64;
        let n = ep.state_norm_sqr(c0, t) + em.state_norm_sqr(c0, t);
        worst = worst.max((n - 1.0).abs());
    }
    if worst > 1e-8 {
        return Err(format!("norm drift {worst:.2e} over 500 fs"));
    }
    Ok(format!("total norm drift {worst:.1e} over 500 fs"))
}

fn gauge_invariance() -> Outcome {
    let parts = demo_parts(60)?;
    let shift = 0.31;
    let modes = &parts.modes;
    let shifted = EffectiveModeSet::from_parts(
        modes.frequencies.iter().map(|w| w + shift).collect(),
        modes.weights_plus.clone(),
        modes.weights_minus.clone(),
        (modes.band.0 + shift, modes.band.1 + shift),
    )
    .map_err(err_str)?;
    let times = time_grid(150.0, 1.0).map_err(err_str)?;
    let base = propagate_pm(modes, 3.84, parts.a1, parts.a2, &times).map_err(err_str)?;
    let moved =
        propagate_pm(&shifted, 3.84 + shift, parts.a1, parts.a2, &times).map_err(err_str)?;
    let mut worst = 0.0f64;
    for i in 0..times.len() {
        worst = worst
            .max((base.p1(i) - moved.p1(i)).abs())
            .max((base.p2(i) - moved.p2(i)).abs());
    }
    if worst > 1e-10 {
        return Err(format!(
            "populations changed by {worst:.2e} under a global shift"
        ));
    }
    Ok(format!("population change {worst:.1e} under a 0.31 eV shift"))
}

fn exchange_symmetry() -> Outcome {
    let parts = demo_parts(60)?;
    let times = time_grid(150.0, 1.0).map_err(err_str)?;
    let a = Complex64::new(0.48, 0.36);
    let b = Complex64::new(0.64, -0.48);
    let fwd = propagate_pm(&parts.modes, 3.84, a, b, &times).map_err(err_str)?;
    let rev = propagate_pm(&parts.modes, 3.84, b, a, &times).map_err(err_str)?;
    for i in 0..times.len() {
        if fwd.c1[i] != rev.c2[i] || fwd.c2[i] != rev.c1[i] {
            return Err(format!("swap mismatch at t = {} fs", times[i]));
        }
    }
    Ok("swapping (a1, a2) swaps the trajectories exactly".to_string())
}

fn sector_preservation() -> Outcome {
    let parts = demo_parts(60)?;
    let times = time_grid(150.0, 1.0).map_err(err_str)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for sign in [1.0, -1.0] {
        let mut system = assemble(&parts.modes, 3.84);
        let traj = system
            .propagate(Complex64::new(s, 0.0), Complex64::new(sign * s, 0.0), &times)
            .map_err(err_str)?;
        for i in 0..times.len() {
            if (traj.c2[i] - sign * traj.c1[i]).norm() > 1e-10 {
                return Err(format!(
                    "sector with c2 = {sign} c1 leaks at t = {} fs",
                    times[i]
                ));
            }
        }
    }
    Ok("symmetric and antisymmetric sectors stay closed to 1e-10".to_string())
}

fn config_round_trip() -> Outcome {
    let text = "scenario = fig8\nm = 401\ninit = custom:3,0,4,0\nfca = true\n";
    let parsed = RunConfig::parse(text).map_err(err_str)?;
    let echoed = RunConfig::parse(&parsed.to_config_string()).map_err(err_str)?;
    if parsed != echoed {
        return Err("echo re-parse differs from the original".to_string());
    }
    Ok("parse -> echo -> parse is the identity".to_string())
}

fn preset_coverage() -> Outcome {
    for name in crate::config::preset_names() {
        RunConfig::parse(&format!("scenario = {name}"))
            .map_err(|e| format!("preset {name}: {e}"))?;
    }
    let fig4 = RunConfig::parse("scenario = fig4").map_err(err_str)?;
    if fig4.tau0_fs != 7e4 || fig4.omega0_ev != 3.84 || fig4.d_nm != 2.0 {
        return Err("fig4 preset values drifted".to_string());
    }
    Ok(format!(
        "{} presets parse and validate",
        crate::config::preset_names().len()
    ))
}

/// Run every check and collect the outcomes.
pub fn run_all() -> Vec<Check> {
    vec![
        Check { name: "drude-permittivity-limits", outcome: drude_limits() },
        Check { name: "plasmon-peak-location", outcome: plasmon_peak_location() },
        Check { name: "mie-series-anchors", outcome: mie_anchor_values() },
        Check { name: "quasistatic-crosscheck", outcome: quasistatic_crosscheck() },
        Check { name: "far-field-neutrality", outcome: far_field_neutrality() },
        Check { name: "anisotropy-ratio", outcome: anisotropy_ratio() },
        Check { name: "table-nodes-and-cache", outcome: table_nodes_and_cache() },
        Check { name: "density-algebra", outcome: density_algebra() },
        Check { name: "single-mode-rabi", outcome: single_mode_rabi() },
        Check { name: "pm-vs-dense", outcome: pm_vs_dense() },
        Check { name: "volterra-vs-eigen", outcome: volterra_vs_eigen() },
        Check { name: "lorentzian-oracle", outcome: lorentzian_oracle() },
        Check { name: "markov-flat-band", outcome: markov_flat_band() },
        Check { name: "norm-conservation", outcome: norm_conservation() },
        Check { name: "gauge-invariance", outcome: gauge_invariance() },
        Check { name: "exchange-symmetry", outcome: exchange_symmetry() },
        Check { name: "sector-preservation", outcome: sector_preservation() },
        Check { name: "config-round-trip", outcome: config_round_trip() },
        Check { name: "preset-coverage", outcome: preset_coverage() },
    ]
}

/// Render the per-check table and count failures.
pub fn render(checks: &[Check]) -> (String, usize) {
    let mut out = String::new();
    let mut failures = 0;
    for check in checks {
        match &check.outcome {
            Ok(detail) => out.push_str(&format!("[ok]   {} — {detail}\n", check.name)),
            Err(detail) => {
                failures += 1;
                out.push_str(&format!("[FAIL] {} — {detail}\n", check.name));
            }
        }
    }
    out.push_str(&format!(
        "{} checks, {} failed\n",
        checks.len(),
        failures
    ));
    (out, failures)
}

/// Run, print, and convert failures into a validation error.
pub fn run_and_print() -> Result<()> {
    let checks = run_all();
    let (table, failures) = render(&checks);
    print!("{table}");
    if failures > 0 {
        return Err(Error::Validation(failures));
    }
    Ok(())
}
