//! Acceptance gate: eleven end-to-end checks covering the enhancement
//! factors, the spectral-density structure, solver cross-validation against
//! independent oracles, exactly solvable limits, structural invariants of
//! the effective-mode propagator, qualitative emission dynamics, the
//! flat-continuum comparison, and performance.
//!
//! Each criterion prints one `[PASS]`/`[FAIL]` line (visible with
//! `cargo test --test acceptance -- --nocapture`); the test panics at the
//! end if any criterion failed, listing them all.

use std::time::Instant;

use num_complex::Complex64;
use plasmon_emit::cli::{build_simulation, solve_trajectory};
use plasmon_emit::mie::DEFAULT_TRUNCATION;
use plasmon_emit::spectral::DensityComponent;
use plasmon_emit::units::{fs_to_inv_ev, HBAR_EV_FS};
use plasmon_emit::{
    assemble, discretize_fn, lorentzian_analytic, propagate_pm, time_grid,
    volterra_solve, EffectiveModeSet, KernelPair, RunConfig, Solver, SphereSpec,
    Trajectory,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn record(&mut self, id: u32, what: &str, ok: bool, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {id:02} [{verdict}] {what}: {detail}");
        if !ok {
            self.failures.push(format!("criterion {id:02} {what}: {detail}"));
        }
    }
}

fn silver() -> SphereSpec {
    SphereSpec::silver(5.0).unwrap()
}

fn config_for(scenario: &str) -> RunConfig {
    let mut config = RunConfig::default();
    config
        .apply_override(&format!("scenario={scenario}"))
        .unwrap();
    config
}

fn max_p1_diff(a: &Trajectory, b: &Trajectory) -> f64 {
    assert_eq!(a.len(), b.len());
    (0..a.len())
        .map(|i| (a.p1(i) - b.p1(i)).abs())
        .fold(0.0, f64::max)
}

/// Reference enhancement factors for the 5 nm silver sphere: λ⊥ and λ∥
/// at the two working transition energies and three gaps. The tangential
/// value at (4.16 eV, 2 nm) has no quoted reference.
const REFERENCE_FACTORS: [(f64, f64, f64, Option<f64>); 6] = [
    (3.84, 1.00, 1.13e5, Some(2.8e4)),
    (3.84, 1.55, 7.50e4, Some(1.85e4)),
    (3.84, 2.00, 4.40e4, Some(1.07e4)),
    (4.16, 1.00, 6.54e5, Some(2.83e5)),
    (4.16, 1.55, 3.21e5, Some(1.39e5)),
    (4.16, 2.00, 4.86e4, None),
];

fn criterion_01(gate: &mut Gate) {
    let start = Instant::now();
    let sphere = silver();
    let mut offenders = Vec::new();
    let mut checked = 0;
    for &(omega, d, ref_perp, ref_par) in &REFERENCE_FACTORS {
        let (perp, par) = sphere
            .enhancement_factors(omega, d, DEFAULT_TRUNCATION)
            .unwrap();
        for (label, got, want) in [
            ("perp", perp, Some(ref_perp)),
            ("par", par, ref_par),
        ] {
            let Some(want) = want else { continue };
            checked += 1;
            let ratio = got / want;
            if !(0.7..=1.3).contains(&ratio) {
                offenders.push(format!(
                    "{label}({omega} eV, {d} nm) = {got:.3e} vs reference {want:.2e} (ratio {ratio:.2})"
                ));
            }
        }
    }
    let ok = offenders.is_empty();
    let detail = if ok {
        format!(
            "all {checked} reference values matched within ±30% in {:.2} s",
            start.elapsed().as_secs_f64()
        )
    } else {
        format!(
            "{}/{checked} values outside ±30%: {}",
            offenders.len(),
            offenders.join("; ")
        )
    };
    gate.record(1, "enhancement-factor references", ok, detail);
}

fn criterion_02(gate: &mut Gate) {
    let sphere = silver();
    let mut worst: Option<(f64, f64)> = None;
    for i in 0..5 {
        let d = 1.0 + 0.25 * i as f64;
        let (perp, par) = sphere
            .enhancement_factors(3.84, d, DEFAULT_TRUNCATION)
            .unwrap();
        let ratio = perp / par;
        let off = (ratio - 4.0).abs();
        if worst.is_none_or(|(_, w)| off > w) {
            worst = Some((ratio, off));
        }
        if !(3.5..=4.5).contains(&ratio) {
            gate.record(
                2,
                "anisotropy ratio",
                false,
                format!("λ⊥/λ∥ = {ratio:.3} at D = {d} nm is outside [3.5, 4.5]"),
            );
            return;
        }
    }
    let (ratio, _) = worst.unwrap();
    gate.record(
        2,
        "anisotropy ratio",
        true,
        format!("λ⊥/λ∥ ∈ [3.5, 4.5] at 3.84 eV for D ∈ [1, 2] nm (farthest from 4.0: {ratio:.3})"),
    );
}

fn criterion_03(gate: &mut Gate) {
    let sphere = silver();
    let scan = |lo: f64, hi: f64, n: usize| -> (f64, f64) {
        let mut best = (lo, f64::MIN);
        for i in 0..n {
            let w = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let (perp, _) = sphere
                .enhancement_factors(w, 1.0, DEFAULT_TRUNCATION)
                .unwrap();
            if perp > best.1 {
                best = (w, perp);
            }
        }
        best
    };
    let dipole_resonance = 3.8374;
    let accumulation = 4.2244;
    let (peak_w, peak_v) = scan(3.6, 4.0, 201);
    let (below_w, below_v) = scan(4.0, accumulation, 113);
    let (_, beyond_v) = scan(accumulation, 4.5, 139);
    let peak_ok = (peak_w - dipole_resonance).abs() < 0.05;
    let structure_ok = below_v > beyond_v && below_v > peak_v / 10.0;
    gate.record(
        3,
        "plasmon peak structure at D = 1 nm",
        peak_ok && structure_ok,
        format!(
            "λ⊥ peaks at {peak_w:.4} eV, {peak_v:.2e} (dipole resonance {dipole_resonance}); \
             higher-order weight below {accumulation} eV: {below_v:.2e} at {below_w:.3} eV \
             vs {beyond_v:.2e} above it"
        ),
    );
}

fn criterion_04(gate: &mut Gate) {
    let start = Instant::now();
    let mut config = config_for("fig5");
    config.m = 401;
    config.t_max_fs = 200.0;
    config.dt_out_fs = 0.25;
    config.dt_volterra_fs = 0.01;
    let mut solved = Vec::new();
    for solver in [Solver::Eigen, Solver::EigenPm, Solver::Volterra] {
        let variant = RunConfig { solver, ..config.clone() };
        let parts = build_simulation(&variant).unwrap();
        solved.push(solve_trajectory(&variant, &parts).unwrap());
    }
    let d_pm = max_p1_diff(&solved[0], &solved[1]);
    let d_vo = max_p1_diff(&solved[0], &solved[2]);
    let elapsed = start.elapsed().as_secs_f64();
    gate.record(
        4,
        "three-solver agreement (M = 401, 200 fs)",
        d_pm < 1e-4 && d_vo < 1e-4 && elapsed < 60.0,
        format!(
            "max|Δp1| eigen vs eigen_pm {d_pm:.2e}, eigen vs volterra {d_vo:.2e}, {elapsed:.1} s"
        ),
    );
}

fn criterion_05(gate: &mut Gate) {
    let (g2, kappa, delta_c) = (0.01, 0.05, 0.02);
    let omega0 = 4.0;
    let omega_c = omega0 + delta_c;
    let lorentzian = move |w: f64| {
        (g2 / std::f64::consts::PI) * (kappa / 2.0)
            / ((w - omega_c).powi(2) + (kappa / 2.0).powi(2))
    };
    let modes = discretize_fn(
        move |w| Ok(lorentzian(w)),
        |_| Ok(0.0),
        (omega_c - 0.75, omega_c + 0.75),
        1201,
    )
    .unwrap();
    let times = time_grid(100.0, 0.25).unwrap();
    let traj = propagate_pm(&modes, omega0, ONE, ZERO, &times).unwrap();
    let mut worst = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let exact = lorentzian_analytic(g2, kappa, delta_c, t);
        worst = worst.max((traj.p1(i) - exact.norm_sqr()).abs());
    }
    gate.record(
        5,
        "discretized Lorentzian vs closed form",
        worst < 1e-3,
        format!("max|Δ|c|²| = {worst:.2e} over 100 fs (M = 1201)"),
    );
}

fn criterion_06(gate: &mut Gate) {
    let gamma = 0.05;
    let j = gamma / (2.0 * std::f64::consts::PI);
    let omega0 = 4.0;
    let modes = discretize_fn(|_| Ok(j), |_| Ok(0.0), (1.0, 7.0), 1500).unwrap();
    // Sample the decay envelope on a 1 fs grid out to t = 3/Γ. (Below
    // ~0.5 fs any band-limited reservoir shows the universal quadratic
    // onset, which is not what the exponential law describes.)
    let t_end = 3.0 / gamma * HBAR_EV_FS;
    let times = time_grid(t_end, 1.0).unwrap();
    let traj = propagate_pm(&modes, omega0, ONE, ZERO, &times).unwrap();
    let mut worst_pm = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let expected = (-gamma * fs_to_inv_ev(t)).exp();
        worst_pm = worst_pm.max((traj.p1(i) - expected).abs());
    }
    let kernels = KernelPair::from_modes(&modes, omega0);
    let fine = volterra_solve(&kernels, ONE, ZERO, 0.01, t_end).unwrap();
    let mut worst_vo = 0.0f64;
    for (i, &t) in fine.times_fs.iter().enumerate().step_by(100) {
        let expected = (-gamma * fs_to_inv_ev(t)).exp();
        worst_vo = worst_vo.max((fine.p1(i) - expected).abs());
    }
    gate.record(
        6,
        "flat-band Markov limit",
        worst_pm < 0.01 && worst_vo < 0.01,
        format!(
            "max|p1 − e^(−Γt)| = {worst_pm:.2e} (eigen_pm), {worst_vo:.2e} (volterra) for t ≤ 3/Γ"
        ),
    );
}

fn criterion_07(gate: &mut Gate) {
    let omega0 = 4.0;
    let w = 0.01; // single-mode weight in eV²
    let modes = EffectiveModeSet::from_parts(
        vec![omega0],
        vec![w],
        vec![0.0],
        (omega0 - 0.5, omega0 + 0.5),
    )
    .unwrap();
    let mut ham = assemble(&modes, omega0);
    ham.factorize().unwrap();
    let period_fs = std::f64::consts::PI / w.sqrt() * HBAR_EV_FS;
    let times = time_grid(3.0 * period_fs, 0.05).unwrap();
    let traj = ham.propagate(ONE, ZERO, &times).unwrap();
    let mut worst = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let expected = (w.sqrt() * fs_to_inv_ev(t)).cos().powi(2);
        worst = worst.max((traj.p1(i) - expected).abs());
    }
    gate.record(
        7,
        "single-mode Rabi oscillation",
        worst < 1e-6,
        format!("max|p1 − cos²(√W t)| = {worst:.2e} over three periods"),
    );
}

fn criterion_08(gate: &mut Gate) {
    let mut config = config_for("fig5");
    config.m = 101;
    let parts = build_simulation(&config).unwrap();

    // (a) The dense generator is similar to a real symmetric matrix, so
    // its spectrum must be real up to solver round-off.
    let mut ham = assemble(&parts.modes, config.omega0_ev);
    ham.factorize().unwrap();
    let eig = ham.factorization().unwrap();
    let scale = eig
        .eigenvalues
        .iter()
        .map(|l| l.norm())
        .fold(0.0, f64::max);
    let imag = eig
        .eigenvalues
        .iter()
        .map(|l| l.im.abs())
        .fold(0.0, f64::max)
        / scale;
    let reality_ok = imag < 1e-8;

    // (b) Norm of the full scaled state is conserved over 500 fs.
    let mut config_n = config_for("fig5");
    config_n.m = 401;
    let parts_n = build_simulation(&config_n).unwrap();
    let (chain_plus, chain_minus) =
        plasmon_emit::decouple_pm(&parts_n.modes, config_n.omega0_ev);
    let mut drift = 0.0f64;
    for chain in [&chain_plus, &chain_minus] {
        let eig = chain.factorize().unwrap();
        for i in 0..=100 {
            let t = 5.0 * i as f64;
            drift = drift.max((eig.state_norm_sqr(ONE, t) - 1.0).abs());
        }
    }
    let norm_ok = drift < 1e-8;

    // (c) Shifting every frequency and the transition energy together
    // leaves the populations unchanged.
    let shift = 0.31;
    let omega0 = config.omega0_ev;
    let model = parts.model.clone();
    let model_s = model.clone();
    let band = model.band;
    let base = discretize_fn(
        |w| model.mode_densities(w).map(|d| d.0),
        |w| model.mode_densities(w).map(|d| d.1),
        band,
        101,
    )
    .unwrap();
    let shifted = discretize_fn(
        |w| model_s.mode_densities(w - shift).map(|d| d.0),
        |w| model_s.mode_densities(w - shift).map(|d| d.1),
        (band.0 + shift, band.1 + shift),
        101,
    )
    .unwrap();
    let times = time_grid(120.0, 0.5).unwrap();
    let a1 = Complex64::new(0.48, 0.36);
    let a2 = Complex64::new(0.64, -0.48);
    let t_base = propagate_pm(&base, omega0, a1, a2, &times).unwrap();
    let t_shift = propagate_pm(&shifted, omega0 + shift, a1, a2, &times).unwrap();
    let mut gauge_dev = 0.0f64;
    for i in 0..times.len() {
        gauge_dev = gauge_dev
            .max((t_base.p1(i) - t_shift.p1(i)).abs())
            .max((t_base.p2(i) - t_shift.p2(i)).abs());
    }
    let gauge_ok = gauge_dev < 1e-10;

    // (d) Swapping the initial amplitudes swaps the trajectories.
    let fwd = ham.propagate(a1, a2, &times).unwrap();
    let rev = ham.propagate(a2, a1, &times).unwrap();
    let mut swap_dev = 0.0f64;
    for i in 0..times.len() {
        swap_dev = swap_dev
            .max((fwd.c1[i] - rev.c2[i]).norm())
            .max((fwd.c2[i] - rev.c1[i]).norm());
    }
    let swap_ok = swap_dev < 1e-10;

    // (e) Symmetric and antisymmetric superpositions stay in their sector.
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let sis = ham.propagate(inv_sqrt2, inv_sqrt2, &times).unwrap();
    let ais = ham.propagate(inv_sqrt2, -inv_sqrt2, &times).unwrap();
    let mut sector_dev = 0.0f64;
    for i in 0..times.len() {
        sector_dev = sector_dev
            .max((sis.c1[i] - sis.c2[i]).norm())
            .max((ais.c1[i] + ais.c2[i]).norm());
    }
    let sector_ok = sector_dev < 1e-10;

    // (f) Doubling M leaves the trajectory unchanged at the 1e-3 level.
    let mut config_d = config_for("fig5");
    config_d.m = 802;
    let parts_d = build_simulation(&config_d).unwrap();
    let times_c = time_grid(100.0, 0.25).unwrap();
    let t_401 = propagate_pm(&parts_n.modes, config_n.omega0_ev, ONE, ZERO, &times_c).unwrap();
    let t_802 = propagate_pm(&parts_d.modes, config_d.omega0_ev, ONE, ZERO, &times_c).unwrap();
    let doubling = max_p1_diff(&t_401, &t_802);
    let doubling_ok = doubling < 1e-3;

    let ok = reality_ok && norm_ok && gauge_ok && swap_ok && sector_ok && doubling_ok;
    gate.record(
        8,
        "structural invariants",
        ok,
        format!(
            "eigenvalue reality {imag:.1e}, norm drift {drift:.1e}, gauge {gauge_dev:.1e}, \
             exchange {swap_dev:.1e}, sector {sector_dev:.1e}, M-doubling {doubling:.1e}"
        ),
    );
}

fn criterion_09a(gate: &mut Gate) {
    let mut config = config_for("fig3");
    config.t_max_fs = 300.0;
    config.dt_out_fs = 0.5;
    let parts = build_simulation(&config).unwrap();
    let traj = solve_trajectory(&config, &parts).unwrap();
    let last = traj.len() - 1;
    assert!((traj.times_fs[last] - 300.0).abs() < 1e-9);
    let total = traj.total_population(last);
    gate.record(
        9,
        "(a) quantum-dot emitter decays by 300 fs",
        total < 0.05,
        format!("p1 + p2 = {total:.4} at 300 fs (threshold 0.05)"),
    );
}

fn criterion_09b(gate: &mut Gate) {
    let config = config_for("fig8");
    let parts = build_simulation(&config).unwrap();
    let traj = solve_trajectory(&config, &parts).unwrap();
    let window: Vec<f64> = (0..traj.len())
        .filter(|&i| traj.times_fs[i] >= 400.0 && traj.times_fs[i] <= 500.0)
        .map(|i| traj.total_population(i))
        .collect();
    let min = window.iter().copied().fold(f64::MAX, f64::min);
    let max = window.iter().copied().fold(f64::MIN, f64::max);
    gate.record(
        9,
        "(b) population trapping at 4.16 eV, D = 1.55 nm",
        min > 0.1,
        format!("total population over [400, 500] fs stays in [{min:.2e}, {max:.2e}] (threshold > 0.1)"),
    );
}

/// Subtract a centered moving average (edge-padded) to isolate the
/// oscillatory component.
fn detrend(y: &[f64], window: usize) -> Vec<f64> {
    let n = y.len();
    let half = window / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let mean: f64 = y[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
            y[i] - mean
        })
        .collect()
}

/// Single-bin discrete Fourier transform.
fn dft_bin(y: &[f64], k: usize) -> Complex64 {
    let n = y.len() as f64;
    y.iter()
        .enumerate()
        .map(|(j, &v)| {
            v * Complex64::new(0.0, -std::f64::consts::TAU * k as f64 * j as f64 / n).exp()
        })
        .sum()
}

fn criterion_09c(gate: &mut Gate) {
    let mut config = config_for("fig5");
    config.t_max_fs = 40.0;
    config.dt_out_fs = 0.05;
    let parts = build_simulation(&config).unwrap();
    let traj = solve_trajectory(&config, &parts).unwrap();
    let p1: Vec<f64> = (0..traj.len()).map(|i| traj.p1(i)).collect();
    let p2: Vec<f64> = (0..traj.len()).map(|i| traj.p2(i)).collect();
    let o1 = detrend(&p1, 171);
    let o2 = detrend(&p2, 171);
    let dominant = (1..o1.len() / 2)
        .max_by(|&a, &b| {
            dft_bin(&o1, a)
                .norm()
                .partial_cmp(&dft_bin(&o1, b).norm())
                .unwrap()
        })
        .unwrap();
    let cross = dft_bin(&o1, dominant).conj() * dft_bin(&o2, dominant);
    let cos_phase = cross.re / cross.norm();
    gate.record(
        9,
        "(c) anti-phase population oscillations",
        cos_phase < -0.3,
        format!(
            "cos(Δφ) = {cos_phase:.3} at the dominant oscillation (π phase difference → −1)"
        ),
    );
}

fn criterion_10(gate: &mut Gate) {
    // The densities must agree exactly at the transition energy.
    let mut equal_ok = true;
    for scenario in ["fig10-top", "fig10-bottom"] {
        let exact_cfg = config_for(scenario);
        let mut fca_cfg = config_for(scenario);
        fca_cfg.fca = true;
        let exact = build_simulation(&exact_cfg).unwrap();
        let fca = build_simulation(&fca_cfg).unwrap();
        let omega0 = exact_cfg.omega0_ev;
        for component in [DensityComponent::Plus, DensityComponent::Minus] {
            let je = exact.model.density(component, omega0).unwrap();
            let jf = fca.model.density(component, omega0).unwrap();
            if je != jf {
                equal_ok = false;
            }
        }
    }
    let equal_detail = if equal_ok {
        "J±(ω₀) exact = FCA to the last bit".to_string()
    } else {
        "J±(ω₀) differs between exact and FCA".to_string()
    };

    // The first p1 minimum shifts in opposite directions at the two
    // transition energies: flat-continuum minus exact is positive at
    // 3.84 eV and negative at 4.16 eV.
    let shift_at = |scenario: &str| -> f64 {
        let mut base = config_for(scenario);
        base.t_max_fs = 50.0;
        base.dt_out_fs = 0.025;
        let mut minima = Vec::new();
        for fca in [false, true] {
            let variant = RunConfig { fca, ..base.clone() };
            let parts = build_simulation(&variant).unwrap();
            let traj = solve_trajectory(&variant, &parts).unwrap();
            let (t_min, _) = traj
                .first_local_minimum_p1()
                .expect("a local minimum inside the window");
            minima.push(t_min);
        }
        minima[1] - minima[0]
    };
    let shift_384 = shift_at("fig10-top");
    let shift_416 = shift_at("fig10-bottom");
    let signs_ok = shift_384 > 0.0 && shift_416 < 0.0;
    gate.record(
        10,
        "flat-continuum comparison",
        equal_ok && signs_ok,
        format!(
            "{equal_detail}; phase shift +{shift_384:.3} fs at 3.84 eV, {shift_416:.3} fs at 4.16 eV"
        ),
    );
}

fn criterion_11(gate: &mut Gate) {
    let mut config = config_for("fig5");
    config.m = 1001;
    let parts = build_simulation(&config).unwrap();
    let times: Vec<f64> = (0..2000).map(|i| 0.25 * i as f64).collect();

    let start_dense = Instant::now();
    let mut ham = assemble(&parts.modes, config.omega0_ev);
    ham.factorize().unwrap();
    let dense = ham.propagate(ONE, ZERO, &times).unwrap();
    let t_dense = start_dense.elapsed().as_secs_f64();

    let start_pm = Instant::now();
    let pm = propagate_pm(&parts.modes, config.omega0_ev, ONE, ZERO, &times).unwrap();
    let t_pm = start_pm.elapsed().as_secs_f64();

    let agreement = max_p1_diff(&dense, &pm);
    let ok = t_dense < 120.0 && t_pm * 2.0 <= t_dense && agreement < 1e-8;
    gate.record(
        11,
        "M = 1001 performance",
        ok,
        format!(
            "dense {t_dense:.1} s (limit 120 s), eigen_pm {t_pm:.1} s ({:.0}× faster), max|Δp1| {agreement:.1e}",
            t_dense / t_pm
        ),
    );
}

#[test]
fn acceptance_criteria() {
    let mut gate = Gate { failures: Vec::new() };
    criterion_01(&mut gate);
    criterion_02(&mut gate);
    criterion_03(&mut gate);
    criterion_04(&mut gate);
    criterion_05(&mut gate);
    criterion_06(&mut gate);
    criterion_07(&mut gate);
    criterion_08(&mut gate);
    criterion_09a(&mut gate);
    criterion_09b(&mut gate);
    criterion_09c(&mut gate);
    criterion_10(&mut gate);
    criterion_11(&mut gate);
    assert!(
        gate.failures.is_empty(),
        "{} acceptance criteria failed:\n{}",
        gate.failures.len(),
        gate.failures.join("\n")
    );
}
