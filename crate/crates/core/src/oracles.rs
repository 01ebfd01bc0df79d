//! Independent reference solvers used to cross-validate the
//! eigen-propagation route.
//!
//! The amplitudes obey the integro-differential pair
//!
//! ```text
//! dc₁/dτ = i ∫₀^τ [K⁺(τ−σ) c₁(σ) + K⁻(τ−σ) c₂(σ)] dσ
//! dc₂/dτ = i ∫₀^τ [K⁻(τ−σ) c₁(σ) + K⁺(τ−σ) c₂(σ)] dσ
//! ```
//!
//! with kernels K±(τ) = i Σᵢ cᵢ± e^{sᵢτ}. This module provides:
//!
//! * a second-order Volterra integrator using trapezoidal product
//!   integration with per-term exponential accumulators (O(N·M) work),
//! * a generic O(N²) variant that accepts arbitrary kernel callbacks,
//! * the closed-form solution for a single-Lorentzian kernel,
//! * the flat-reservoir (Markov) solution.
//!
//! None of these share code with the eigen-propagation path, so agreement
//! between the routes is a meaningful check.

use crate::emde::{EffectiveModeSet, Trajectory};
use crate::errors::{Error, Result};
use crate::units::fs_to_inv_ev;
use num_complex::Complex64;

/// Hard cap on Volterra step counts; exceeding it reports a resource error
/// instead of silently grinding.
pub const MAX_VOLTERRA_STEPS: usize = 1_000_000;

/// A kernel of the form K(τ) = i Σᵢ cᵢ e^{sᵢτ} with real coefficients cᵢ
/// (in eV²) and complex decay exponents sᵢ (in eV); τ is in 1/eV.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    /// Coefficients cᵢ in eV².
    pub coeffs: Vec<f64>,
    /// Exponents sᵢ in eV (purely imaginary for discretized reservoirs).
    pub exponents: Vec<Complex64>,
}

impl ExpSum {
    /// Kernel with no terms: identically zero.
    pub fn empty() -> Self {
        ExpSum {
            coeffs: Vec::new(),
            exponents: Vec::new(),
        }
    }

    /// Number of exponential terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// True when the kernel has no terms.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluate K at a delay given in fs.
    pub fn eval(&self, tau_fs: f64) -> Complex64 {
        let tau = fs_to_inv_ev(tau_fs);
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..self.len() {
            sum += self.coeffs[i] * (self.exponents[i] * tau).exp();
        }
        Complex64::i() * sum
    }

    /// K(0) = i Σᵢ cᵢ.
    fn at_zero(&self) -> Complex64 {
        Complex64::new(0.0, self.coeffs.iter().sum())
    }
}

/// Diagonal (+) and cross (−) kernels of the amplitude equations.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPair {
    /// Kernel multiplying the amplitude's own history.
    pub plus: ExpSum,
    /// Kernel coupling to the partner amplitude's history.
    pub minus: ExpSum,
}

impl KernelPair {
    /// Kernels of a discretized reservoir in the frame rotating at
    /// `omega0_ev`: terms Wᵢ± e^{−i(ωᵢ−ω₀)τ}.
    pub fn from_modes(modes: &EffectiveModeSet, omega0_ev: f64) -> KernelPair {
        let exponents: Vec<Complex64> = modes
            .frequencies
            .iter()
            .map(|w| Complex64::new(0.0, -(w - omega0_ev)))
            .collect();
        KernelPair {
            plus: ExpSum {
                coeffs: modes.weights_plus.clone(),
                exponents: exponents.clone(),
            },
            minus: ExpSum {
                coeffs: modes.weights_minus.clone(),
                exponents,
            },
        }
    }

    /// Single-Lorentzian diagonal kernel K⁺(τ) = i g² e^{−(κ/2 + iδ_c)τ}
    /// with no cross coupling; g², κ, δ_c in eV-based units.
    pub fn lorentzian(g2: f64, kappa: f64, delta_c: f64) -> KernelPair {
        KernelPair {
            plus: ExpSum {
                coeffs: vec![g2],
                exponents: vec![Complex64::new(-kappa / 2.0, -delta_c)],
            },
            minus: ExpSum::empty(),
        }
    }

    /// Evaluate (K⁺, K⁻) at a delay given in fs.
    pub fn eval(&self, tau_fs: f64) -> (Complex64, Complex64) {
        (self.plus.eval(tau_fs), self.minus.eval(tau_fs))
    }
}

fn check_grid(dt_fs: f64, t_max_fs: f64) -> Result<usize> {
    if !(dt_fs > 0.0) || !(t_max_fs >= 0.0) {
        return Err(Error::Domain(format!(
            "need dt > 0 and t_max >= 0, got dt = {dt_fs}, t_max = {t_max_fs}"
        )));
    }
    let n = (t_max_fs / dt_fs).round() as usize;
    if n > MAX_VOLTERRA_STEPS {
        return Err(Error::Resource(format!(
            "Volterra grid needs {n} steps, above the cap of {MAX_VOLTERRA_STEPS}; \
             increase dt or reduce t_max"
        )));
    }
    Ok(n)
}

fn check_norm(a1: Complex64, a2: Complex64) -> Result<()> {
    let norm = a1.norm_sqr() + a2.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "initial amplitudes must satisfy |a1|^2 + |a2|^2 = 1, got {norm}"
        )));
    }
    Ok(())
}

/// Solve the 2×2 system (I − i q K₀) u = r for u, with
/// K₀ = [[kp0, km0], [km0, kp0]].
fn implicit_solve(
    q: f64,
    kp0: Complex64,
    km0: Complex64,
    r: [Complex64; 2],
) -> [Complex64; 2] {
    let a = Complex64::new(1.0, 0.0) - Complex64::i() * q * kp0;
    let b = -Complex64::i() * q * km0;
    let det = a * a - b * b;
    [(a * r[0] - b * r[1]) / det, (a * r[1] - b * r[0]) / det]
}

/// Trapezoidal product-integration solver exploiting the exponential form
/// of the kernels: each term carries a history accumulator that is updated
/// in O(1) per step, so the total cost is O(N·M).
pub fn volterra_solve(
    kernels: &KernelPair,
    a1: Complex64,
    a2: Complex64,
    dt_fs: f64,
    t_max_fs: f64,
) -> Result<Trajectory> {
    check_norm(a1, a2)?;
    let n_steps = check_grid(dt_fs, t_max_fs)?;
    let dt = fs_to_inv_ev(dt_fs);
    let kp0 = kernels.plus.at_zero();
    let km0 = kernels.minus.at_zero();
    let q = dt * dt / 4.0;

    // Per-term step propagators e^{sᵢ dt} and prefactors i cᵢ.
    let prep = |k: &ExpSum| -> (Vec<Complex64>, Vec<Complex64>) {
        let decay = k.exponents.iter().map(|s| (s * dt).exp()).collect();
        let pref = k.coeffs.iter().map(|&c| Complex64::i() * c).collect();
        (decay, pref)
    };
    let (decay_p, pref_p) = prep(&kernels.plus);
    let (decay_m, pref_m) = prep(&kernels.minus);

    // History accumulators Bᵢ[k] = Σⱼ ω̃ⱼ e^{sᵢ(tₙ−tⱼ)} u_k(tⱼ) with
    // trapezoid weights ω̃₀ = dt/2 and dt elsewhere; the dt/2 endpoint
    // correction at the current time enters through the implicit solve.
    let mut acc_p = vec![[Complex64::new(0.0, 0.0); 2]; kernels.plus.len()];
    let mut acc_m = vec![[Complex64::new(0.0, 0.0); 2]; kernels.minus.len()];
    let mut u = [a1, a2];
    for b in acc_p.iter_mut().chain(acc_m.iter_mut()) {
        b[0] = 0.5 * dt * u[0];
        b[1] = 0.5 * dt * u[1];
    }
    let mut udot = [Complex64::new(0.0, 0.0); 2];

    let mut times_fs = Vec::with_capacity(n_steps + 1);
    let mut c1 = Vec::with_capacity(n_steps + 1);
    let mut c2 = Vec::with_capacity(n_steps + 1);
    times_fs.push(0.0);
    c1.push(u[0]);
    c2.push(u[1]);

    for step in 1..=n_steps {
        // Advance the accumulators to the new time and sum the explicit
        // part of each convolution.
        let mut ep = [Complex64::new(0.0, 0.0); 2];
        for (i, b) in acc_p.iter_mut().enumerate() {
            b[0] *= decay_p[i];
            b[1] *= decay_p[i];
            ep[0] += pref_p[i] * b[0];
            ep[1] += pref_p[i] * b[1];
        }
        let mut em = [Complex64::new(0.0, 0.0); 2];
        for (i, b) in acc_m.iter_mut().enumerate() {
            b[0] *= decay_m[i];
            b[1] *= decay_m[i];
            em[0] += pref_m[i] * b[0];
            em[1] += pref_m[i] * b[1];
        }
        let explicit = [ep[0] + em[1], em[0] + ep[1]];
        let r = [
            u[0] + 0.5 * dt * udot[0] + Complex64::i() * 0.5 * dt * explicit[0],
            u[1] + 0.5 * dt * udot[1] + Complex64::i() * 0.5 * dt * explicit[1],
        ];
        let u_new = implicit_solve(q, kp0, km0, r);
        let integral = [
            explicit[0] + 0.5 * dt * (kp0 * u_new[0] + km0 * u_new[1]),
            explicit[1] + 0.5 * dt * (km0 * u_new[0] + kp0 * u_new[1]),
        ];
        udot = [Complex64::i() * integral[0], Complex64::i() * integral[1]];
        u = u_new;
        for b in acc_p.iter_mut().chain(acc_m.iter_mut()) {
            b[0] += dt * u[0];
            b[1] += dt * u[1];
        }
        times_fs.push(step as f64 * dt_fs);
        c1.push(u[0]);
        c2.push(u[1]);
    }
    Ok(Trajectory {
        times_fs,
        c1,
        c2,
        solver_id: "volterra".to_string(),
        metadata: Vec::new(),
    })
}

/// O(N²) reference integrator for arbitrary kernel callbacks (delay in fs).
/// Same trapezoidal product-integration scheme as [`volterra_solve`], but
/// the history sums are recomputed from scratch at every step, so it is
/// independent of the exponential-accumulator bookkeeping.
pub fn volterra_solve_generic(
    k_plus: impl Fn(f64) -> Complex64,
    k_minus: impl Fn(f64) -> Complex64,
    a1: Complex64,
    a2: Complex64,
    dt_fs: f64,
    t_max_fs: f64,
) -> Result<Trajectory> {
    check_norm(a1, a2)?;
    let n_steps = check_grid(dt_fs, t_max_fs)?;
    let dt = fs_to_inv_ev(dt_fs);
    let kp0 = k_plus(0.0);
    let km0 = k_minus(0.0);
    let q = dt * dt / 4.0;

    let mut hist: Vec<[Complex64; 2]> = Vec::with_capacity(n_steps + 1);
    hist.push([a1, a2]);
    let mut udot = [Complex64::new(0.0, 0.0); 2];
    let mut times_fs = vec![0.0];
    let mut c1 = vec![a1];
    let mut c2 = vec![a2];

    for step in 1..=n_steps {
        let mut conv_p = [Complex64::new(0.0, 0.0); 2];
        let mut conv_m = [Complex64::new(0.0, 0.0); 2];
        for (j, uj) in hist.iter().enumerate() {
            let weight = if j == 0 { 0.5 * dt } else { dt };
            let delay_fs = (step - j) as f64 * dt_fs;
            let kp = k_plus(delay_fs);
            let km = k_minus(delay_fs);
            conv_p[0] += weight * kp * uj[0];
            conv_p[1] += weight * kp * uj[1];
            conv_m[0] += weight * km * uj[0];
            conv_m[1] += weight * km * uj[1];
        }
        let explicit = [conv_p[0] + conv_m[1], conv_m[0] + conv_p[1]];
        let u_prev = *hist.last().unwrap();
        let r = [
            u_prev[0] + 0.5 * dt * udot[0] + Complex64::i() * 0.5 * dt * explicit[0],
            u_prev[1] + 0.5 * dt * udot[1] + Complex64::i() * 0.5 * dt * explicit[1],
        ];
        let u_new = implicit_solve(q, kp0, km0, r);
        let integral = [
            explicit[0] + 0.5 * dt * (kp0 * u_new[0] + km0 * u_new[1]),
            explicit[1] + 0.5 * dt * (km0 * u_new[0] + kp0 * u_new[1]),
        ];
        udot = [Complex64::i() * integral[0], Complex64::i() * integral[1]];
        hist.push(u_new);
        times_fs.push(step as f64 * dt_fs);
        c1.push(u_new[0]);
        c2.push(u_new[1]);
    }
    Ok(Trajectory {
        times_fs,
        c1,
        c2,
        solver_id: "volterra_generic".to_string(),
        metadata: Vec::new(),
    })
}

/// Closed-form amplitude for a single-Lorentzian kernel with c(0) = 1,
/// ċ(0) = 0: the roots of s² + hs + g² = 0 with h = κ/2 + iδ_c give
/// c(τ) = [−s₋ e^{s₊τ} + s₊ e^{s₋τ}]/(s₊ − s₋), handling the critically
/// damped double root as a limit.
pub fn lorentzian_analytic(g2: f64, kappa: f64, delta_c: f64, t_fs: f64) -> Complex64 {
    let tau = fs_to_inv_ev(t_fs);
    let h = Complex64::new(kappa / 2.0, delta_c);
    let disc = h * h - 4.0 * g2;
    let scale = h.norm_sqr() + 4.0 * g2.abs();
    if disc.norm() < 1e-24 * scale {
        return (-h * tau / 2.0).exp() * (1.0 + h * tau / 2.0);
    }
    let root = disc.sqrt();
    let s_p = (-h + root) / 2.0;
    let s_m = (-h - root) / 2.0;
    (-s_m * (s_p * tau).exp() + s_p * (s_m * tau).exp()) / (s_p - s_m)
}

/// Flat-reservoir (Markov) amplitudes: the symmetric and antisymmetric
/// combinations decay at rates π(J⁺ ± J⁻) per unit τ, giving
/// cₖ(t) from initial (a1, a2). J± are the flat density values in eV.
pub fn markov_solution(
    j_plus: f64,
    j_minus: f64,
    a1: Complex64,
    a2: Complex64,
    t_fs: f64,
) -> (Complex64, Complex64) {
    let tau = fs_to_inv_ev(t_fs);
    let fp = (-std::f64::consts::PI * (j_plus + j_minus) * tau).exp();
    let fm = (-std::f64::consts::PI * (j_plus - j_minus) * tau).exp();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cp = (a1 + a2) * s * fp;
    let cm = (a1 - a2) * s * fm;
    ((cp + cm) * s, (cp - cm) * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::HBAR_EV_FS;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// dc/dτ of the closed-form Lorentzian solution:
    /// ċ = −g² (e^{s₊τ} − e^{s₋τ})/(s₊ − s₋).
    fn lorentzian_analytic_derivative(
        g2: f64,
        kappa: f64,
        delta_c: f64,
        t_fs: f64,
    ) -> Complex64 {
        let tau = fs_to_inv_ev(t_fs);
        let h = Complex64::new(kappa / 2.0, delta_c);
        let root = (h * h - 4.0 * g2).sqrt();
        let s_p = (-h + root) / 2.0;
        let s_m = (-h - root) / 2.0;
        -g2 * ((s_p * tau).exp() - (s_m * tau).exp()) / (s_p - s_m)
    }

    #[test]
    fn zero_kernels_keep_the_amplitudes_constant() {
        let kernels = KernelPair {
            plus: ExpSum::empty(),
            minus: ExpSum::empty(),
        };
        let traj = volterra_solve(&kernels, c(0.6, 0.0), c(0.0, 0.8), 0.1, 10.0).unwrap();
        for i in 0..traj.len() {
            assert_eq!(traj.c1[i], c(0.6, 0.0));
            assert_eq!(traj.c2[i], c(0.0, 0.8));
        }
    }

    #[test]
    fn kernels_from_modes_match_the_mode_set_reconstruction() {
        let modes = EffectiveModeSet::from_parts(
            vec![3.6, 3.9, 4.2],
            vec![0.01, 0.03, 0.02],
            vec![0.005, -0.01, 0.02],
            (3.5, 4.5),
        )
        .unwrap();
        let kernels = KernelPair::from_modes(&modes, 3.84);
        for t in [0.0, 1.7, 25.0, 333.0] {
            assert_eq!(kernels.eval(t), modes.kernel_pair(3.84, t));
        }
    }

    #[test]
    fn volterra_matches_the_lorentzian_analytic_solution() {
        let (g2, kappa, delta_c) = (0.01, 0.05, 0.02);
        let kernels = KernelPair::lorentzian(g2, kappa, delta_c);
        let traj = volterra_solve(&kernels, c(1.0, 0.0), c(0.0, 0.0), 0.01, 100.0).unwrap();
        let mut worst = 0.0f64;
        for i in 0..traj.len() {
            let exact = lorentzian_analytic(g2, kappa, delta_c, traj.times_fs[i]);
            worst = worst.max((traj.c1[i] - exact).norm());
            assert!(traj.c2[i].norm() < 1e-14, "cross kernel is zero");
        }
        assert!(worst < 1e-3, "max amplitude error {worst}");
    }

    #[test]
    fn volterra_error_shrinks_quadratically_with_the_step() {
        let (g2, kappa, delta_c) = (0.01, 0.05, 0.0);
        let kernels = KernelPair::lorentzian(g2, kappa, delta_c);
        let err_at = |dt: f64| -> f64 {
            let traj = volterra_solve(&kernels, c(1.0, 0.0), c(0.0, 0.0), dt, 60.0).unwrap();
            let mut worst = 0.0f64;
            for i in 0..traj.len() {
                let exact = lorentzian_analytic(g2, kappa, delta_c, traj.times_fs[i]);
                worst = worst.max((traj.c1[i] - exact).norm());
            }
            worst
        };
        let coarse = err_at(0.08);
        let fine = err_at(0.04);
        assert!(
            coarse / fine > 2.5,
            "expected ~4x error reduction, got {coarse} / {fine} = {}",
            coarse / fine
        );
    }

    #[test]
    fn generic_route_matches_the_exponential_route() {
        let modes = EffectiveModeSet::from_parts(
            (0..11).map(|i| 3.55 + 0.09 * i as f64).collect(),
            (0..11).map(|i| 2e-3 * (1.0 + (i % 3) as f64)).collect(),
            (0..11).map(|i| 1e-3 * (1.0 + (i % 2) as f64)).collect(),
            (3.5, 4.5),
        )
        .unwrap();
        let kernels = KernelPair::from_modes(&modes, 3.9);
        let a1 = c(0.8, 0.0);
        let a2 = c(0.0, 0.6);
        let fast = volterra_solve(&kernels, a1, a2, 0.05, 20.0).unwrap();
        let kp = kernels.plus.clone();
        let km = kernels.minus.clone();
        let slow =
            volterra_solve_generic(|t| kp.eval(t), |t| km.eval(t), a1, a2, 0.05, 20.0).unwrap();
        let mut worst = 0.0f64;
        for i in 0..fast.len() {
            worst = worst
                .max((fast.c1[i] - slow.c1[i]).norm())
                .max((fast.c2[i] - slow.c2[i]).norm());
        }
        assert!(worst < 1e-9, "route disagreement {worst}");
    }

    #[test]
    fn analytic_solution_satisfies_the_integral_equation() {
        // Residual check at a few times: dc/dτ − i ∫ K(τ−σ) c(σ) dσ = 0,
        // with the history integral done by Simpson's rule.
        let (g2, kappa, delta_c) = (0.01, 0.05, 0.02);
        let kernels = KernelPair::lorentzian(g2, kappa, delta_c);
        for &t_fs in &[5.0, 17.0, 30.0] {
            let n = 2000usize; // even
            let h_fs = t_fs / n as f64;
            let mut integral = Complex64::new(0.0, 0.0);
            for j in 0..=n {
                let weight = if j == 0 || j == n {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let sigma = j as f64 * h_fs;
                let k = kernels.plus.eval(t_fs - sigma);
                let cs = lorentzian_analytic(g2, kappa, delta_c, sigma);
                integral += weight * k * cs;
            }
            integral *= fs_to_inv_ev(h_fs) / 3.0;
            let lhs = lorentzian_analytic_derivative(g2, kappa, delta_c, t_fs);
            let residual = (lhs - Complex64::i() * integral).norm();
            assert!(residual < 1e-8, "residual {residual} at t = {t_fs} fs");
        }
    }

    #[test]
    fn analytic_solution_starts_at_one_with_zero_slope() {
        let c0 = lorentzian_analytic(0.01, 0.05, 0.02, 0.0);
        assert!((c0 - c(1.0, 0.0)).norm() < 1e-14);
        let d0 = lorentzian_analytic_derivative(0.01, 0.05, 0.02, 0.0);
        assert!(d0.norm() < 1e-14);
    }

    #[test]
    fn undamped_resonant_kernel_gives_a_cosine() {
        let g = 0.1;
        for &t_fs in &[0.0, 7.0, 20.7, 41.36, 100.0] {
            let exact = (g * fs_to_inv_ev(t_fs)).cos();
            let got = lorentzian_analytic(g * g, 0.0, 0.0, t_fs);
            assert!((got - c(exact, 0.0)).norm() < 1e-12, "t = {t_fs} fs");
        }
    }

    #[test]
    fn resonant_solution_matches_the_hyperbolic_form() {
        // Independent form of the resonant (δ_c = 0) solution obtained from
        // the Laplace transform: c(τ) = e^{−κτ/4}[cosh(Ωτ) + κ/(4Ω) sinh(Ωτ)]
        // with Ω = sqrt((κ/4)² − g²) continued to imaginary values.
        let (g2, kappa) = (0.01, 0.05);
        let omega = Complex64::new((kappa / 4.0) * (kappa / 4.0) - g2, 0.0).sqrt();
        for &t_fs in &[0.0, 3.0, 12.5, 47.0, 90.0] {
            let tau = fs_to_inv_ev(t_fs);
            let hyper = (-kappa * tau / 4.0).exp()
                * ((omega * tau).cosh() + kappa / 4.0 / omega * (omega * tau).sinh());
            let got = lorentzian_analytic(g2, kappa, 0.0, t_fs);
            assert!((got - hyper).norm() < 1e-12, "t = {t_fs} fs: {got} vs {hyper}");
        }
    }

    #[test]
    fn critically_damped_branch_is_continuous() {
        // h² = 4g² exactly: κ = 4g, δ_c = 0.
        let g = 0.05;
        let exact = lorentzian_analytic(g * g, 4.0 * g, 0.0, 30.0);
        // Slightly off-critical must approach the degenerate limit.
        let near = lorentzian_analytic(g * g * (1.0 + 1e-9), 4.0 * g, 0.0, 30.0);
        assert!((exact - near).norm() < 1e-6, "{exact} vs {near}");
    }

    #[test]
    fn volterra_reproduces_rabi_oscillations_for_a_single_mode() {
        let w = 0.01;
        let modes =
            EffectiveModeSet::from_parts(vec![3.9], vec![w], vec![0.0], (3.5, 4.5)).unwrap();
        let kernels = KernelPair::from_modes(&modes, 3.9);
        let traj = volterra_solve(&kernels, c(1.0, 0.0), c(0.0, 0.0), 0.01, 41.36).unwrap();
        let mut worst = 0.0f64;
        for i in 0..traj.len() {
            let expected = (w.sqrt() * fs_to_inv_ev(traj.times_fs[i])).cos().powi(2);
            worst = worst.max((traj.p1(i) - expected).abs());
        }
        assert!(worst < 1e-4, "max population error {worst}");
    }

    #[test]
    fn markov_amplitudes_decay_at_the_golden_rule_rate() {
        // For a two-level emitter in free space the flat density is
        // J = Γ₀/(2π), so p(t) = e^{−Γ₀ t/ħ} = e^{−t/τ₀}.
        let tau0_fs = 100.0;
        let gamma0 = HBAR_EV_FS / tau0_fs;
        let j = gamma0 / (2.0 * std::f64::consts::PI);
        for &t in &[0.0, 25.0, 100.0, 400.0] {
            let (c1, c2) = markov_solution(j, 0.0, c(1.0, 0.0), c(0.0, 0.0), t);
            let expected = (-t / tau0_fs).exp();
            assert!((c1.norm_sqr() - expected).abs() < 1e-12, "t = {t}");
            assert!(c2.norm() < 1e-15);
        }
    }

    #[test]
    fn markov_antisymmetric_state_freezes_when_cross_equals_diagonal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let j = 1e-3;
        let (c1, c2) = markov_solution(j, j, c(s, 0.0), c(-s, 0.0), 1000.0);
        assert!((c1 - c(s, 0.0)).norm() < 1e-12);
        assert!((c2 - c(-s, 0.0)).norm() < 1e-12);
        // The symmetric state decays at twice the single-channel rate.
        let (d1, _) = markov_solution(j, j, c(s, 0.0), c(s, 0.0), 1000.0);
        let tau = fs_to_inv_ev(1000.0);
        let expected = s * (-2.0 * std::f64::consts::PI * j * tau).exp();
        assert!((d1.re - expected).abs() < 1e-12);
    }

    #[test]
    fn markov_without_cross_coupling_never_mixes_the_states() {
        let (c1, c2) = markov_solution(2e-3, 0.0, c(1.0, 0.0), c(0.0, 0.0), 500.0);
        assert!(c2.norm() < 1e-15);
        assert!(c1.im.abs() < 1e-15);
        assert!(c1.re < 1.0 && c1.re > 0.0);
    }

    #[test]
    fn step_count_above_the_cap_is_a_resource_error() {
        let kernels = KernelPair::lorentzian(0.01, 0.05, 0.0);
        let err = volterra_solve(&kernels, c(1.0, 0.0), c(0.0, 0.0), 1e-6, 10.0).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn volterra_rejects_unnormalized_initial_states() {
        let kernels = KernelPair::lorentzian(0.01, 0.05, 0.0);
        let err = volterra_solve(&kernels, c(1.0, 0.0), c(1.0, 0.0), 0.1, 1.0).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
