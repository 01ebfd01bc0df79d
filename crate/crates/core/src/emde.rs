//! Effective-mode discretization and eigen-propagation of the amplitudes.
//!
//! The memory kernels K±(τ) = i Σᵢ Wᵢ± e^{−i(ωᵢ−ω₀)τ} obtained by
//! discretizing the spectral densities turn the integro-differential
//! amplitude equations into a linear system of 2(M+1) ordinary differential
//! equations: two emitter amplitudes plus one auxiliary amplitude per mode
//! and per emitter state. One eigendecomposition then yields the state at
//! arbitrary times without time-stepping.
//!
//! Two equivalent propagation routes are provided. The dense route
//! diagonalizes the full real non-Hermitian 2(M+1) matrix. The ± route
//! rotates to c± = (c₁ ± c₂)/√2, which decouples the system into two
//! independent chains with non-negative weights 2W^rad and 2W^tan; scaling
//! each auxiliary amplitude by the square root of its weight makes the
//! chain generator a real symmetric arrowhead matrix, so its spectrum is
//! exactly real and the eigenproblem costs a quarter of the dense one.

use crate::eigsolve::{gen_eig, lu_solve_complex, sym_eig, SymEig};
use crate::errors::{Error, Result};
use crate::ioutil::atomic_write;
use crate::spectral::SpectralDensityModel;
use crate::units::fs_to_inv_ev;
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

/// Discretized reservoir: mode frequencies and kernel weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveModeSet {
    /// Mode frequencies ωᵢ in eV, strictly increasing.
    pub frequencies: Vec<f64>,
    /// Diagonal-kernel weights Wᵢ⁺ in eV².
    pub weights_plus: Vec<f64>,
    /// Cross-kernel weights Wᵢ⁻ in eV² (|Wᵢ⁻| ≤ Wᵢ⁺).
    pub weights_minus: Vec<f64>,
    /// Frequency band the modes were drawn from.
    pub band: (f64, f64),
}

impl EffectiveModeSet {
    /// Validate and construct from explicit arrays.
    pub fn from_parts(
        frequencies: Vec<f64>,
        weights_plus: Vec<f64>,
        weights_minus: Vec<f64>,
        band: (f64, f64),
    ) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::Domain("mode set must be non-empty".into()));
        }
        if frequencies.len() != weights_plus.len() || frequencies.len() != weights_minus.len() {
            return Err(Error::Domain(format!(
                "mode arrays must have equal lengths, got {} frequencies, {} plus weights, {} minus weights",
                frequencies.len(),
                weights_plus.len(),
                weights_minus.len()
            )));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "mode frequencies must be strictly increasing".into(),
            ));
        }
        for i in 0..frequencies.len() {
            if !(weights_plus[i].is_finite() && weights_minus[i].is_finite()) {
                return Err(Error::Domain(format!("non-finite weight at mode {i}")));
            }
            if weights_plus[i] < weights_minus[i].abs() {
                return Err(Error::Domain(format!(
                    "mode {i} violates W+ >= |W-|: {} < |{}|",
                    weights_plus[i], weights_minus[i]
                )));
            }
        }
        if !(band.0 < band.1) {
            return Err(Error::Domain(format!(
                "band must satisfy lo < hi, got [{}, {}]",
                band.0, band.1
            )));
        }
        Ok(EffectiveModeSet {
            frequencies,
            weights_plus,
            weights_minus,
            band,
        })
    }

    /// Number of modes M.
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    /// True when the set has no modes.
    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Reconstructed kernels (K⁺, K⁻) at delay `tau_fs`, in the frame
    /// rotating at `omega0_ev`: K±(τ) = i Σᵢ Wᵢ± e^{−i(ωᵢ−ω₀)τ}.
    pub fn kernel_pair(&self, omega0_ev: f64, tau_fs: f64) -> (Complex64, Complex64) {
        let tau = fs_to_inv_ev(tau_fs);
        let mut kp = Complex64::new(0.0, 0.0);
        let mut km = Complex64::new(0.0, 0.0);
        for i in 0..self.len() {
            let phase = Complex64::new(0.0, -(self.frequencies[i] - omega0_ev) * tau).exp();
            kp += self.weights_plus[i] * phase;
            km += self.weights_minus[i] * phase;
        }
        (Complex64::i() * kp, Complex64::i() * km)
    }
}

/// Midpoint-rule discretization of a density model into M modes:
/// ωᵢ = ω_lo + (i − ½)Δω and Wᵢ± = J±(ωᵢ)·Δω.
pub fn discretize(model: &SpectralDensityModel, m: usize) -> Result<EffectiveModeSet> {
    let band = model.band;
    discretize_fn(
        |w| model.mode_densities(w).map(|d| d.0),
        |w| model.mode_densities(w).map(|d| d.1),
        band,
        m,
    )
}

/// Midpoint-rule discretization of arbitrary density callbacks (used for
/// synthetic reservoirs: Lorentzian, flat, …).
pub fn discretize_fn(
    j_plus: impl Fn(f64) -> Result<f64>,
    j_minus: impl Fn(f64) -> Result<f64>,
    band: (f64, f64),
    m: usize,
) -> Result<EffectiveModeSet> {
    if m < 1 {
        return Err(Error::Domain(format!("mode count must be >= 1, got {m}")));
    }
    if !(band.0 < band.1) {
        return Err(Error::Domain(format!(
            "band must satisfy lo < hi, got [{}, {}]",
            band.0, band.1
        )));
    }
    let dw = (band.1 - band.0) / m as f64;
    let mut frequencies = Vec::with_capacity(m);
    let mut weights_plus = Vec::with_capacity(m);
    let mut weights_minus = Vec::with_capacity(m);
    for i in 0..m {
        let w = band.0 + (i as f64 + 0.5) * dw;
        frequencies.push(w);
        weights_plus.push(j_plus(w)? * dw);
        weights_minus.push(j_minus(w)? * dw);
    }
    EffectiveModeSet::from_parts(frequencies, weights_plus, weights_minus, band)
}

/// Eigendecomposition of the coupled system, in the conventions of the
/// stored matrix: eigenvalues λⱼ and right-eigenvector columns L.
pub struct Factorization {
    /// Eigenvalues λⱼ (imaginary parts are numerical noise: the system is
    /// similar to a pair of real symmetric chains).
    pub eigenvalues: Vec<Complex64>,
    /// Right eigenvectors as columns, column-major, length dim².
    pub l_matrix: Vec<Complex64>,
}

/// The time-independent generator of the coupled amplitude + mode system.
pub struct EffectiveHamiltonian {
    /// Emitter transition energy in eV.
    pub omega0_ev: f64,
    /// Matrix dimension 2(M+1) after dropping fully decoupled modes.
    pub dim: usize,
    frequencies: Vec<f64>,
    weights_plus: Vec<f64>,
    weights_minus: Vec<f64>,
    factorization: Option<Factorization>,
}

/// Build the coupled-system matrix from a mode set. Modes whose weights
/// both vanish are exactly decoupled and are dropped here.
pub fn assemble(modes: &EffectiveModeSet, omega0_ev: f64) -> EffectiveHamiltonian {
    let mut frequencies = Vec::new();
    let mut weights_plus = Vec::new();
    let mut weights_minus = Vec::new();
    for i in 0..modes.len() {
        if modes.weights_plus[i] == 0.0 && modes.weights_minus[i] == 0.0 {
            continue;
        }
        frequencies.push(modes.frequencies[i]);
        weights_plus.push(modes.weights_plus[i]);
        weights_minus.push(modes.weights_minus[i]);
    }
    let dim = 2 * (frequencies.len() + 1);
    EffectiveHamiltonian {
        omega0_ev,
        dim,
        frequencies,
        weights_plus,
        weights_minus,
        factorization: None,
    }
}

impl EffectiveHamiltonian {
    /// Number of retained modes.
    pub fn mode_count(&self) -> usize {
        self.frequencies.len()
    }

    /// Dense row-major rendering of the matrix, ordered
    /// (c₁, c₂, 𝒥₁¹..𝒥_M¹, 𝒥₁²..𝒥_M²): diagonal (ω₀, ω₀, ωᵢ…, ωᵢ…), unit
    /// couplings from each emitter amplitude to its own auxiliary block,
    /// and weight rows (Wᵢ⁺, Wᵢ⁻) / (Wᵢ⁻, Wᵢ⁺) feeding back.
    pub fn matrix(&self) -> Vec<f64> {
        let m = self.mode_count();
        let dim = self.dim;
        let mut h = vec![0.0; dim * dim];
        h[0] = self.omega0_ev;
        h[dim + 1] = self.omega0_ev;
        for i in 0..m {
            h[2 + i] = 1.0;
            h[dim + 2 + m + i] = 1.0;
            let r1 = (2 + i) * dim;
            h[r1] = self.weights_plus[i];
            h[r1 + 1] = self.weights_minus[i];
            h[r1 + 2 + i] = self.frequencies[i];
            let r2 = (2 + m + i) * dim;
            h[r2] = self.weights_minus[i];
            h[r2 + 1] = self.weights_plus[i];
            h[r2 + 2 + m + i] = self.frequencies[i];
        }
        h
    }

    /// Compute and cache the eigendecomposition.
    ///
    /// Internally the solver works in the frame rotating at ω₀ with the
    /// auxiliary amplitudes sign-flipped — a similarity transform that
    /// removes the fast global phase and maps eigenpairs one-to-one:
    /// a rotating-frame eigenvalue θ corresponds to λ = ω₀ − θ here.
    pub fn factorize(&mut self) -> Result<()> {
        if self.factorization.is_some() {
            return Ok(());
        }
        let m = self.mode_count();
        let dim = self.dim;
        // Column-major rotating-frame generator: zeros on the emitter
        // diagonal, −(ωᵢ − ω₀) on the mode diagonal, couplings unchanged.
        let mut a = vec![0.0f64; dim * dim];
        for i in 0..m {
            let delta = self.frequencies[i] - self.omega0_ev;
            a[(2 + i) * dim] = 1.0; // row 0 ← coupling to first aux block
            a[(2 + m + i) * dim + 1] = 1.0; // row 1 ← second aux block
            a[2 + i] = self.weights_plus[i]; // column 0
            a[2 + m + i] = self.weights_minus[i];
            a[dim + 2 + i] = self.weights_minus[i]; // column 1
            a[dim + 2 + m + i] = self.weights_plus[i];
            a[(2 + i) * dim + 2 + i] = -delta;
            a[(2 + m + i) * dim + 2 + m + i] = -delta;
        }
        let eig = gen_eig(a, dim)?;
        let mut eigenvalues = Vec::with_capacity(dim);
        for theta in &eig.values {
            eigenvalues.push(Complex64::new(self.omega0_ev, 0.0) - theta);
        }
        // Undo the sign flip of the auxiliary rows to express the
        // eigenvectors in the stored-matrix convention.
        let mut l_matrix = eig.vectors;
        for col in 0..dim {
            for row in 2..dim {
                l_matrix[col * dim + row] = -l_matrix[col * dim + row];
            }
        }
        self.factorization = Some(Factorization {
            eigenvalues,
            l_matrix,
        });
        Ok(())
    }

    /// Access the cached eigendecomposition, if computed.
    pub fn factorization(&self) -> Option<&Factorization> {
        self.factorization.as_ref()
    }

    /// Propagate the emitter amplitudes from (a₁, a₂) (auxiliary
    /// amplitudes start at zero) and sample them at `times_fs`.
    pub fn propagate(
        &mut self,
        a1: Complex64,
        a2: Complex64,
        times_fs: &[f64],
    ) -> Result<Trajectory> {
        check_initial_norm(a1, a2)?;
        self.factorize()?;
        let dim = self.dim;
        let fact = self.factorization.as_ref().unwrap();
        // Solve L w = u(0); the initial state has zero auxiliary entries,
        // so the frame sign-flip leaves it unchanged.
        let mut u0 = vec![Complex64::new(0.0, 0.0); dim];
        u0[0] = a1;
        u0[1] = a2;
        let w = lu_solve_complex(fact.l_matrix.clone(), u0, dim)?;
        let thetas: Vec<Complex64> = fact
            .eigenvalues
            .iter()
            .map(|lam| Complex64::new(self.omega0_ev, 0.0) - lam)
            .collect();
        let mut c1 = Vec::with_capacity(times_fs.len());
        let mut c2 = Vec::with_capacity(times_fs.len());
        for &t_fs in times_fs {
            let tau = fs_to_inv_ev(t_fs);
            let mut s1 = Complex64::new(0.0, 0.0);
            let mut s2 = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                let phase = (Complex64::i() * thetas[j] * tau).exp() * w[j];
                s1 += fact.l_matrix[j * dim] * phase;
                s2 += fact.l_matrix[j * dim + 1] * phase;
            }
            c1.push(s1);
            c2.push(s2);
        }
        Ok(Trajectory {
            times_fs: times_fs.to_vec(),
            c1,
            c2,
            solver_id: "eigen".to_string(),
            metadata: Vec::new(),
        })
    }
}

fn check_initial_norm(a1: Complex64, a2: Complex64) -> Result<()> {
    let norm = a1.norm_sqr() + a2.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "initial amplitudes must satisfy |a1|^2 + |a2|^2 = 1, got {norm}"
        )));
    }
    Ok(())
}

/// One decoupled sector after the ± rotation: a single amplitude coupled
/// to modes with non-negative weights (zero-weight modes are dropped so
/// the square-root scaling is well defined).
#[derive(Debug, Clone, PartialEq)]
pub struct PmChain {
    /// Emitter transition energy in eV.
    pub omega0_ev: f64,
    /// Mode detunings ωᵢ − ω₀ in eV for the retained modes.
    pub deltas: Vec<f64>,
    /// Chain weights (2W^rad for the + sector, 2W^tan for the −) in eV².
    pub weights: Vec<f64>,
}

/// Rotate to c± = (c₁ ± c₂)/√2, yielding two independent chains with
/// weights Wᵢ⁺ ± Wᵢ⁻.
pub fn decouple_pm(modes: &EffectiveModeSet, omega0_ev: f64) -> (PmChain, PmChain) {
    let build = |sign: f64| {
        let mut deltas = Vec::new();
        let mut weights = Vec::new();
        for i in 0..modes.len() {
            let w = modes.weights_plus[i] + sign * modes.weights_minus[i];
            if w > 0.0 {
                deltas.push(modes.frequencies[i] - omega0_ev);
                weights.push(w);
            }
        }
        PmChain {
            omega0_ev,
            deltas,
            weights,
        }
    };
    (build(1.0), build(-1.0))
}

/// Factorized chain: spectrum and orthonormal eigenvectors of the real
/// symmetric arrowhead generator in scaled coordinates.
pub struct ChainEig {
    dim: usize,
    thetas: Vec<f64>,
    vectors: Vec<f64>,
}

impl PmChain {
    /// Diagonalize the arrowhead matrix [[0, √wᵀ], [√w, −diag(δ)]].
    pub fn factorize(&self) -> Result<ChainEig> {
        let m = self.deltas.len();
        let n = m + 1;
        if m == 0 {
            return Ok(ChainEig {
                dim: 1,
                thetas: vec![0.0],
                vectors: vec![1.0],
            });
        }
        let mut s = vec![0.0f64; n * n];
        for i in 0..m {
            let sq = self.weights[i].sqrt();
            s[(1 + i) * n] = sq; // (row 0, col 1+i)
            s[1 + i] = sq; // (row 1+i, col 0)
            s[(1 + i) * n + 1 + i] = -self.deltas[i];
        }
        let SymEig { values, vectors } = sym_eig(s, n)?;
        Ok(ChainEig {
            dim: n,
            thetas: values,
            vectors,
        })
    }
}

impl ChainEig {
    /// Real eigenvalues of the chain generator (rotating frame).
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Amplitude transfer factor: c(t)/c(0) = Σⱼ v₀ⱼ² e^{iθⱼτ}.
    pub fn amplitude_factor(&self, t_fs: f64) -> Complex64 {
        let tau = fs_to_inv_ev(t_fs);
        let n = self.dim;
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let v0 = self.vectors[j * n];
            sum += v0 * v0 * Complex64::new(0.0, self.thetas[j] * tau).exp();
        }
        sum
    }

    /// Squared norm of the full scaled chain state at time `t_fs` for an
    /// initial sector amplitude `c0`: |c(t)|² + Σᵢ|bᵢ(t)|². Exactly
    /// conserved in exact arithmetic because the scaled generator is
    /// symmetric.
    pub fn state_norm_sqr(&self, c0: Complex64, t_fs: f64) -> f64 {
        let tau = fs_to_inv_ev(t_fs);
        let n = self.dim;
        let coeffs: Vec<Complex64> = (0..n)
            .map(|j| {
                self.vectors[j * n] * Complex64::new(0.0, self.thetas[j] * tau).exp() * c0
            })
            .collect();
        let mut norm = 0.0;
        for k in 0..n {
            let mut u = Complex64::new(0.0, 0.0);
            for (j, cj) in coeffs.iter().enumerate() {
                u += self.vectors[j * n + k] * cj;
            }
            norm += u.norm_sqr();
        }
        norm
    }
}

/// Propagate through the two decoupled chains and reassemble c₁, c₂.
pub fn propagate_pm(
    modes: &EffectiveModeSet,
    omega0_ev: f64,
    a1: Complex64,
    a2: Complex64,
    times_fs: &[f64],
) -> Result<Trajectory> {
    check_initial_norm(a1, a2)?;
    let (chain_plus, chain_minus) = decouple_pm(modes, omega0_ev);
    let eig_plus = chain_plus.factorize()?;
    let eig_minus = chain_minus.factorize()?;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let cp0 = (a1 + a2) * inv_sqrt2;
    let cm0 = (a1 - a2) * inv_sqrt2;
    let mut c1 = Vec::with_capacity(times_fs.len());
    let mut c2 = Vec::with_capacity(times_fs.len());
    for &t_fs in times_fs {
        let cp = cp0 * eig_plus.amplitude_factor(t_fs);
        let cm = cm0 * eig_minus.amplitude_factor(t_fs);
        c1.push((cp + cm) * inv_sqrt2);
        c2.push((cp - cm) * inv_sqrt2);
    }
    Ok(Trajectory {
        times_fs: times_fs.to_vec(),
        c1,
        c2,
        solver_id: "eigen_pm".to_string(),
        metadata: Vec::new(),
    })
}

/// Sampled emitter amplitudes on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times in fs.
    pub times_fs: Vec<f64>,
    /// Amplitude of excited state 1.
    pub c1: Vec<Complex64>,
    /// Amplitude of excited state 2.
    pub c2: Vec<Complex64>,
    /// Which solver produced this trajectory.
    pub solver_id: String,
    /// `key = value` pairs emitted as `#` comment lines in the CSV.
    pub metadata: Vec<(String, String)>,
}

impl Trajectory {
    /// Number of samples.
    pub fn len(&self) -> usize {
        self.times_fs.len()
    }

    /// True when the trajectory has no samples.
    pub fn is_empty(&self) -> bool {
        self.times_fs.is_empty()
    }

    /// Population of excited state 1 at sample `i`.
    pub fn p1(&self, i: usize) -> f64 {
        self.c1[i].norm_sqr()
    }

    /// Population of excited state 2 at sample `i`.
    pub fn p2(&self, i: usize) -> f64 {
        self.c2[i].norm_sqr()
    }

    /// Total excited-state population p1 + p2 at sample `i`.
    pub fn total_population(&self, i: usize) -> f64 {
        self.p1(i) + self.p2(i)
    }

    /// First strict local minimum of p1: returns (time, value).
    pub fn first_local_minimum_p1(&self) -> Option<(f64, f64)> {
        for i in 1..self.len().saturating_sub(1) {
            let (a, b, c) = (self.p1(i - 1), self.p1(i), self.p1(i + 1));
            if b < a && b < c {
                return Some((self.times_fs[i], b));
            }
        }
        None
    }

    /// Keep every `stride`-th sample (the first is always kept).
    pub fn decimated(&self, stride: usize) -> Trajectory {
        let stride = stride.max(1);
        let pick = |v: &[f64]| v.iter().copied().step_by(stride).collect::<Vec<_>>();
        let pick_c = |v: &[Complex64]| v.iter().copied().step_by(stride).collect::<Vec<_>>();
        Trajectory {
            times_fs: pick(&self.times_fs),
            c1: pick_c(&self.c1),
            c2: pick_c(&self.c2),
            solver_id: self.solver_id.clone(),
            metadata: self.metadata.clone(),
        }
    }

    /// CSV rendering: `#` metadata lines, a header, then one row per sample.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# solver = {}", self.solver_id).unwrap();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        writeln!(out, "t_fs,p1,p2,re_c1,im_c1,re_c2,im_c2,norm").unwrap();
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.times_fs[i],
                self.p1(i),
                self.p2(i),
                self.c1[i].re,
                self.c1[i].im,
                self.c2[i].re,
                self.c2[i].im,
                self.total_population(i)
            )
            .unwrap();
        }
        out
    }

    /// Write the CSV atomically.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_csv_string())
    }
}

/// Uniform output grid 0, dt, 2dt, … up to and including `t_max_fs`
/// (within rounding).
pub fn time_grid(t_max_fs: f64, dt_fs: f64) -> Result<Vec<f64>> {
    if !(t_max_fs >= 0.0) || !(dt_fs > 0.0) {
        return Err(Error::Domain(format!(
            "time grid needs t_max >= 0 and dt > 0, got t_max = {t_max_fs}, dt = {dt_fs}"
        )));
    }
    let n = (t_max_fs / dt_fs + 0.5).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * dt_fs).collect())
}
