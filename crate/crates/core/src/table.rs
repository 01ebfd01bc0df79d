//! Gridded enhancement factors with bilinear interpolation and a disk cache.
//!
//! Building a table evaluates the Mie series once per (ω, D) node; lookups
//! inside the grid hull interpolate bilinearly and reproduce node values
//! exactly at the nodes. The cache is a versioned plain-text format whose
//! numbers are written in shortest round-trip form, so serialize →
//! deserialize is bit-identical.

use crate::errors::{Error, Result};
use crate::ioutil::atomic_write;
use crate::mie::SphereSpec;
use std::fmt::Write as _;
use std::path::Path;

/// First line of every cache file; bump the version on format changes.
const CACHE_HEADER: &str = "plasmon-emit-enhancement-cache v1";

/// Decay-rate enhancement factors λ⊥, λ∥ tabulated over an (ω, D) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhancementTable {
    /// Sphere the table was computed for (provenance).
    pub sphere: SphereSpec,
    /// Series hard cap used at build time (provenance).
    pub truncation: usize,
    /// Strictly increasing photon energies in eV.
    pub omega_grid: Vec<f64>,
    /// Strictly increasing surface-to-emitter distances in nm.
    pub distance_grid: Vec<f64>,
    /// Row-major λ⊥ values, row = ω index, column = D index.
    pub lambda_perp: Vec<f64>,
    /// Row-major λ∥ values, same layout.
    pub lambda_par: Vec<f64>,
}

fn check_grid(name: &str, grid: &[f64], require_positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain(format!("{name} grid must be non-empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("{name} grid contains non-finite values")));
    }
    if require_positive && grid[0] <= 0.0 {
        return Err(Error::Domain(format!(
            "{name} grid values must be positive, got {}",
            grid[0]
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!(
            "{name} grid must be strictly increasing"
        )));
    }
    Ok(())
}

/// Locate the interpolation cell for `v` in a strictly increasing grid:
/// returns (lower index, fractional position). Exact grid nodes produce a
/// fraction of exactly 0.0 (or 1.0 at the last node).
fn bracket(grid: &[f64], v: f64) -> Option<(usize, f64)> {
    let n = grid.len();
    if v < grid[0] || v > grid[n - 1] {
        return None;
    }
    if n == 1 {
        return Some((0, 0.0));
    }
    let mut i = grid.partition_point(|&g| g <= v);
    // partition_point returns the count of nodes <= v, so v sits in cell i-1.
    if i == n {
        i = n - 1; // v equals the last node
    }
    let lo = i - 1;
    let t = if v == grid[lo] {
        0.0
    } else {
        (v - grid[lo]) / (grid[lo + 1] - grid[lo])
    };
    Some((lo, t))
}

impl EnhancementTable {
    /// Evaluate the Mie series at every grid node.
    pub fn build(
        sphere: SphereSpec,
        omega_grid: Vec<f64>,
        distance_grid: Vec<f64>,
        truncation: usize,
    ) -> Result<Self> {
        check_grid("omega", &omega_grid, true)?;
        check_grid("distance", &distance_grid, true)?;
        let nw = omega_grid.len();
        let nd = distance_grid.len();
        let mut lambda_perp = vec![0.0; nw * nd];
        let mut lambda_par = vec![0.0; nw * nd];
        for (i, &w) in omega_grid.iter().enumerate() {
            for (j, &d) in distance_grid.iter().enumerate() {
                let (perp, par) = sphere.enhancement_factors(w, d, truncation)?;
                lambda_perp[i * nd + j] = perp;
                lambda_par[i * nd + j] = par;
            }
        }
        Ok(EnhancementTable {
            sphere,
            truncation,
            omega_grid,
            distance_grid,
            lambda_perp,
            lambda_par,
        })
    }

    /// Bilinear interpolation of (λ⊥, λ∥) inside the grid hull.
    ///
    /// Queries outside the hull are range errors: the table never
    /// extrapolates.
    pub fn lookup(&self, omega_ev: f64, d_nm: f64) -> Result<(f64, f64)> {
        let (i, s) = bracket(&self.omega_grid, omega_ev).ok_or_else(|| {
            Error::Range(format!(
                "omega {omega_ev} eV outside table range [{}, {}]",
                self.omega_grid[0],
                self.omega_grid[self.omega_grid.len() - 1]
            ))
        })?;
        let (j, t) = bracket(&self.distance_grid, d_nm).ok_or_else(|| {
            Error::Range(format!(
                "distance {d_nm} nm outside table range [{}, {}]",
                self.distance_grid[0],
                self.distance_grid[self.distance_grid.len() - 1]
            ))
        })?;
        let nd = self.distance_grid.len();
        let pick = |m: &[f64], di: usize, dj: usize| {
            let ii = (i + di).min(self.omega_grid.len() - 1);
            let jj = (j + dj).min(nd - 1);
            m[ii * nd + jj]
        };
        let blend = |m: &[f64]| {
            let v00 = pick(m, 0, 0);
            let v01 = pick(m, 0, 1);
            let v10 = pick(m, 1, 0);
            let v11 = pick(m, 1, 1);
            (1.0 - s) * ((1.0 - t) * v00 + t * v01) + s * ((1.0 - t) * v10 + t * v11)
        };
        Ok((blend(&self.lambda_perp), blend(&self.lambda_par)))
    }

    /// Inclusive ω range covered by the table.
    pub fn omega_range(&self) -> (f64, f64) {
        (self.omega_grid[0], self.omega_grid[self.omega_grid.len() - 1])
    }

    /// Serialize to the versioned plain-text cache format.
    pub fn to_cache_string(&self) -> String {
        let mut out = String::new();
        let nd = self.distance_grid.len();
        writeln!(out, "{CACHE_HEADER}").unwrap();
        writeln!(out, "radius_nm = {}", self.sphere.radius_nm).unwrap();
        writeln!(out, "omega_p_ev = {}", self.sphere.omega_p_ev).unwrap();
        writeln!(out, "eps_inf = {}", self.sphere.eps_inf).unwrap();
        writeln!(out, "gamma_ev = {}", self.sphere.gamma_ev).unwrap();
        writeln!(out, "eps_background = {}", self.sphere.eps_background).unwrap();
        writeln!(out, "truncation = {}", self.truncation).unwrap();
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "omega_grid = {}", join(&self.omega_grid)).unwrap();
        writeln!(out, "distance_grid = {}", join(&self.distance_grid)).unwrap();
        writeln!(out, "lambda_perp:").unwrap();
        for row in self.lambda_perp.chunks(nd) {
            writeln!(out, "{}", join(row)).unwrap();
        }
        writeln!(out, "lambda_par:").unwrap();
        for row in self.lambda_par.chunks(nd) {
            writeln!(out, "{}", join(row)).unwrap();
        }
        out
    }

    /// Parse the cache format produced by [`Self::to_cache_string`].
    pub fn from_cache_string(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let perr = |line: usize, key: &str, message: String| Error::Parse {
            line,
            key: key.to_string(),
            message,
        };
        let (_, header) = lines
            .next()
            .ok_or_else(|| perr(1, "header", "empty cache file".into()))?;
        if header.trim() != CACHE_HEADER {
            return Err(perr(
                1,
                "header",
                format!("expected `{CACHE_HEADER}`, got `{header}`"),
            ));
        }
        let mut scalar = |key: &str| -> Result<f64> {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| perr(0, key, "unexpected end of cache".into()))?;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| perr(idx + 1, key, "expected `key = value`".into()))?;
            if k.trim() != key {
                return Err(perr(idx + 1, key, format!("expected key `{key}`, got `{}`", k.trim())));
            }
            v.trim()
                .parse::<f64>()
                .map_err(|e| perr(idx + 1, key, format!("bad number `{}`: {e}", v.trim())))
        };
        let radius_nm = scalar("radius_nm")?;
        let omega_p_ev = scalar("omega_p_ev")?;
        let eps_inf = scalar("eps_inf")?;
        let gamma_ev = scalar("gamma_ev")?;
        let eps_background = scalar("eps_background")?;
        let truncation = scalar("truncation")? as usize;
        let sphere = SphereSpec::new(radius_nm, omega_p_ev, eps_inf, gamma_ev, eps_background)?;

        let mut vector = |key: &str| -> Result<Vec<f64>> {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| perr(0, key, "unexpected end of cache".into()))?;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| perr(idx + 1, key, "expected `key = value`".into()))?;
            if k.trim() != key {
                return Err(perr(idx + 1, key, format!("expected key `{key}`, got `{}`", k.trim())));
            }
            v.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| perr(idx + 1, key, format!("bad number `{tok}`: {e}")))
                })
                .collect()
        };
        let omega_grid = vector("omega_grid")?;
        let distance_grid = vector("distance_grid")?;
        check_grid("omega", &omega_grid, true)?;
        check_grid("distance", &distance_grid, true)?;
        let nw = omega_grid.len();
        let nd = distance_grid.len();

        let mut matrix = |key: &str| -> Result<Vec<f64>> {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| perr(0, key, "unexpected end of cache".into()))?;
            if line.trim() != format!("{key}:") {
                return Err(perr(idx + 1, key, format!("expected `{key}:` marker")));
            }
            let mut values = Vec::with_capacity(nw * nd);
            for _ in 0..nw {
                let (ridx, row) = lines
                    .next()
                    .ok_or_else(|| perr(0, key, "unexpected end of matrix rows".into()))?;
                let mut count = 0usize;
                for tok in row.split_whitespace() {
                    values.push(tok.parse::<f64>().map_err(|e| {
                        perr(ridx + 1, key, format!("bad number `{tok}`: {e}"))
                    })?);
                    count += 1;
                }
                if count != nd {
                    return Err(perr(
                        ridx + 1,
                        key,
                        format!("expected {nd} values per row, got {count}"),
                    ));
                }
            }
            Ok(values)
        };
        let lambda_perp = matrix("lambda_perp")?;
        let lambda_par = matrix("lambda_par")?;
        if lambda_perp.iter().chain(lambda_par.iter()).any(|&v| v <= 0.0) {
            return Err(Error::Domain(
                "cached enhancement factors must be positive".into(),
            ));
        }
        Ok(EnhancementTable {
            sphere,
            truncation,
            omega_grid,
            distance_grid,
            lambda_perp,
            lambda_par,
        })
    }

    /// Write the cache file atomically.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_cache_string())
    }

    /// Read a cache file.
    pub fn read_cache(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_cache_string(&text)
    }

    /// CSV rendering: one line per (ω, D) node, row-major.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("omega_ev,D_nm,lambda_perp,lambda_par\n");
        let nd = self.distance_grid.len();
        for (i, &w) in self.omega_grid.iter().enumerate() {
            for (j, &d) in self.distance_grid.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    w,
                    d,
                    self.lambda_perp[i * nd + j],
                    self.lambda_par[i * nd + j]
                )
                .unwrap();
            }
        }
        out
    }

    /// Write the CSV rendering atomically.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_csv_string())
    }
}
