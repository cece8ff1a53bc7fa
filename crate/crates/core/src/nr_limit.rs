//! Large-`c` comparison of the sliced propagator with the free Feynman kernel.
//!
//! With `T = nε` and time slices spaced by exactly `ε`, every admissible step
//! has `dτ = dt` and the kernel phase splits into the rest-mass term
//! `m₀c²ε/(2ħ)` and `−m₀δx²/(2ħε)`. The latter is the complex conjugate of the
//! Feynman short-time phase, so the sliced amplitude is compared with the
//! conjugate of the (equally damped) Feynman kernel, restricted to
//! `|δx| ≤ cε` on each step.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{require_positive, Error, Result};
use crate::minkowski::{classify_step, DomainSpec, FourVector};
use crate::propagator::{sliced_propagator, KernelParams, SliceLattice};

/// `√(m₀/(2πiħT))·exp(i·m₀Δx²/(2ħT))`, principal square root.
pub fn feynman_kernel(dx: f64, t: f64, m0: f64, hbar: f64) -> Result<Complex64> {
    feynman_kernel_regularized(dx, t, m0, hbar, 0.0)
}

/// `√(a/π)·e^{−aΔx²}` with `a = (η − i)·m₀/(2ħT)`; equals
/// [`feynman_kernel`] at `η = 0`.
pub fn feynman_kernel_regularized(dx: f64, t: f64, m0: f64, hbar: f64, eta: f64) -> Result<Complex64> {
    require_positive("T", t)?;
    require_positive("m0", m0)?;
    require_positive("hbar", hbar)?;
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::param("eta", "must be finite and ≥ 0"));
    }
    let a = Complex64::new(eta, -1.0) * (m0 / (2.0 * hbar * t));
    Ok((a / PI).sqrt() * (-a * dx * dx).exp())
}

/// `K·exp(−i·m₀c²T/(2ħ))`
pub fn rest_phase_strip(k: Complex64, t: f64, m0: f64, c: f64, hbar: f64) -> Complex64 {
    k * Complex64::from_polar(1.0, -m0 * c * c * t / (2.0 * hbar))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NrCompareConfig {
    pub c_grid: Vec<f64>,
    pub m0: f64,
    pub hbar: f64,
    pub t_total: f64,
    /// Spatial separations `x_b − x_a`; must fall on lattice sites.
    pub endpoints: Vec<f64>,
    pub n_slices: usize,
    /// Damping shared by the sliced kernel and the reference kernel.
    pub eta: f64,
    pub dx: f64,
    /// The spatial lattice covers `[−half_width, half_width]`.
    pub half_width: f64,
}

impl Default for NrCompareConfig {
    fn default() -> Self {
        Self {
            c_grid: vec![2.0, 4.0, 8.0],
            m0: 1.0,
            hbar: 1.0,
            t_total: 1.0,
            endpoints: (0..8).map(|k| -1.0 + 0.25 * k as f64).collect(),
            n_slices: 2,
            eta: 0.2,
            dx: 0.025,
            half_width: 6.0,
        }
    }
}

/// Minimum number of endpoints for the one-constant fit.
pub const MIN_ENDPOINTS: usize = 8;

impl NrCompareConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c_grid.is_empty() {
            return Err(Error::param("nr.c_grid", "must not be empty"));
        }
        for &c in &self.c_grid {
            require_positive("nr.c_grid", c)?;
        }
        if self.c_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("nr.c_grid", "must be strictly increasing"));
        }
        require_positive("m0", self.m0)?;
        require_positive("hbar", self.hbar)?;
        require_positive("nr.t_total", self.t_total)?;
        require_positive("nr.dx", self.dx)?;
        require_positive("nr.half_width", self.half_width)?;
        if self.n_slices < 2 {
            return Err(Error::param("nr.n_slices", "must be at least 2"));
        }
        if !(self.eta.is_finite() && (0.0..1.0).contains(&self.eta)) {
            return Err(Error::param("nr.eta", "must lie in [0, 1)"));
        }
        if self.endpoints.len() < MIN_ENDPOINTS {
            return Err(Error::param(
                "nr.endpoints",
                format!("need at least {MIN_ENDPOINTS} endpoints for the fit"),
            ));
        }
        if self.endpoints.iter().any(|e| !e.is_finite() || e.abs() > self.half_width) {
            return Err(Error::param("nr.endpoints", "must lie inside the lattice"));
        }
        Ok(())
    }

    fn lattice(&self, c: f64) -> Result<SliceLattice> {
        let nx = (2.0 * self.half_width / self.dx).round() as usize + 1;
        SliceLattice::new_1d(
            self.n_slices + 1,
            nx,
            self.t_total / self.n_slices as f64,
            self.dx,
            c,
            0.0,
            -self.half_width,
        )
    }
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct NrRow {
    pub c: f64,
    pub relative_error: f64,
    /// Fraction of admissible single steps with `dτ/dt ∈ [1 − 10⁻³, 1]`.
    pub admissible_fraction: f64,
    /// Fitted constant absorbing the discarded normalization.
    pub scale: Complex64,
    /// `|s·K_rel − K_ref|` per endpoint.
    pub abs_errors: Vec<f64>,
    pub warning: Option<String>,
}

/// Sliced (d = 1, forward-only) propagator for each `c`, rest phase stripped,
/// fitted with one complex constant and compared with the reference kernel.
pub fn nr_limit_error(cfg: &NrCompareConfig) -> Result<Vec<NrRow>> {
    cfg.validate()?;
    cfg.c_grid.par_iter().map(|&c| nr_row(cfg, c)).collect()
}

fn nr_row(cfg: &NrCompareConfig, c: f64) -> Result<NrRow> {
    let eps = cfg.t_total / cfg.n_slices as f64;
    let params = KernelParams::new(cfg.m0, c, cfg.hbar, eps, cfg.eta)?;
    let spec = DomainSpec::forward_only(c)?;
    let lattice = cfg.lattice(c)?;
    let a = FourVector::new_1d(0.0, 0.0)?;

    let mut sliced = Vec::with_capacity(cfg.endpoints.len());
    let mut reference = Vec::with_capacity(cfg.endpoints.len());
    for &x in &cfg.endpoints {
        let b = FourVector::new_1d(c * cfg.t_total, x)?;
        if lattice.site_of(&b).is_none() {
            return Err(Error::param("nr.endpoints", format!("{x} is not a lattice site")));
        }
        let r = sliced_propagator(&a, &b, cfg.n_slices, &lattice, &spec, &params)?;
        if r.empty_domain {
            return Err(Error::EmptyDomain);
        }
        sliced.push(rest_phase_strip(r.amplitude, cfg.t_total, cfg.m0, c, cfg.hbar));
        reference.push(feynman_kernel_regularized(x, cfg.t_total, cfg.m0, cfg.hbar, cfg.eta)?.conj());
    }

    let num: Complex64 = sliced.iter().zip(&reference).map(|(k, f)| k.conj() * f).sum();
    let den: f64 = sliced.iter().map(|k| k.norm_sqr()).sum();
    if !(den > 0.0) {
        return Err(Error::NonFinite("vanishing sliced amplitudes".into()));
    }
    let scale = num / den;
    let abs_errors: Vec<f64> = sliced
        .iter()
        .zip(&reference)
        .map(|(k, f)| (scale * k - f).norm())
        .collect();
    let err2: f64 = abs_errors.iter().map(|e| e * e).sum();
    let ref2: f64 = reference.iter().map(|f| f.norm_sqr()).sum();

    // one spatial cell per step advances the phase α·2|δx|·dx at the light cone
    let zone_step = cfg.m0 * c * cfg.dx / cfg.hbar;
    let warning = (zone_step > PI / 4.0).then(|| {
        format!("c = {c}: lattice under-resolves the kernel phase ({zone_step:.3} rad per site)")
    });

    Ok(NrRow {
        c,
        relative_error: (err2 / ref2).sqrt(),
        admissible_fraction: admissible_fraction(cfg, &lattice, &spec, &params),
        scale,
        abs_errors,
        warning,
    })
}

fn admissible_fraction(
    cfg: &NrCompareConfig,
    lattice: &SliceLattice,
    spec: &DomainSpec,
    params: &KernelParams,
) -> f64 {
    let lo = cfg.endpoints.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cfg.endpoints.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inside = |idx: usize| {
        let x = lattice.event(idx).spatial()[0];
        x >= lo - 1e-9 && x <= hi + 1e-9
    };
    let row: Vec<usize> = (0..lattice.nx()).filter(|&i| inside(i)).collect();
    let (mut admissible, mut near_one) = (0usize, 0usize);
    for &from in &row {
        for &to in &row {
            let dx = lattice.offset(lattice.nx() + to, from);
            if !classify_step(&dx, params.epsilon(), spec).is_admissible() {
                continue;
            }
            admissible += 1;
            let rate = dx.interval().max(0.0).sqrt() / dx.x0();
            if (1.0 - 1e-3..=1.0 + 1e-12).contains(&rate) {
                near_one += 1;
            }
        }
    }
    if admissible == 0 {
        0.0
    } else {
        near_one as f64 / admissible as f64
    }
}
