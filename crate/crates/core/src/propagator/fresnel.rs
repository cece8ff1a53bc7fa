//! Damped Fresnel integrals of the momentum-integrated kernel.
//!
//! With `u = αT²` every integral reduces to
//! `∫_{u₀}^∞ u^{±1/2} e^{(±i−η)u} W(u) du`, which oscillates at unit
//! frequency in `u`. Panels of fixed width in `u` therefore resolve the phase
//! uniformly; the interval `[0, 1]` is integrated in `s = √u` to absorb the
//! endpoint branch point.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::kernel::kernel_prefactor;
use super::params::KernelParams;
use crate::error::{Error, Result};
use crate::quad::{uniform_breaks, PanelRule};

/// Spatial integration domain of each slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialDomain {
    /// All of ℝ³, so the spatial and temporal integrals factorize.
    Unbounded,
    /// The ball `|δx⃗| ≤ c|δt|` inside the instantaneous light cone.
    LightConeBall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Panel width in `u = αT²` (radians of phase).
    pub panel_width: f64,
    /// Truncation stops once the damped tail bound falls below
    /// `tail_tol·|running total|`.
    pub tail_tol: f64,
    /// Largest admissible `u` cut-off.
    pub max_extent: f64,
    pub domain: SpatialDomain,
    /// Replace `f(η)` by `2f(η/2) − f(η)`.
    pub richardson: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            order: 16,
            panel_width: 1.0,
            tail_tol: 1e-10,
            max_extent: 1e7,
            domain: SpatialDomain::Unbounded,
            richardson: false,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::param("quad_order", "must be at least 2"));
        }
        if !(self.panel_width.is_finite() && self.panel_width > 0.0 && self.panel_width <= 4.0) {
            return Err(Error::param("quad_panel_width", "must lie in (0, 4]"));
        }
        if !(self.tail_tol.is_finite() && self.tail_tol > 0.0 && self.tail_tol < 1e-3) {
            return Err(Error::param("t_max_tol", "must lie in (0, 1e-3)"));
        }
        if !(self.max_extent.is_finite() && self.max_extent > 1.0) {
            return Err(Error::param("quad_max_extent", "must be finite and > 1"));
        }
        Ok(())
    }
}

/// A quadrature result with its truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelEstimate {
    pub value: Complex64,
    /// Largest `|cδt|` (or `|δx⃗|`) reached by the truncated integrals.
    pub t_max: f64,
    /// Sum of the relative tail bounds at truncation.
    pub tail_bound: f64,
    pub panels: usize,
}

#[derive(Clone, Copy)]
struct HalfLine {
    /// Exponent of `u`: ±½.
    power: f64,
    /// Sign of the oscillating phase.
    sign: f64,
    eta: f64,
    /// Multiply by the cumulative ball integral `J(u)`.
    ball: bool,
}

struct Outcome {
    value: Complex64,
    extent: f64,
    rel_tail: f64,
    panels: usize,
}

impl HalfLine {
    fn z(&self) -> Complex64 {
        Complex64::new(-self.eta, self.sign)
    }

    fn tail(&self, u: f64) -> f64 {
        let e = (-self.eta * u).exp();
        let outer = if self.power < 0.0 {
            e / (self.eta * u.sqrt())
        } else {
            e * (u.sqrt() / self.eta + 0.5 / (self.eta * self.eta * u.sqrt()))
        };
        if self.ball {
            outer * 0.5 * PI.sqrt() * self.eta.powf(-1.5)
        } else {
            outer
        }
    }
}

/// `J(b) − J(a)` with `J(u) = ∫₀^u √v e^{−(i+η)v} dv`, computed in `s = √v`.
fn ball_increment(rule: &PanelRule, eta: f64, a: f64, b: f64) -> Complex64 {
    let z = Complex64::new(-eta, -1.0);
    rule.panel(a.sqrt(), b.sqrt(), &|s| (z * s * s).exp() * (2.0 * s * s))
}

fn half_line(rule: &PanelRule, h: HalfLine, u0: f64, cfg: &QuadConfig) -> Result<Outcome> {
    if !(h.eta > 0.0) {
        return Err(Error::NonConvergence(
            "eta = 0 leaves the oscillatory tail undamped".into(),
        ));
    }
    let z = h.z();
    let mut panels = 0usize;
    let mut total = Complex64::new(0.0, 0.0);
    let mut j_at = Complex64::new(0.0, 0.0);
    let mut j_pos = 0.0;

    // weight J(u) at ascending points, advanced incrementally
    let advance = |to: f64, j_at: &mut Complex64, j_pos: &mut f64| {
        if h.ball && to > *j_pos {
            *j_at += ball_increment(rule, h.eta, *j_pos, to);
            *j_pos = to;
        }
    };

    let mut start = u0;
    if u0 < 1.0 {
        // s = √u on [√u₀, 1]: u^{p}·du = 2·s^{2p+1}·ds
        let s0 = u0.sqrt();
        let breaks = uniform_breaks(s0, 1.0, ((1.0 - s0) / 0.25).ceil() as usize);
        for w in breaks.windows(2) {
            let mut acc = Vec::with_capacity(rule.order());
            for (s, wt) in rule.mapped(w[0], w[1]) {
                let u = s * s;
                advance(u, &mut j_at, &mut j_pos);
                let jac = 2.0 * s.powf(2.0 * h.power + 1.0);
                let weight = if h.ball { j_at } else { Complex64::new(1.0, 0.0) };
                acc.push((z * u).exp() * weight * (jac * wt));
            }
            total += crate::sum::pairwise_sum(&acc);
            panels += 1;
        }
        start = 1.0;
    } else if h.ball {
        advance(u0, &mut j_at, &mut j_pos);
    }

    const CHUNK: usize = 64;
    let width = cfg.panel_width;
    let mut a = start;
    loop {
        let mut chunk = Vec::with_capacity(CHUNK);
        for _ in 0..CHUNK {
            let b = a + width;
            let mut acc = Vec::with_capacity(rule.order());
            for (u, wt) in rule.mapped(a, b) {
                advance(u, &mut j_at, &mut j_pos);
                let weight = if h.ball { j_at } else { Complex64::new(1.0, 0.0) };
                acc.push((z * u).exp() * weight * (u.powf(h.power) * wt));
            }
            chunk.push(crate::sum::pairwise_sum(&acc));
            panels += 1;
            a = b;
        }
        total += crate::sum::pairwise_sum(&chunk);
        let bound = h.tail(a);
        let scale = total.norm();
        if bound <= cfg.tail_tol * scale {
            return Ok(Outcome {
                value: total,
                extent: a,
                rel_tail: bound / scale,
                panels,
            });
        }
        if a > cfg.max_extent {
            return Err(Error::NonConvergence(format!(
                "tail bound {bound:e} still above tolerance at u = {a:e}"
            )));
        }
    }
}

fn check(params: &KernelParams, cfg: &QuadConfig) -> Result<PanelRule> {
    cfg.validate()?;
    if !(params.eta() > 0.0) {
        return Err(Error::NonConvergence(
            "eta = 0 leaves the oscillatory tail undamped".into(),
        ));
    }
    PanelRule::new(cfg.order)
}

/// Which slice moment is integrated against the kernel.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Moment {
    /// `∫ K` (the term multiplying ψ).
    Zeroth,
    /// `½∫ (cδt)² K` (the term multiplying `∂₀²ψ`).
    Second,
}

fn moment(params: &KernelParams, cfg: &QuadConfig, eta: f64, m: Moment) -> Result<FresnelEstimate> {
    let rule = check(params, cfg)?;
    let alpha = params.alpha();
    let pre = kernel_prefactor(3, params)?;
    let ce = params.c() * params.epsilon();
    let u0 = alpha * ce * ce;
    let power = match m {
        Moment::Zeroth => -0.5,
        Moment::Second => 0.5,
    };
    // 2∫_{cε}^∞ T^{2k} e^{(i−η)αT²} dT = α^{−k−1/2} ∫_{u₀}^∞ u^{k−1/2} e^{(i−η)u} du
    let t_scale = alpha.powf(-power - 1.0);
    let half = if m == Moment::Second { 0.5 } else { 1.0 };
    // 4π∫₀^R r² e^{−(i+η)αr²} dr = 2π α^{−3/2} J(αR²)
    let s_scale = 2.0 * PI * alpha.powf(-1.5);

    let (value, extent, rel_tail, panels) = match cfg.domain {
        SpatialDomain::Unbounded => {
            let spatial = half_line(
                &rule,
                HalfLine { power: 0.5, sign: -1.0, eta, ball: false },
                0.0,
                cfg,
            )?;
            let temporal = half_line(
                &rule,
                HalfLine { power, sign: 1.0, eta, ball: false },
                u0,
                cfg,
            )?;
            (
                pre * half * s_scale * spatial.value * t_scale * temporal.value,
                spatial.extent.max(temporal.extent),
                spatial.rel_tail + temporal.rel_tail,
                spatial.panels + temporal.panels,
            )
        }
        SpatialDomain::LightConeBall => {
            let o = half_line(
                &rule,
                HalfLine { power, sign: 1.0, eta, ball: true },
                u0,
                cfg,
            )?;
            (pre * half * s_scale * t_scale * o.value, o.extent, o.rel_tail, o.panels)
        }
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite("Fresnel quadrature".into()));
    }
    Ok(FresnelEstimate {
        value,
        t_max: (extent / alpha).sqrt(),
        tail_bound: rel_tail,
        panels,
    })
}

fn with_richardson(
    params: &KernelParams,
    cfg: &QuadConfig,
    m: Moment,
) -> Result<FresnelEstimate> {
    let eta = params.eta();
    let coarse = moment(params, cfg, eta, m)?;
    if !cfg.richardson {
        return Ok(coarse);
    }
    let fine = moment(params, cfg, 0.5 * eta, m)?;
    Ok(FresnelEstimate {
        value: fine.value * 2.0 - coarse.value,
        t_max: fine.t_max.max(coarse.t_max),
        tail_bound: 2.0 * fine.tail_bound + coarse.tail_bound,
        panels: fine.panels + coarse.panels,
    })
}

/// Multiplicative factor the slice integral applies to a constant field.
///
/// Integrates the d = 3 kernel over `|cδt| ≥ cε` (both time orientations)
/// and the spatial domain selected in `cfg`.
pub fn ft_factor(params: &KernelParams, cfg: &QuadConfig) -> Result<FresnelEstimate> {
    with_richardson(params, cfg, Moment::Zeroth)
}

/// Coefficient of the second-derivative term: `½∫(cδt)²K` over the same domain.
pub fn st_coefficient(params: &KernelParams, cfg: &QuadConfig) -> Result<FresnelEstimate> {
    with_richardson(params, cfg, Moment::Second)
}
