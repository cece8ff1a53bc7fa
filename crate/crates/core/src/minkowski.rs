//! Minkowski geometry in (1+1) and (3+1) dimensions.
//!
//! Metric signature is (+, −, …, −): component 0 is the `ct`-like slot and
//! `a·b = a₀b₀ − Σᵢ aᵢbᵢ`, so timelike steps have a positive interval and
//! `c²dτ² = dx·dx`. Components are stored contravariantly; every contraction
//! in the crate (norms, actions, momentum pairings) goes through
//! [`minkowski_dot`].

use std::fmt;

use crate::error::{require_positive, Error, Result};

/// Absolute slack on the `|dτ/dt| ≤ 1` boundary.
pub const BOUNDARY_SLACK: f64 = 1e-12;

/// Relative slack used when deciding that an interval is non-negative.
const INTERVAL_SLACK: f64 = 1e-12;

/// A space-time vector with `d ∈ {1, 3}` spatial components.
#[derive(Clone, Copy, PartialEq)]
pub struct FourVector {
    comps: [f64; 4],
    d: usize,
}

impl FourVector {
    /// Builds a vector from `d + 1` components.
    pub fn new(components: &[f64]) -> Result<Self> {
        let d = match components.len() {
            2 => 1,
            4 => 3,
            n => return Err(Error::UnsupportedDimension(n.saturating_sub(1))),
        };
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("four-vector component".into()));
        }
        let mut comps = [0.0; 4];
        comps[..=d].copy_from_slice(components);
        Ok(Self { comps, d })
    }

    pub fn new_1d(x0: f64, x1: f64) -> Result<Self> {
        Self::new(&[x0, x1])
    }

    pub fn new_3d(x0: f64, x1: f64, x2: f64, x3: f64) -> Result<Self> {
        Self::new(&[x0, x1, x2, x3])
    }

    pub fn zero(d: usize) -> Result<Self> {
        match d {
            1 | 3 => Ok(Self { comps: [0.0; 4], d }),
            _ => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_parts(comps: [f64; 4], d: usize) -> Self {
        debug_assert!(d == 1 || d == 3);
        Self { comps, d }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn components(&self) -> &[f64] {
        &self.comps[..=self.d]
    }

    /// The `ct`-like component.
    pub fn x0(&self) -> f64 {
        self.comps[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.comps[1..=self.d]
    }

    pub fn spatial_norm(&self) -> f64 {
        self.spatial().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Sum of squared components (not Lorentz invariant).
    pub fn euclidean_norm_sq(&self) -> f64 {
        self.components().iter().map(|v| v * v).sum()
    }

    /// `self · self`.
    pub fn interval(&self) -> f64 {
        let s: f64 = self.spatial().iter().map(|v| v * v).sum();
        self.comps[0] * self.comps[0] - s
    }

    pub fn try_add(&self, other: &FourVector) -> Result<FourVector> {
        self.same_dim(other)?;
        let mut comps = self.comps;
        for (c, o) in comps.iter_mut().zip(other.comps.iter()) {
            *c += o;
        }
        Ok(Self { comps, d: self.d })
    }

    pub fn try_sub(&self, other: &FourVector) -> Result<FourVector> {
        self.same_dim(other)?;
        let mut comps = self.comps;
        for (c, o) in comps.iter_mut().zip(other.comps.iter()) {
            *c -= o;
        }
        Ok(Self { comps, d: self.d })
    }

    pub fn scale(&self, k: f64) -> FourVector {
        let mut comps = self.comps;
        comps.iter_mut().for_each(|c| *c *= k);
        Self { comps, d: self.d }
    }

    pub(crate) fn same_dim(&self, other: &FourVector) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.d,
                right: other.d,
            })
        }
    }
}

impl fmt::Debug for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FourVector{:?}", self.components())
    }
}

/// `a₀b₀ − Σᵢ aᵢbᵢ`.
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> Result<f64> {
    a.same_dim(b)?;
    let spatial: f64 = a
        .spatial()
        .iter()
        .zip(b.spatial())
        .map(|(x, y)| x * y)
        .sum();
    Ok(a.comps[0] * b.comps[0] - spatial)
}

/// Proper time elapsed along a straight step, `√(dx·dx)/c`.
pub fn proper_time_step(dx: &FourVector, c: f64) -> Result<f64> {
    require_positive("c", c)?;
    let s = dx.interval();
    if s < -INTERVAL_SLACK * dx.euclidean_norm_sq() {
        return Err(Error::SpacelikeStep(s));
    }
    Ok(s.max(0.0).sqrt() / c)
}

/// Hyperbolic boost along the first spatial axis.
pub fn boost(v: &FourVector, rapidity: f64) -> FourVector {
    let (sh, ch) = (rapidity.sinh(), rapidity.cosh());
    let mut comps = v.comps;
    comps[0] = ch * v.comps[0] - sh * v.comps[1];
    comps[1] = -sh * v.comps[0] + ch * v.comps[1];
    FourVector { comps, d: v.d }
}

/// Constraint set for admissible path segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub allow_reverse: bool,
    c: f64,
}

impl DomainSpec {
    pub fn new(c: f64, allow_reverse: bool) -> Result<Self> {
        require_positive("c", c)?;
        Ok(Self { allow_reverse, c })
    }

    pub fn forward_only(c: f64) -> Result<Self> {
        Self::new(c, false)
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Label of a single sliced step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepClass {
    Forward,
    Reverse,
    Inadmissible,
}

impl StepClass {
    pub fn is_admissible(self) -> bool {
        !matches!(self, StepClass::Inadmissible)
    }
}

/// Label of a whole path: ℂ′, ℂ″ or outside ℂ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathClass {
    AllForward,
    ContainsReverse,
    Inadmissible,
}

/// Classifies a step `δx` taken over proper time `δτ`.
///
/// A step is admissible when it is not spacelike and `|c·δτ/δx₀| ≤ 1`; the sign
/// of `δx₀` decides between particle and reverse-time (antiparticle) segments.
pub fn classify_step(dx: &FourVector, dtau: f64, spec: &DomainSpec) -> StepClass {
    if !(dtau > 0.0) || !dtau.is_finite() {
        return StepClass::Inadmissible;
    }
    let s = dx.interval();
    if s < -INTERVAL_SLACK * dx.euclidean_norm_sq() {
        return StepClass::Inadmissible;
    }
    let x0 = dx.x0();
    if x0 == 0.0 {
        return StepClass::Inadmissible;
    }
    let ratio = (spec.c * dtau / x0).abs();
    if ratio > 1.0 + BOUNDARY_SLACK {
        return StepClass::Inadmissible;
    }
    if x0 > 0.0 {
        StepClass::Forward
    } else if spec.allow_reverse {
        StepClass::Reverse
    } else {
        StepClass::Inadmissible
    }
}

/// A sliced world line: events with strictly increasing proper-time stamps.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldlinePath {
    nodes: Vec<(FourVector, f64)>,
}

impl WorldlinePath {
    pub fn new(nodes: Vec<(FourVector, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::TooFewNodes {
                needed: 2,
                got: nodes.len(),
            });
        }
        let d = nodes[0].0.d();
        for (k, w) in nodes.windows(2).enumerate() {
            w[1].0.same_dim(&w[0].0)?;
            if !w[1].1.is_finite() || !(w[1].1 > w[0].1) {
                return Err(Error::InvalidPath(format!(
                    "proper-time stamps not strictly increasing at node {}",
                    k + 1
                )));
            }
        }
        if !nodes[0].1.is_finite() || nodes.iter().any(|n| n.0.d() != d) {
            return Err(Error::InvalidPath("inconsistent nodes".into()));
        }
        Ok(Self { nodes })
    }

    /// Evenly stamped path `x(τ₀ + k·h)`.
    pub fn uniform(events: Vec<FourVector>, tau0: f64, h: f64) -> Result<Self> {
        require_positive("dtau", h)?;
        let nodes = events
            .into_iter()
            .enumerate()
            .map(|(k, e)| (e, tau0 + k as f64 * h))
            .collect();
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[(FourVector, f64)] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn d(&self) -> usize {
        self.nodes[0].0.d()
    }

    /// `(δx, δτ)` for every segment.
    pub fn segments(&self) -> impl Iterator<Item = (FourVector, f64)> + '_ {
        self.nodes.windows(2).map(|w| {
            let dx = w[1].0.try_sub(&w[0].0).expect("validated dimensions");
            (dx, w[1].1 - w[0].1)
        })
    }

    /// Common step if the stamps are evenly spaced (relative tolerance 1e−9).
    pub fn uniform_step(&self) -> Option<f64> {
        let first = self.nodes[1].1 - self.nodes[0].1;
        self.segments()
            .all(|(_, h)| (h - first).abs() <= 1e-9 * first.abs())
            .then_some(first)
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform_step().is_some()
    }

    pub fn boosted(&self, rapidity: f64) -> WorldlinePath {
        Self {
            nodes: self
                .nodes
                .iter()
                .map(|(e, t)| (boost(e, rapidity), *t))
                .collect(),
        }
    }
}

pub fn classify_path(path: &WorldlinePath, spec: &DomainSpec) -> PathClass {
    let mut reverse = false;
    for (dx, dtau) in path.segments() {
        match classify_step(&dx, dtau, spec) {
            StepClass::Inadmissible => return PathClass::Inadmissible,
            StepClass::Reverse => reverse = true,
            StepClass::Forward => {}
        }
    }
    if reverse {
        PathClass::ContainsReverse
    } else {
        PathClass::AllForward
    }
}
