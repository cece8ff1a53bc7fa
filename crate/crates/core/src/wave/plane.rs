use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};
use crate::minkowski::{minkowski_dot, FourVector};

/// `amplitude·e^{(i/ħ)·p·x}` with the Minkowski pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub p: FourVector,
    pub amplitude: Complex64,
    hbar: f64,
}

impl PlaneWave {
    pub fn new(p: FourVector, amplitude: Complex64, hbar: f64) -> Result<Self> {
        require_positive("hbar", hbar)?;
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(Error::NonFinite("plane-wave amplitude".into()));
        }
        Ok(Self { p, amplitude, hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn eval(&self, x: &FourVector) -> Result<Complex64> {
        let phase = minkowski_dot(&self.p, x)? / self.hbar;
        Ok(self.amplitude * Complex64::from_polar(1.0, phase))
    }

    /// Pointwise product; momenta add.
    pub fn product(&self, other: &PlaneWave) -> Result<PlaneWave> {
        if self.hbar != other.hbar {
            return Err(Error::param("hbar", "plane waves use different ħ"));
        }
        PlaneWave::new(self.p.try_add(&other.p)?, self.amplitude * other.amplitude, self.hbar)
    }
}

/// Eigenvalue of `−iħ ∂/∂x_μ` on a plane wave.
///
/// `∂/∂x_μ = η^{μμ}∂/∂x^μ` and `∂(p·x)/∂x^μ = η_{μμ}p^μ`, so the operator
/// returns the stored contravariant component `p^μ`.
pub fn operator_eigenvalue(w: &PlaneWave, mu: usize) -> Result<Complex64> {
    let d = w.p.d();
    if mu > d {
        return Err(Error::param("mu", format!("index {mu} out of range for d = {d}")));
    }
    let metric = if mu == 0 { 1.0 } else { -1.0 };
    let dphase = Complex64::new(0.0, metric * w.p.components()[mu] / w.hbar);
    let lowered = dphase * metric;
    Ok(Complex64::new(0.0, -w.hbar) * lowered)
}

/// `Ψ(x, τ) = ψ(x)·e^{−imτ/ħ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEigenstate {
    pub psi: PlaneWave,
    /// Eigenvalue of `iħ∂/∂τ` in energy units.
    pub m: f64,
}

impl MassEigenstate {
    pub fn new(psi: PlaneWave, m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("mass eigenvalue".into()));
        }
        Ok(Self { psi, m })
    }

    pub fn eval(&self, x: &FourVector, tau: f64) -> Result<Complex64> {
        Ok(self.psi.eval(x)? * Complex64::from_polar(1.0, -self.m * tau / self.psi.hbar()))
    }

    /// `iħ∂Ψ/∂τ ÷ Ψ`
    pub fn tau_eigenvalue(&self) -> Complex64 {
        let hbar = self.psi.hbar();
        Complex64::new(0.0, hbar) * Complex64::new(0.0, -self.m / hbar)
    }
}

/// `|p·p − m₀²c²|`: the defect of `m₀²c²φ = −ħ²□φ` on a plane wave.
pub fn kg_residual(p: &FourVector, m0: f64, c: f64) -> f64 {
    (p.interval() - m0 * m0 * c * c).abs()
}
