use std::f64::consts::PI;

use num_complex::Complex64;

use super::lattice::SliceLattice;
use super::params::KernelParams;
use crate::error::{Error, Result};
use crate::minkowski::{classify_step, DomainSpec, FourVector, StepClass};

/// Momentum-integrated normalization of one slice.
///
/// `d = 3`: `i·m₀²/(4π²ħ²ε²)`. `d = 1`: `m₀/(2πħε)`, from two Gaussian momentum
/// integrals whose phases `e^{±iπ/4}` cancel.
pub fn kernel_prefactor(d: usize, params: &KernelParams) -> Result<Complex64> {
    let (m0, hbar, eps) = (params.m0(), params.hbar(), params.epsilon());
    match d {
        3 => Ok(Complex64::new(
            0.0,
            m0 * m0 / (4.0 * PI * PI * hbar * hbar * eps * eps),
        )),
        1 => Ok(Complex64::new(m0 / (2.0 * PI * hbar * eps), 0.0)),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// `prefactor(d)·exp[iα·δx·δx − ηα·|δx|²_E]`.
///
/// The damping uses the Euclidean norm so every component's Fresnel factor is
/// damped; at `η = 0` the kernel is a pure phase times the prefactor.
pub fn single_step_kernel(dx: &FourVector, params: &KernelParams) -> Result<Complex64> {
    let pre = kernel_prefactor(dx.d(), params)?;
    Ok(pre * kernel_phase(dx, params))
}

pub(crate) fn kernel_phase(dx: &FourVector, params: &KernelParams) -> Complex64 {
    let a = params.alpha();
    let phase = a * dx.interval();
    let damp = params.eta() * a * dx.euclidean_norm_sq();
    Complex64::from_polar((-damp).exp(), phase)
}

/// Kernel values and step classes for every lattice displacement.
#[derive(Debug, Clone)]
pub(crate) struct OffsetTable {
    nt: usize,
    span: usize,
    d: usize,
    values: Vec<Complex64>,
    classes: Vec<StepClass>,
}

impl OffsetTable {
    pub fn new(lattice: &SliceLattice, spec: &DomainSpec, params: &KernelParams) -> Result<Self> {
        let (nt, nx, d) = (lattice.nt(), lattice.nx(), lattice.d());
        let span = 2 * nx - 1;
        let per_t = span.pow(d as u32);
        let total = (2 * nt - 1) * per_t;
        let pre = kernel_prefactor(d, params)?;
        let mut values = Vec::with_capacity(total);
        let mut classes = Vec::with_capacity(total);
        for flat in 0..total {
            let dit = (flat / per_t) as i64 - (nt as i64 - 1);
            let mut rem = flat % per_t;
            let mut dix = [0i64; 3];
            for k in (0..d).rev() {
                dix[k] = (rem % span) as i64 - (nx as i64 - 1);
                rem /= span;
            }
            let dx = lattice.offset_from_steps(dit, &dix);
            let class = classify_step(&dx, params.epsilon(), spec);
            classes.push(class);
            values.push(if class.is_admissible() {
                pre * kernel_phase(&dx, params)
            } else {
                Complex64::new(0.0, 0.0)
            });
        }
        Ok(Self {
            nt,
            span,
            d,
            values,
            classes,
        })
    }

    fn index(&self, lattice: &SliceLattice, to: usize, from: usize) -> usize {
        let (ta, xa) = lattice.unflatten(to);
        let (tb, xb) = lattice.unflatten(from);
        let nx = self.span.div_ceil(2);
        let mut s = 0;
        for k in 0..self.d {
            s = s * self.span + (xa[k] + nx - 1 - xb[k]);
        }
        (ta + self.nt - 1 - tb) * self.span.pow(self.d as u32) + s
    }

    /// Kernel for the step `from → to`, zero when inadmissible.
    pub fn value(&self, lattice: &SliceLattice, to: usize, from: usize) -> Complex64 {
        self.values[self.index(lattice, to, from)]
    }

    pub fn class(&self, lattice: &SliceLattice, to: usize, from: usize) -> StepClass {
        self.classes[self.index(lattice, to, from)]
    }
}
