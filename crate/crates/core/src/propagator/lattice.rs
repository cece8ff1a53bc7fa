use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};
use crate::minkowski::FourVector;

/// Rectangular space-time lattice `nt × nxᵈ`.
///
/// Site `(it, ix₁..ix_d)` sits at `origin + (c·it·dt, ix₁·dx, …)`; the time
/// axis is stored as `x₀ = ct`. Flat indices are lexicographic with time
/// slowest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceLattice {
    d: usize,
    nt: usize,
    nx: usize,
    dt: f64,
    dx: f64,
    c: f64,
    origin: FourVector,
}

impl SliceLattice {
    pub fn new(nt: usize, nx: usize, dt: f64, dx: f64, c: f64, origin: FourVector) -> Result<Self> {
        if nt == 0 {
            return Err(Error::param("nt", "must be at least 1"));
        }
        if nx == 0 {
            return Err(Error::param("nx", "must be at least 1"));
        }
        require_positive("dt", dt)?;
        require_positive("dx", dx)?;
        require_positive("c", c)?;
        let d = origin.d();
        let sites = (nx as u128).pow(d as u32) * nt as u128;
        if sites > u32::MAX as u128 {
            return Err(Error::param("nx", "lattice too large"));
        }
        Ok(Self {
            d,
            nt,
            nx,
            dt,
            dx,
            c,
            origin,
        })
    }

    /// A 1+1 lattice whose first site is at `(c·t0, x0)`.
    pub fn new_1d(nt: usize, nx: usize, dt: f64, dx: f64, c: f64, t0: f64, x0: f64) -> Result<Self> {
        Self::new(nt, nx, dt, dx, c, FourVector::new_1d(c * t0, x0)?)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn origin(&self) -> &FourVector {
        &self.origin
    }

    /// Sites per time slice.
    pub fn slice_len(&self) -> usize {
        self.nx.pow(self.d as u32)
    }

    pub fn len(&self) -> usize {
        self.nt * self.slice_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Four-volume `c·dt·dxᵈ` of one cell in `x₀ = ct` coordinates.
    pub fn cell_measure(&self) -> f64 {
        self.c * self.dt * self.dx.powi(self.d as i32)
    }

    /// `dxᵈ`
    pub fn spatial_cell(&self) -> f64 {
        self.dx.powi(self.d as i32)
    }

    /// `(it, [ix₁, ix₂, ix₃])` with unused spatial slots zero.
    pub fn unflatten(&self, idx: usize) -> (usize, [usize; 3]) {
        let s = self.slice_len();
        let it = idx / s;
        let mut rem = idx % s;
        let mut ix = [0usize; 3];
        for k in (0..self.d).rev() {
            ix[k] = rem % self.nx;
            rem /= self.nx;
        }
        (it, ix)
    }

    pub fn flatten(&self, it: usize, ix: &[usize]) -> usize {
        let mut s = 0;
        for &i in ix.iter().take(self.d) {
            s = s * self.nx + i;
        }
        it * self.slice_len() + s
    }

    pub fn time_of(&self, it: usize) -> f64 {
        self.origin.x0() / self.c + it as f64 * self.dt
    }

    pub fn event(&self, idx: usize) -> FourVector {
        let (it, ix) = self.unflatten(idx);
        let o = self.origin.components();
        let mut comps = [0.0; 4];
        comps[0] = o[0] + self.c * it as f64 * self.dt;
        for k in 0..self.d {
            comps[k + 1] = o[k + 1] + ix[k] as f64 * self.dx;
        }
        FourVector::from_parts(comps, self.d)
    }

    /// Displacement `event(to) − event(from)` computed from integer offsets so
    /// that translated site pairs give bitwise-equal vectors.
    pub fn offset(&self, to: usize, from: usize) -> FourVector {
        let (ta, xa) = self.unflatten(to);
        let (tb, xb) = self.unflatten(from);
        self.offset_from_steps(ta as i64 - tb as i64, &[
            xa[0] as i64 - xb[0] as i64,
            xa[1] as i64 - xb[1] as i64,
            xa[2] as i64 - xb[2] as i64,
        ])
    }

    pub(crate) fn offset_from_steps(&self, dit: i64, dix: &[i64; 3]) -> FourVector {
        let mut comps = [0.0; 4];
        comps[0] = self.c * dit as f64 * self.dt;
        for k in 0..self.d {
            comps[k + 1] = dix[k] as f64 * self.dx;
        }
        FourVector::from_parts(comps, self.d)
    }

    /// Index of the site that coincides with `x` up to a relative 1e−9 of the
    /// spacing, if any.
    pub fn site_of(&self, x: &FourVector) -> Option<usize> {
        let (idx, exact) = self.nearest_site(x)?;
        exact.then_some(idx)
    }

    /// Nearest lattice site to `x` and whether it coincides with `x`.
    pub fn nearest_site(&self, x: &FourVector) -> Option<(usize, bool)> {
        if x.d() != self.d {
            return None;
        }
        let o = self.origin.components();
        let c = x.components();
        let ft = (c[0] - o[0]) / (self.c * self.dt);
        let it = ft.round();
        if it < 0.0 || it >= self.nt as f64 {
            return None;
        }
        let mut exact = (ft - it).abs() <= 1e-9;
        let mut ix = [0usize; 3];
        for k in 0..self.d {
            let f = (c[k + 1] - o[k + 1]) / self.dx;
            let r = f.round();
            if r < 0.0 || r >= self.nx as f64 {
                return None;
            }
            exact &= (f - r).abs() <= 1e-9;
            ix[k] = r as usize;
        }
        Some((self.flatten(it as usize, &ix), exact))
    }
}

/// Complex amplitudes on every site of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    lattice: SliceLattice,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(lattice: SliceLattice) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); lattice.len()],
            lattice,
        }
    }

    pub fn from_fn<F: Fn(&FourVector) -> Complex64>(lattice: SliceLattice, f: F) -> Self {
        Self {
            values: (0..lattice.len()).map(|i| f(&lattice.event(i))).collect(),
            lattice,
        }
    }

    pub fn from_values(lattice: SliceLattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::LatticeMismatch);
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("field values".into()));
        }
        Ok(Self { lattice, values })
    }

    pub fn lattice(&self) -> &SliceLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// Values on time slice `it`.
    pub fn slice(&self, it: usize) -> Result<&[Complex64]> {
        if it >= self.lattice.nt() {
            return Err(Error::SliceOutOfRange(it));
        }
        let s = self.lattice.slice_len();
        Ok(&self.values[it * s..(it + 1) * s])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
