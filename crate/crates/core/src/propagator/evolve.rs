use num_complex::Complex64;
use rayon::prelude::*;

use super::lattice::ComplexField;
use super::params::KernelParams;
use crate::error::{Error, Result};

/// Dimensionless step size `ε·[m₀c²/(4ħ) + (ħ/2m₀)(4/h₀² + 4d/h²)]` of the
/// explicit update; it must not exceed 1.
pub fn stability_number(field: &ComplexField, params: &KernelParams) -> f64 {
    let lat = field.lattice();
    let h0 = lat.c() * lat.dt();
    let h = lat.dx();
    let (m0, c, hbar) = (params.m0(), params.c(), params.hbar());
    params.epsilon()
        * (m0 * c * c / (4.0 * hbar)
            + hbar / (2.0 * m0) * (4.0 / (h0 * h0) + 4.0 * lat.d() as f64 / (h * h)))
}

/// Explicit proper-time update
/// `ψ ← ψ − i(m₀c²/4ħ)εψ + (iħε/2m₀)·□ψ`
/// with `□ = ∂₀² − ∇²` by central differences and periodic boundaries on
/// every lattice axis (`∂₀` acts on `x₀ = ct`).
pub fn evolve_field(psi: &ComplexField, params: &KernelParams, steps: usize) -> Result<ComplexField> {
    let theta = stability_number(psi, params);
    if theta > 1.0 {
        return Err(Error::Unstable(format!(
            "stability number {theta:.6} exceeds 1; reduce epsilon or coarsen the lattice"
        )));
    }
    let lat = *psi.lattice();
    let (nt, nx, d) = (lat.nt(), lat.nx(), lat.d());
    let h0 = lat.c() * lat.dt();
    let h = lat.dx();
    let eps = params.epsilon();
    let rest = Complex64::new(0.0, -params.m0() * params.c() * params.c() * eps / (4.0 * params.hbar()));
    let kin = Complex64::new(0.0, params.hbar() * eps / (2.0 * params.m0()));
    let (i0, is) = (1.0 / (h0 * h0), 1.0 / (h * h));

    let mut cur = psi.clone();
    for step in 0..steps {
        let src = cur.values();
        let next: Vec<Complex64> = (0..lat.len())
            .into_par_iter()
            .map(|idx| {
                let (it, ix) = lat.unflatten(idx);
                let v = src[idx];
                let tp = lat.flatten((it + 1) % nt, &ix);
                let tm = lat.flatten((it + nt - 1) % nt, &ix);
                let mut box_v = (src[tp] + src[tm] - v * 2.0) * i0;
                for k in 0..d {
                    let mut up = ix;
                    let mut dn = ix;
                    up[k] = (ix[k] + 1) % nx;
                    dn[k] = (ix[k] + nx - 1) % nx;
                    let lap = src[lat.flatten(it, &up)] + src[lat.flatten(it, &dn)] - v * 2.0;
                    box_v -= lap * is;
                }
                v + rest * v + kin * box_v
            })
            .collect();
        if next.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(format!("field after step {}", step + 1)));
        }
        cur.values_mut().copy_from_slice(&next);
    }
    Ok(cur)
}

/// Per-step multiplier predicted by the continuum operator for the plane wave
/// `e^{(i/ħ)·p·x}`: `1 − i(m₀c²/4ħ)ε − i(ε/2m₀ħ)·p·p`.
pub fn continuum_multiplier(p_dot_p: f64, params: &KernelParams) -> Complex64 {
    let (m0, c, hbar, eps) = (params.m0(), params.c(), params.hbar(), params.epsilon());
    Complex64::new(
        1.0,
        -m0 * c * c * eps / (4.0 * hbar) - eps * p_dot_p / (2.0 * m0 * hbar),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{minkowski_dot, FourVector};
    use crate::propagator::lattice::SliceLattice;
    use std::f64::consts::PI;

    fn periodic(n: usize, len: f64, c: f64) -> SliceLattice {
        SliceLattice::new_1d(n, n, len / (n as f64 * c), len / n as f64, c, 0.0, 0.0).unwrap()
    }

    fn plane(lat: SliceLattice, p: &FourVector, hbar: f64) -> ComplexField {
        ComplexField::from_fn(lat, |x| {
            Complex64::from_polar(1.0, minkowski_dot(p, x).unwrap() / hbar)
        })
    }

    #[test]
    fn constant_field_picks_up_rest_phase() {
        let lat = periodic(8, 4.0, 1.0);
        let p = KernelParams::natural(1e-3, 0.0).unwrap();
        let psi = ComplexField::from_fn(lat, |_| Complex64::new(0.3, -0.2));
        let out = evolve_field(&psi, &p, 1).unwrap();
        let m = Complex64::new(1.0, -1e-3 / 4.0);
        for (a, b) in out.values().iter().zip(psi.values()) {
            assert!((a - b * m).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_stays_zero() {
        let lat = periodic(8, 4.0, 1.0);
        let p = KernelParams::natural(1e-3, 0.0).unwrap();
        let out = evolve_field(&ComplexField::zeros(lat), &p, 5).unwrap();
        assert!(out.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn resolved_plane_wave_multiplier() {
        // one period over 64 sites on each axis
        let hbar = 1.0;
        let lat = periodic(64, 2.0 * PI, 1.0);
        let params = KernelParams::natural(1e-5, 0.0).unwrap();
        for (k0, k1) in [(1.0, 0.0), (2.0, 1.0), (0.0, 3.0), (-1.0, 2.0)] {
            let p = FourVector::new_1d(k0 * hbar, -k1 * hbar).unwrap();
            let psi = plane(lat, &p, hbar);
            let out = evolve_field(&psi, &params, 1).unwrap();
            let expect = continuum_multiplier(p.interval(), &params);
            for (a, b) in out.values().iter().zip(psi.values()) {
                assert!((a / b - expect).norm() < 1e-6, "{} vs {expect}", a / b);
            }
        }
    }

    #[test]
    fn discrete_symbol_is_exact() {
        let lat = periodic(16, 2.0 * PI, 1.0);
        let params = KernelParams::natural(1e-3, 0.0).unwrap();
        let (k0, k1) = (3.0f64, 2.0f64);
        let p = FourVector::new_1d(k0, -k1).unwrap();
        let psi = plane(lat, &p, 1.0);
        let out = evolve_field(&psi, &params, 1).unwrap();
        let h = lat.dx();
        let s0 = (2.0 * (k0 * h).cos() - 2.0) / (h * h);
        let s1 = (2.0 * (k1 * h).cos() - 2.0) / (h * h);
        let expect = Complex64::new(1.0, -1e-3 / 4.0) + Complex64::new(0.0, 1e-3 / 2.0) * (s0 - s1);
        assert!((out.get(37) / psi.get(37) - expect).norm() < 1e-13);
    }

    #[test]
    fn rest_phase_removed_modulus_is_second_order() {
        let lat = periodic(32, 2.0 * PI, 1.0);
        let p = FourVector::new_1d(2.0, -1.0).unwrap();
        let psi = plane(lat, &p, 1.0);
        let growth = |eps: f64| {
            let params = KernelParams::natural(eps, 0.0).unwrap();
            let out = evolve_field(&psi, &params, 1).unwrap();
            (out.get(5).norm() / psi.get(5).norm() - 1.0).abs()
        };
        let r = growth(2e-3) / growth(1e-3);
        assert!((r - 4.0).abs() < 0.05, "{r}");
    }

    #[test]
    fn unstable_steps_are_refused() {
        let lat = periodic(64, 1.0, 1.0);
        let p = KernelParams::natural(0.1, 0.0).unwrap();
        let psi = ComplexField::zeros(lat);
        assert!(stability_number(&psi, &p) > 1.0);
        assert!(matches!(evolve_field(&psi, &p, 1), Err(Error::Unstable(_))));
    }
}
