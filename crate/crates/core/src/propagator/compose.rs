use num_complex::Complex64;
use rayon::prelude::*;

use super::kernel::OffsetTable;
use super::lattice::SliceLattice;
use super::params::KernelParams;
use crate::error::{Error, Result};
use crate::minkowski::DomainSpec;
use crate::sum::tree_sum;

/// A kernel sampled on all site pairs of a lattice.
///
/// Row index is the target site, column index the source site. `support`
/// marks pairs joined by at least one admissible chain, independent of
/// cancellations in the amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelOnLattice {
    lattice: SliceLattice,
    spec: DomainSpec,
    values: Vec<Complex64>,
    support: Vec<bool>,
}

impl KernelOnLattice {
    /// The single-step kernel restricted to admissible steps.
    pub fn single_step(
        lattice: &SliceLattice,
        spec: &DomainSpec,
        params: &KernelParams,
    ) -> Result<Self> {
        let table = OffsetTable::new(lattice, spec, params)?;
        let n = lattice.len();
        let mut values = Vec::with_capacity(n * n);
        let mut support = Vec::with_capacity(n * n);
        for to in 0..n {
            for from in 0..n {
                values.push(table.value(lattice, to, from));
                support.push(table.class(lattice, to, from).is_admissible());
            }
        }
        Ok(Self {
            lattice: *lattice,
            spec: *spec,
            values,
            support,
        })
    }

    /// Discrete delta: `1/cellMeasure` on the diagonal.
    pub fn delta(lattice: &SliceLattice, spec: &DomainSpec) -> Self {
        let n = lattice.len();
        let inv = 1.0 / lattice.cell_measure();
        let mut values = vec![Complex64::new(0.0, 0.0); n * n];
        let mut support = vec![false; n * n];
        for i in 0..n {
            values[i * n + i] = Complex64::new(inv, 0.0);
            support[i * n + i] = true;
        }
        Self {
            lattice: *lattice,
            spec: *spec,
            values,
            support,
        }
    }

    pub fn lattice(&self) -> &SliceLattice {
        &self.lattice
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.lattice.len()
    }

    /// `K(to, from)`
    pub fn get(&self, to: usize, from: usize) -> Complex64 {
        self.values[to * self.size() + from]
    }

    pub fn supported(&self, to: usize, from: usize) -> bool {
        self.support[to * self.size() + from]
    }
}

/// `K(b,a) = Σ_{x′} K_II(b,x′)·K_I(x′,a)·cellMeasure` over intermediate sites
/// reachable from `a` and reaching `b`.
pub fn compose(
    k_i: &KernelOnLattice,
    k_ii: &KernelOnLattice,
    lattice: &SliceLattice,
    spec: &DomainSpec,
) -> Result<KernelOnLattice> {
    for k in [k_i, k_ii] {
        if k.lattice != *lattice || k.spec != *spec {
            return Err(Error::LatticeMismatch);
        }
    }
    let n = lattice.len();
    let cell = lattice.cell_measure();
    let zero = Complex64::new(0.0, 0.0);
    let rows: Vec<(Vec<Complex64>, Vec<bool>)> = (0..n)
        .into_par_iter()
        .map(|b| {
            let mut vals = Vec::with_capacity(n);
            let mut sup = Vec::with_capacity(n);
            let row_ii = &k_ii.values[b * n..(b + 1) * n];
            let sup_ii = &k_ii.support[b * n..(b + 1) * n];
            for a in 0..n {
                let reach = (0..n).any(|x| sup_ii[x] && k_i.support[x * n + a]);
                sup.push(reach);
                if !reach {
                    vals.push(zero);
                    continue;
                }
                vals.push(tree_sum(n, &|x| {
                    if sup_ii[x] && k_i.support[x * n + a] {
                        row_ii[x] * k_i.values[x * n + a] * cell
                    } else {
                        zero
                    }
                }));
            }
            (vals, sup)
        })
        .collect();
    let mut values = Vec::with_capacity(n * n);
    let mut support = Vec::with_capacity(n * n);
    for (v, s) in rows {
        values.extend(v);
        support.extend(s);
    }
    Ok(KernelOnLattice {
        lattice: *lattice,
        spec: *spec,
        values,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::transfer::sliced_propagator;

    fn setup(allow_reverse: bool) -> (SliceLattice, DomainSpec, KernelParams) {
        (
            SliceLattice::new_1d(5, 5, 0.5, 0.2, 1.0, 0.0, -0.4).unwrap(),
            DomainSpec::new(1.0, allow_reverse).unwrap(),
            KernelParams::natural(0.45, 0.02).unwrap(),
        )
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn delta_is_the_identity() {
        let (lat, spec, p) = setup(true);
        let k = KernelOnLattice::single_step(&lat, &spec, &p).unwrap();
        let delta = KernelOnLattice::delta(&lat, &spec);
        for composed in [
            compose(&delta, &k, &lat, &spec).unwrap(),
            compose(&k, &delta, &lat, &spec).unwrap(),
        ] {
            for i in 0..lat.len() {
                for j in 0..lat.len() {
                    assert!(close(composed.get(i, j), k.get(i, j), 1e-14));
                }
            }
        }
    }

    #[test]
    fn composition_is_associative() {
        for rev in [false, true] {
            let (lat, spec, p) = setup(rev);
            let k = KernelOnLattice::single_step(&lat, &spec, &p).unwrap();
            let kk = compose(&k, &k, &lat, &spec).unwrap();
            let left = compose(&kk, &k, &lat, &spec).unwrap();
            let right = compose(&k, &kk, &lat, &spec).unwrap();
            for i in 0..lat.len() {
                for j in 0..lat.len() {
                    assert_eq!(left.supported(i, j), right.supported(i, j));
                    assert!(close(left.get(i, j), right.get(i, j), 1e-12));
                }
            }
        }
    }

    #[test]
    fn two_slices_match_the_propagator() {
        let (lat, spec, p) = setup(false);
        let k = KernelOnLattice::single_step(&lat, &spec, &p).unwrap();
        let kk = compose(&k, &k, &lat, &spec).unwrap();
        for a in 0..lat.len() {
            for b in 0..lat.len() {
                let r = sliced_propagator(&lat.event(a), &lat.event(b), 2, &lat, &spec, &p).unwrap();
                assert_eq!(r.empty_domain, !kk.supported(b, a));
                assert!(close(r.amplitude, kk.get(b, a), 1e-12));
            }
        }
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let (lat, spec, p) = setup(false);
        let other = SliceLattice::new_1d(5, 5, 0.5, 0.2, 1.0, 0.0, 0.0).unwrap();
        let k = KernelOnLattice::single_step(&lat, &spec, &p).unwrap();
        let k2 = KernelOnLattice::single_step(&other, &spec, &p).unwrap();
        assert_eq!(compose(&k, &k2, &lat, &spec), Err(Error::LatticeMismatch));
        let rev = DomainSpec::new(1.0, true).unwrap();
        assert_eq!(compose(&k, &k, &lat, &rev), Err(Error::LatticeMismatch));
    }
}
