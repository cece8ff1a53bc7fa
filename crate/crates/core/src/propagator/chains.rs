use num_complex::Complex64;

use super::kernel::single_step_kernel;
use super::lattice::SliceLattice;
use super::params::KernelParams;
use crate::error::{Error, Result};
use crate::minkowski::{classify_step, DomainSpec, FourVector, StepClass};
use crate::sum::pairwise_sum;

/// Path sum split by orientation class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSums {
    /// Chains whose steps are all forward (ℂ′).
    pub forward: Complex64,
    /// Chains with at least one reverse-time step (ℂ″).
    pub reverse: Complex64,
    pub forward_chains: usize,
    pub reverse_chains: usize,
}

impl ChainSums {
    pub fn total(&self) -> Complex64 {
        self.forward + self.reverse
    }
}

/// Largest number of chains [`enumerate_chains`] will visit.
pub const MAX_CHAINS: usize = 1 << 22;

/// Explicit enumeration of every chain `a → x₁ → … → x_{n−1} → b`.
///
/// Exponential in `n`; intended as an oracle on tiny lattices.
pub fn enumerate_chains(
    a: &FourVector,
    b: &FourVector,
    n: usize,
    lattice: &SliceLattice,
    spec: &DomainSpec,
    params: &KernelParams,
) -> Result<ChainSums> {
    if n == 0 {
        return Err(Error::param("n_slices", "must be at least 1"));
    }
    let sites = lattice.len();
    let count = (sites as u128).pow(n as u32 - 1);
    if count > MAX_CHAINS as u128 {
        return Err(Error::param("n_slices", "too many chains to enumerate"));
    }
    let events: Vec<FourVector> = (0..sites).map(|i| lattice.event(i)).collect();
    let cell = lattice.cell_measure();
    let eps = params.epsilon();

    let mut fwd = Vec::new();
    let mut rev = Vec::new();
    let mut idx = vec![0usize; n - 1];
    for _ in 0..count {
        let mut amp = Complex64::new(1.0, 0.0);
        let mut ok = true;
        let mut reverse = false;
        let mut prev = *a;
        for step in 0..n {
            let next = if step + 1 < n { events[idx[step]] } else { *b };
            let dx = next.try_sub(&prev)?;
            match classify_step(&dx, eps, spec) {
                StepClass::Inadmissible => {
                    ok = false;
                    break;
                }
                StepClass::Reverse => reverse = true,
                StepClass::Forward => {}
            }
            amp *= single_step_kernel(&dx, params)?;
            if step + 1 < n {
                amp *= cell;
            }
            prev = next;
        }
        if ok {
            if reverse {
                rev.push(amp);
            } else {
                fwd.push(amp);
            }
        }
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < sites {
                break;
            }
            *slot = 0;
        }
    }
    Ok(ChainSums {
        forward: pairwise_sum(&fwd),
        reverse: pairwise_sum(&rev),
        forward_chains: fwd.len(),
        reverse_chains: rev.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::transfer::sliced_propagator;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= 1e-12 * a.norm().max(b.norm()) + 1e-300
    }

    #[test]
    fn enumeration_matches_transfer() {
        let lat = SliceLattice::new_1d(5, 5, 0.3, 0.15, 1.0, 0.0, -0.3).unwrap();
        let p = KernelParams::natural(0.25, 0.05).unwrap();
        let a = FourVector::new_1d(-0.3, 0.0).unwrap();
        let b = FourVector::new_1d(1.5, 0.15).unwrap();
        for n in [2, 3] {
            let fwd_spec = DomainSpec::new(1.0, false).unwrap();
            let rev_spec = DomainSpec::new(1.0, true).unwrap();
            let only_fwd = enumerate_chains(&a, &b, n, &lat, &fwd_spec, &p).unwrap();
            let both = enumerate_chains(&a, &b, n, &lat, &rev_spec, &p).unwrap();
            assert_eq!(only_fwd.reverse_chains, 0);
            assert_eq!(only_fwd.forward_chains, both.forward_chains);
            assert!(close(only_fwd.forward, both.forward));
            let pf = sliced_propagator(&a, &b, n, &lat, &fwd_spec, &p).unwrap();
            let pr = sliced_propagator(&a, &b, n, &lat, &rev_spec, &p).unwrap();
            assert!(close(pf.amplitude, only_fwd.total()));
            assert!(close(pr.amplitude, both.total()));
            // the whole change is carried by reverse-time chains
            let scale = pr.amplitude.norm().max(pf.amplitude.norm());
            assert!((pr.amplitude - pf.amplitude - both.reverse).norm() <= 1e-12 * scale);
            if n == 3 {
                assert!(both.reverse_chains > 0);
            }
        }
    }
}
