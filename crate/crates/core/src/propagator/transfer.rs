use num_complex::Complex64;
use rayon::prelude::*;

use super::kernel::{single_step_kernel, OffsetTable};
use super::lattice::SliceLattice;
use super::params::KernelParams;
use crate::error::{Error, Result};
use crate::minkowski::{classify_step, DomainSpec, FourVector};
use crate::sum::tree_sum;

/// Amplitude of a constrained path sum.
///
/// `empty_domain` is set when no admissible chain joins the endpoints; the
/// amplitude is then exactly `+0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub amplitude: Complex64,
    pub empty_domain: bool,
}

impl Propagation {
    fn empty() -> Self {
        Self {
            amplitude: Complex64::new(0.0, 0.0),
            empty_domain: true,
        }
    }
}

/// Weight `O(x)` inserted at one intermediate slice.
pub type Observable<'a> = &'a (dyn Fn(&FourVector) -> Complex64 + Sync);

/// Sliced path integral from `a` to `b` with `n` proper-time steps of width ε.
///
/// Intermediate events range over every lattice site; each step is classified
/// against `spec` and inadmissible steps contribute nothing.
pub fn sliced_propagator(
    a: &FourVector,
    b: &FourVector,
    n: usize,
    lattice: &SliceLattice,
    spec: &DomainSpec,
    params: &KernelParams,
) -> Result<Propagation> {
    chain_transfer(a, b, n, lattice, spec, params, None)
}

/// Same path sum with `O(x_k)` inserted at intermediate slice `k`.
#[allow(clippy::too_many_arguments)]
pub fn observable_expectation(
    o: Observable<'_>,
    k: usize,
    a: &FourVector,
    b: &FourVector,
    n: usize,
    lattice: &SliceLattice,
    spec: &DomainSpec,
    params: &KernelParams,
) -> Result<Propagation> {
    if k == 0 || k >= n {
        return Err(Error::param("k", format!("must satisfy 1 ≤ k ≤ n−1 = {}", n.saturating_sub(1))));
    }
    chain_transfer(a, b, n, lattice, spec, params, Some((k, o)))
}

fn check_inputs(a: &FourVector, b: &FourVector, n: usize, lattice: &SliceLattice) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n_slices", "must be at least 1"));
    }
    a.try_sub(b)?;
    if a.d() != lattice.d() {
        return Err(Error::DimensionMismatch {
            left: a.d(),
            right: lattice.d(),
        });
    }
    Ok(())
}

fn chain_transfer(
    a: &FourVector,
    b: &FourVector,
    n: usize,
    lattice: &SliceLattice,
    spec: &DomainSpec,
    params: &KernelParams,
    insert: Option<(usize, Observable<'_>)>,
) -> Result<Propagation> {
    check_inputs(a, b, n, lattice)?;
    let eps = params.epsilon();
    let zero = Complex64::new(0.0, 0.0);

    if n == 1 {
        let dx = b.try_sub(a)?;
        if !classify_step(&dx, eps, spec).is_admissible() {
            return Ok(Propagation::empty());
        }
        return Ok(Propagation {
            amplitude: single_step_kernel(&dx, params)?,
            empty_domain: false,
        });
    }

    let sites = lattice.len();
    let cell = lattice.cell_measure();
    let events: Vec<FourVector> = (0..sites).map(|i| lattice.event(i)).collect();

    // first intermediate event x₁
    let mut layer: Vec<(Complex64, bool)> = events
        .par_iter()
        .map(|x| -> Result<(Complex64, bool)> {
            let dx = x.try_sub(a)?;
            if classify_step(&dx, eps, spec).is_admissible() {
                Ok((single_step_kernel(&dx, params)?, true))
            } else {
                Ok((zero, false))
            }
        })
        .collect::<Result<_>>()?;
    apply_observable(&mut layer, &events, 1, insert);

    if n > 2 {
        let table = OffsetTable::new(lattice, spec, params)?;
        for k in 2..n {
            let prev = &layer;
            let next: Vec<(Complex64, bool)> = (0..sites)
                .into_par_iter()
                .map(|y| {
                    let reach = (0..sites)
                        .any(|x| prev[x].1 && table.class(lattice, y, x).is_admissible());
                    if !reach {
                        return (zero, false);
                    }
                    let s = tree_sum(sites, &|x| {
                        if prev[x].1 {
                            table.value(lattice, y, x) * prev[x].0 * cell
                        } else {
                            zero
                        }
                    });
                    (s, true)
                })
                .collect();
            layer = next;
            apply_observable(&mut layer, &events, k, insert);
        }
    }

    let last: Vec<(Complex64, bool)> = events
        .par_iter()
        .zip(layer.par_iter())
        .map(|(x, &(v, r))| -> Result<(Complex64, bool)> {
            if !r {
                return Ok((zero, false));
            }
            let dx = b.try_sub(x)?;
            if classify_step(&dx, eps, spec).is_admissible() {
                Ok((single_step_kernel(&dx, params)? * v * cell, true))
            } else {
                Ok((zero, false))
            }
        })
        .collect::<Result<_>>()?;

    if !last.iter().any(|&(_, r)| r) {
        return Ok(Propagation::empty());
    }
    let amplitude = tree_sum(sites, &|x| last[x].0);
    if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
        return Err(Error::NonFinite("sliced propagator".into()));
    }
    Ok(Propagation {
        amplitude,
        empty_domain: false,
    })
}

fn apply_observable(
    layer: &mut [(Complex64, bool)],
    events: &[FourVector],
    k: usize,
    insert: Option<(usize, Observable<'_>)>,
) {
    if let Some((slot, o)) = insert {
        if slot == k {
            layer
                .par_iter_mut()
                .zip(events.par_iter())
                .for_each(|(v, x)| v.0 *= o(x));
        }
    }
}
