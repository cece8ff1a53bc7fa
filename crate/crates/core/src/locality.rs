//! Measurement influence regions, critical time and overlap of first-order
//! perturbations.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{require_positive, Error, Result};
use crate::minkowski::{classify_step, DomainSpec, FourVector};
use crate::propagator::{single_step_kernel, ComplexField, KernelParams};
use crate::sum::{pairwise_sum, tree_sum};

/// Largest measurement strength accepted as perturbative.
pub const MAX_STRENGTH: f64 = 0.1;

/// Relative shrink applied to region radii when masking lattice fields, so
/// regions that only touch never share a site under rounding.
const MASK_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementEvent {
    pub event: FourVector,
    strength: f64,
    action_weight: f64,
}

impl MeasurementEvent {
    pub fn new(event: FourVector, strength: f64, action_weight: f64) -> Result<Self> {
        if !(strength.is_finite() && strength.abs() <= MAX_STRENGTH) {
            return Err(Error::param(
                "strength",
                format!("|strength| must not exceed {MAX_STRENGTH}, got {strength}"),
            ));
        }
        if !action_weight.is_finite() {
            return Err(Error::param("action_weight", "must be finite"));
        }
        Ok(Self {
            event,
            strength,
            action_weight,
        })
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn action_weight(&self) -> f64 {
        self.action_weight
    }

    fn time(&self, c: f64) -> f64 {
        self.event.x0() / c
    }
}

/// Causal support of one measurement with a time-reversal budget `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceRegion {
    pub source: MeasurementEvent,
    delta_rev: f64,
    c: f64,
}

impl InfluenceRegion {
    pub fn new(source: MeasurementEvent, delta_rev: f64, c: f64) -> Result<Self> {
        if !(delta_rev.is_finite() && delta_rev >= 0.0) {
            return Err(Error::param("delta_rev", "must be finite and ≥ 0"));
        }
        require_positive("c", c)?;
        Ok(Self {
            source,
            delta_rev,
            c,
        })
    }

    pub fn delta_rev(&self) -> f64 {
        self.delta_rev
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Spatial radius at coordinate time `t`, or `None` before the region opens.
    pub fn radius_at(&self, t: f64) -> Option<f64> {
        let t0 = self.source.time(self.c);
        if t < t0 - self.delta_rev {
            None
        } else {
            Some(self.c * (t - t0 + 2.0 * self.delta_rev))
        }
    }

    fn distance(&self, point: &FourVector) -> f64 {
        point
            .spatial()
            .iter()
            .zip(self.source.event.spatial())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Open interior used for lattice masks.
    fn mask(&self, point: &FourVector) -> bool {
        match self.radius_at(point.x0() / self.c) {
            Some(r) => self.distance(point) < r * (1.0 - MASK_SLACK),
            None => false,
        }
    }
}

/// `t ≥ t′ − Δ` and `|x⃗ − x⃗′| ≤ c(t − t′ + 2Δ)`.
pub fn region_contains(r: &InfluenceRegion, point: &FourVector) -> bool {
    match r.radius_at(point.x0() / r.c) {
        Some(radius) => r.distance(point) <= radius,
        None => false,
    }
}

fn separation(e1: &MeasurementEvent, e2: &MeasurementEvent) -> Result<f64> {
    Ok(e1.event.try_sub(&e2.event)?.spatial_norm())
}

/// `t_c = |x⃗′ − x⃗″|/(2c) + (t′ + t″)/2`
pub fn critical_time(e1: &MeasurementEvent, e2: &MeasurementEvent, c: f64) -> Result<f64> {
    require_positive("c", c)?;
    Ok(separation(e1, e2)? / (2.0 * c) + 0.5 * (e1.time(c) + e2.time(c)))
}

/// Whether the two influence regions share no interior at time `t`; exact
/// contact counts as disjoint.
pub fn regions_disjoint_at(
    e1: &MeasurementEvent,
    e2: &MeasurementEvent,
    t: f64,
    delta_rev: f64,
    c: f64,
) -> Result<bool> {
    let r1 = InfluenceRegion::new(*e1, delta_rev, c)?;
    let r2 = InfluenceRegion::new(*e2, delta_rev, c)?;
    Ok(match (r1.radius_at(t), r2.radius_at(t)) {
        (Some(a), Some(b)) => a + b <= separation(e1, e2)?,
        _ => true,
    })
}

/// Earliest time at which the two regions overlap:
/// `(t′ + t″)/2 + |Δx⃗|/(2c) − 2Δ`.
pub fn first_contact_time(
    e1: &MeasurementEvent,
    e2: &MeasurementEvent,
    delta_rev: f64,
    c: f64,
) -> Result<f64> {
    InfluenceRegion::new(*e1, delta_rev, c)?;
    Ok(critical_time(e1, e2, c)? - 2.0 * delta_rev)
}

/// `|Δx⃗| / (2·(t_meet − (t′+t″)/2))`, or `+∞` when contact is immediate.
///
/// Evaluated as `c / (1 − 4cΔ/|Δx⃗|)`, which is exactly `c` at `Δ = 0`.
pub fn correlation_speed(
    e1: &MeasurementEvent,
    e2: &MeasurementEvent,
    delta_rev: f64,
    c: f64,
) -> Result<f64> {
    InfluenceRegion::new(*e1, delta_rev, c)?;
    let sep = separation(e1, e2)?;
    if !(sep > 0.0) {
        return Err(Error::param("events", "spatial separation must be positive"));
    }
    let denom = 1.0 - 4.0 * c * delta_rev / sep;
    if delta_rev >= sep / (4.0 * c) || denom <= 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(c / denom)
    }
}

/// First-order perturbation of `ψ₀` by one measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub field: ComplexField,
    /// Lattice site used for the measurement event.
    pub site: usize,
    /// Set when the event was moved to the nearest lattice site.
    pub snapped: bool,
}

/// Path sum through the measurement site, scaled by
/// `(i/ħ)·strength·action_weight` and masked to the influence region.
///
/// The incoming amplitude at the site is one slice of `ψ₀` propagated by the
/// single-step kernel; the outgoing part is one further step to each site.
pub fn perturbation_field(
    psi0: &ComplexField,
    e: &MeasurementEvent,
    spec: &DomainSpec,
    params: &KernelParams,
    delta_rev: f64,
) -> Result<Perturbation> {
    let lattice = *psi0.lattice();
    let region = InfluenceRegion::new(*e, delta_rev, spec.c())?;
    let (site, exact) = lattice
        .nearest_site(&e.event)
        .ok_or_else(|| Error::param("event", "measurement lies outside the lattice"))?;
    let eps = params.epsilon();
    let zero = Complex64::new(0.0, 0.0);

    let mut reach = false;
    let incoming: Vec<Complex64> = (0..lattice.len())
        .map(|x| -> Result<Complex64> {
            let dx = lattice.offset(site, x);
            if classify_step(&dx, eps, spec).is_admissible() {
                reach = true;
                Ok(single_step_kernel(&dx, params)? * psi0.get(x) * lattice.cell_measure())
            } else {
                Ok(zero)
            }
        })
        .collect::<Result<_>>()?;
    if !reach {
        return Err(Error::EmptyDomain);
    }
    let amp_in = pairwise_sum(&incoming);
    let coupling = Complex64::new(0.0, e.strength * e.action_weight / params.hbar());
    let source = coupling * amp_in;

    let values: Vec<Complex64> = (0..lattice.len())
        .into_par_iter()
        .map(|z| -> Result<Complex64> {
            let ez = lattice.event(z);
            if !region.mask(&ez) {
                return Ok(zero);
            }
            let dx = lattice.offset(z, site);
            if !classify_step(&dx, eps, spec).is_admissible() {
                return Ok(zero);
            }
            Ok(source * single_step_kernel(&dx, params)?)
        })
        .collect::<Result<_>>()?;
    Ok(Perturbation {
        field: ComplexField::from_values(lattice, values)?,
        site,
        snapped: !exact,
    })
}

/// `Σ conj(f)·g·dxᵈ` over time slice `it`, skipping sites where either field
/// is exactly zero (so disjoint supports give `+0` bitwise).
pub fn overlap(f: &ComplexField, g: &ComplexField, it: usize) -> Result<Complex64> {
    if f.lattice() != g.lattice() {
        return Err(Error::LatticeMismatch);
    }
    let a = f.slice(it)?;
    let b = g.slice(it)?;
    let terms: Vec<Complex64> = a
        .iter()
        .zip(b)
        .filter(|(x, y)| **x != Complex64::new(0.0, 0.0) && **y != Complex64::new(0.0, 0.0))
        .map(|(x, y)| x.conj() * y)
        .collect();
    if terms.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(tree_sum(terms.len(), &|i| terms[i]) * f.lattice().spatial_cell())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::{enumerate_chains, SliceLattice};
    use proptest::prelude::*;

    fn ev(t: f64, x: f64) -> MeasurementEvent {
        MeasurementEvent::new(FourVector::new_1d(t, x).unwrap(), 0.05, 1.0).unwrap()
    }

    fn pt(t: f64, x: f64) -> FourVector {
        FourVector::new_1d(t, x).unwrap()
    }

    #[test]
    fn containment_examples() {
        let r = InfluenceRegion::new(ev(0.0, 0.0), 0.0, 1.0).unwrap();
        assert!(!region_contains(&r, &pt(-0.01, 0.0)));
        assert!(region_contains(&r, &pt(1.0, 1.0)));
        assert!(!region_contains(&r, &pt(1.0, 1.0 + 1e-9)));
        let b = InfluenceRegion::new(ev(0.0, 0.0), 0.5, 1.0).unwrap();
        assert!(region_contains(&b, &pt(1.0, -2.0)));
        assert!(!region_contains(&b, &pt(1.0, 2.0 + 1e-9)));
        assert!(region_contains(&b, &pt(-0.5, 0.5)));
        assert!(!region_contains(&b, &pt(-0.51, 0.0)));
    }

    #[test]
    fn critical_time_examples() {
        assert_eq!(critical_time(&ev(0.0, 0.0), &ev(0.0, 1.0), 1.0).unwrap(), 0.5);
        assert_eq!(critical_time(&ev(0.7, 0.3), &ev(0.7, 0.3), 1.0).unwrap(), 0.7);
        assert_eq!(critical_time(&ev(1.0, 0.0), &ev(3.0, 4.0), 1.0).unwrap(), 4.0);
    }

    #[test]
    fn disjointness_examples() {
        let (a, b) = (ev(0.0, 0.0), ev(0.0, 1.0));
        let tc = critical_time(&a, &b, 1.0).unwrap();
        assert!(regions_disjoint_at(&a, &b, tc - 0.01, 0.0, 1.0).unwrap());
        assert!(regions_disjoint_at(&a, &b, tc, 0.0, 1.0).unwrap());
        assert!(!regions_disjoint_at(&a, &b, tc + 0.01, 0.0, 1.0).unwrap());
        assert!(!regions_disjoint_at(&a, &b, tc - 0.01, 0.1, 1.0).unwrap());
    }

    #[test]
    fn speed_examples() {
        let (a, b) = (ev(0.0, 0.0), ev(0.0, 1.0));
        assert_eq!(correlation_speed(&a, &b, 0.0, 1.0).unwrap(), 1.0);
        let v = correlation_speed(&a, &b, 0.1, 1.0).unwrap();
        assert!((v - 1.0 / 0.6).abs() < 1e-14);
        assert_eq!(correlation_speed(&a, &b, 0.25, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(correlation_speed(&a, &b, 0.3, 1.0).unwrap(), f64::INFINITY);
        assert!(correlation_speed(&a, &a, 0.0, 1.0).is_err());
        // the first-contact construction gives the same number
        let tm = first_contact_time(&a, &b, 0.1, 1.0).unwrap();
        assert!((1.0 / (2.0 * tm) - v).abs() < 1e-12);
    }

    #[test]
    fn strength_is_perturbative() {
        assert!(MeasurementEvent::new(pt(0.0, 0.0), 0.2, 1.0).is_err());
        assert!(MeasurementEvent::new(pt(0.0, 0.0), -0.1, 1.0).is_ok());
    }

    proptest! {
        #[test]
        fn speed_at_zero_budget_is_c(x1 in -5.0f64..5.0, x2 in -5.0f64..5.0, t1 in -3.0f64..3.0, c in 0.1f64..10.0) {
            prop_assume!((x1 - x2).abs() > 1e-6);
            let a = MeasurementEvent::new(pt(c * t1, x1), 0.0, 1.0).unwrap();
            let b = MeasurementEvent::new(pt(0.0, x2), 0.0, 1.0).unwrap();
            prop_assert_eq!(correlation_speed(&a, &b, 0.0, c).unwrap(), c);
        }

        #[test]
        fn speed_is_monotone(d1 in 0.0f64..1.0, d2 in 0.0f64..1.0, sep in 0.1f64..5.0) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            let (a, b) = (ev(0.0, 0.0), ev(0.0, sep));
            prop_assert!(correlation_speed(&a, &b, lo, 1.0).unwrap() <= correlation_speed(&a, &b, hi, 1.0).unwrap());
        }

        #[test]
        fn broadening_is_monotone(t in -2.0f64..3.0, x in -4.0f64..4.0, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            let small = InfluenceRegion::new(ev(0.0, 0.0), lo, 1.0).unwrap();
            let big = InfluenceRegion::new(ev(0.0, 0.0), hi, 1.0).unwrap();
            let p = pt(t, x);
            prop_assert!(!region_contains(&small, &p) || region_contains(&big, &p));
        }

        #[test]
        fn critical_time_symmetry(t1 in -3.0f64..3.0, x1 in -3.0f64..3.0, t2 in -3.0f64..3.0, x2 in -3.0f64..3.0, s in -2.0f64..2.0) {
            let (a, b) = (ev(t1, x1), ev(t2, x2));
            prop_assert_eq!(critical_time(&a, &b, 1.0).unwrap(), critical_time(&b, &a, 1.0).unwrap());
            let (sa, sb) = (ev(t1 + s, x1 + 0.5), ev(t2 + s, x2 + 0.5));
            let shifted = critical_time(&sa, &sb, 1.0).unwrap();
            prop_assert!((shifted - critical_time(&a, &b, 1.0).unwrap() - s).abs() < 1e-12);
        }
    }

    fn small_world() -> (SliceLattice, DomainSpec, KernelParams, ComplexField) {
        let lat = SliceLattice::new_1d(5, 5, 0.25, 0.2, 1.0, 0.0, -0.4).unwrap();
        let spec = DomainSpec::forward_only(1.0).unwrap();
        let p = KernelParams::natural(0.25, 0.02).unwrap();
        let psi0 = ComplexField::from_fn(lat, |x| Complex64::from_polar(1.0, 0.3 * x.spatial()[0]));
        (lat, spec, p, psi0)
    }

    #[test]
    fn zero_strength_gives_zero_field() {
        let (lat, spec, p, psi0) = small_world();
        let e = MeasurementEvent::new(lat.event(lat.flatten(1, &[2])), 0.0, 1.0).unwrap();
        let f = perturbation_field(&psi0, &e, &spec, &p, 0.0).unwrap();
        assert!(f.field.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn field_support_matches_chain_enumeration() {
        let (lat, spec, p, psi0) = small_world();
        for delta in [0.0, 0.3] {
            for spec in [spec, DomainSpec::new(1.0, true).unwrap()] {
                let e = MeasurementEvent::new(lat.event(lat.flatten(1, &[2])), 0.05, 2.0).unwrap();
                let out = perturbation_field(&psi0, &e, &spec, &p, delta).unwrap();
                assert!(!out.snapped);
                let region = InfluenceRegion::new(e, delta, 1.0).unwrap();
                for z in 0..lat.len() {
                    let through = enumerate_chains(&e.event, &lat.event(z), 1, &lat, &spec, &p)
                        .unwrap();
                    let chain = through.forward_chains + through.reverse_chains > 0;
                    let expect = chain && region.mask(&lat.event(z));
                    let v = out.field.get(z);
                    assert_eq!(v != Complex64::new(0.0, 0.0), expect, "site {z}");
                    if v != Complex64::new(0.0, 0.0) {
                        assert!(region_contains(&region, &lat.event(z)));
                    }
                }
            }
        }
    }

    #[test]
    fn unreachable_site_is_an_empty_domain() {
        let (lat, spec, p, psi0) = small_world();
        let e = MeasurementEvent::new(lat.event(lat.flatten(0, &[2])), 0.05, 1.0).unwrap();
        assert_eq!(perturbation_field(&psi0, &e, &spec, &p, 0.0), Err(Error::EmptyDomain));
    }

    #[test]
    fn off_lattice_event_is_snapped() {
        let (lat, spec, p, psi0) = small_world();
        let e = MeasurementEvent::new(pt(0.51, 0.03), 0.05, 1.0).unwrap();
        let out = perturbation_field(&psi0, &e, &spec, &p, 0.0).unwrap();
        assert!(out.snapped);
        assert_eq!(out.site, lat.flatten(2, &[2]));
    }

    #[test]
    fn overlap_of_zero_field_is_zero() {
        let (lat, spec, p, psi0) = small_world();
        let e = MeasurementEvent::new(lat.event(lat.flatten(1, &[2])), 0.05, 1.0).unwrap();
        let f = perturbation_field(&psi0, &e, &spec, &p, 0.0).unwrap().field;
        let z = ComplexField::zeros(lat);
        for it in 0..lat.nt() {
            let o = overlap(&f, &z, it).unwrap();
            assert_eq!((o.re.to_bits(), o.im.to_bits()), (0, 0));
        }
        assert_eq!(overlap(&f, &z, 5), Err(Error::SliceOutOfRange(5)));
    }
}
