//! Formal Lagrangian and Hamiltonian mechanics on world lines.
//!
//! The evolution parameter is proper time τ. Momenta are stored with upper
//! indices and paired with velocities through the Minkowski product, so the
//! free Lagrangian `L = (m₀/2)·ẋ·ẋ` has conjugate momentum `p = m₀ẋ` and the
//! Legendre transform returns `M = p·ẋ − L`.

use crate::error::{require_positive, Error, Result};
use crate::minkowski::{
    classify_path, minkowski_dot, DomainSpec, FourVector, PathClass, WorldlinePath,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagrangianKind {
    FreeParticle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianSpec {
    pub kind: LagrangianKind,
    m0: f64,
    c: f64,
}

impl LagrangianSpec {
    pub fn free(m0: f64, c: f64) -> Result<Self> {
        require_positive("m0", m0)?;
        require_positive("c", c)?;
        Ok(Self {
            kind: LagrangianKind::FreeParticle,
            m0,
            c,
        })
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Which expression of the formal Hamiltonian is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianForm {
    /// `(c/2)·√((p+A)·(p+A))`
    Sqrt,
    /// `(p+A)·(p+A)/(2m₀)`
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub form: HamiltonianForm,
    m0: f64,
    c: f64,
    gauge: FourVector,
}

impl HamiltonianSpec {
    pub fn new(form: HamiltonianForm, m0: f64, c: f64, gauge: FourVector) -> Result<Self> {
        require_positive("m0", m0)?;
        require_positive("c", c)?;
        Ok(Self {
            form,
            m0,
            c,
            gauge,
        })
    }

    /// Spec with a vanishing gauge potential in `d` spatial dimensions.
    pub fn free(form: HamiltonianForm, m0: f64, c: f64, d: usize) -> Result<Self> {
        Self::new(form, m0, c, FourVector::zero(d)?)
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gauge(&self) -> &FourVector {
        &self.gauge
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub tau: f64,
    pub x: FourVector,
    pub p: FourVector,
}

/// Output of [`hamilton_flow`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrajectory {
    samples: Vec<PhaseSample>,
    /// Gradient evaluations that hit the lightlike `p + A` limit of the
    /// square-root form and were treated as `M = 0`, `∂M/∂p = 0`.
    pub degenerate_evaluations: usize,
}

impl PhaseTrajectory {
    pub fn new(samples: Vec<PhaseSample>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].tau > w[0].tau)) {
            return Err(Error::InvalidPath("τ samples not strictly increasing".into()));
        }
        Ok(Self {
            samples,
            degenerate_evaluations: 0,
        })
    }

    pub fn samples(&self) -> &[PhaseSample] {
        &self.samples
    }

    /// The `x` projection as a world line.
    pub fn worldline(&self) -> Result<WorldlinePath> {
        WorldlinePath::new(self.samples.iter().map(|s| (s.x, s.tau)).collect())
    }

    pub fn boosted(&self, rapidity: f64) -> PhaseTrajectory {
        use crate::minkowski::boost;
        Self {
            samples: self
                .samples
                .iter()
                .map(|s| PhaseSample {
                    tau: s.tau,
                    x: boost(&s.x, rapidity),
                    p: boost(&s.p, rapidity),
                })
                .collect(),
            degenerate_evaluations: self.degenerate_evaluations,
        }
    }
}

pub fn lagrangian_value(spec: &LagrangianSpec, xdot: &FourVector) -> f64 {
    match spec.kind {
        LagrangianKind::FreeParticle => 0.5 * spec.m0 * xdot.interval(),
    }
}

/// Rectangle-rule action `Σ L(δx/δτ)·δτ` over an admissible, evenly stamped path.
///
/// A path whose nodes all coincide has zero action and skips the domain check.
pub fn discrete_action(path: &WorldlinePath, spec: &LagrangianSpec) -> Result<f64> {
    if path.uniform_step().is_none() {
        return Err(Error::InvalidPath("action requires uniform δτ".into()));
    }
    let zero_span = path.segments().all(|(dx, _)| dx.euclidean_norm_sq() == 0.0);
    if zero_span {
        return Ok(0.0);
    }
    let domain = DomainSpec::new(spec.c, true)?;
    if classify_path(path, &domain) == PathClass::Inadmissible {
        let segment = path
            .segments()
            .position(|(dx, h)| !crate::minkowski::classify_step(&dx, h, &domain).is_admissible())
            .unwrap_or(0);
        return Err(Error::InadmissiblePath { segment });
    }
    Ok(path
        .segments()
        .map(|(dx, h)| lagrangian_value(spec, &dx.scale(1.0 / h)) * h)
        .sum())
}

/// Central-difference residual of `d/dτ(∂L/∂ẋ) − ∂L/∂x` at each interior node.
pub fn euler_lagrange_residual(
    path: &WorldlinePath,
    spec: &LagrangianSpec,
) -> Result<Vec<FourVector>> {
    if path.len() < 3 {
        return Err(Error::TooFewNodes {
            needed: 3,
            got: path.len(),
        });
    }
    let h = path
        .uniform_step()
        .ok_or_else(|| Error::InvalidPath("residual requires uniform δτ".into()))?;
    let nodes = path.nodes();
    let d = path.d();
    let out = nodes
        .windows(3)
        .map(|w| {
            let mut comps = [0.0; 4];
            for (mu, c) in comps.iter_mut().enumerate().take(d + 1) {
                let (a, b, e) = (
                    w[0].0.components()[mu],
                    w[1].0.components()[mu],
                    w[2].0.components()[mu],
                );
                *c = spec.m0 * (e - 2.0 * b + a) / (h * h);
            }
            FourVector::from_parts(comps, d)
        })
        .collect();
    Ok(out)
}

/// Conjugate momentum and formal Hamiltonian for a given velocity.
pub fn legendre(spec: &LagrangianSpec, xdot: &FourVector) -> (FourVector, f64) {
    let p = xdot.scale(spec.m0);
    let pairing = minkowski_dot(&p, xdot).expect("same dimension");
    (p, pairing - lagrangian_value(spec, xdot))
}

fn shifted(spec: &HamiltonianSpec, p: &FourVector) -> Result<FourVector> {
    p.try_add(&spec.gauge)
}

/// Formal Hamiltonian `M(p)` with the minimal-coupling shift `p → p + A`.
///
/// The square-root form returns 0 exactly on the lightlike boundary.
pub fn hamiltonian_value(spec: &HamiltonianSpec, p: &FourVector) -> Result<f64> {
    let q = shifted(spec, p)?;
    let n = q.interval();
    match spec.form {
        HamiltonianForm::Quadratic => Ok(n / (2.0 * spec.m0)),
        HamiltonianForm::Sqrt => {
            if n < 0.0 {
                Err(Error::NegativeNorm(n))
            } else {
                Ok(0.5 * spec.c * n.sqrt())
            }
        }
    }
}

/// `∂M/∂p` as a contravariant velocity, plus a flag for the degenerate
/// lightlike case of the square-root form.
pub fn momentum_gradient(spec: &HamiltonianSpec, p: &FourVector) -> Result<(FourVector, bool)> {
    let q = shifted(spec, p)?;
    match spec.form {
        HamiltonianForm::Quadratic => Ok((q.scale(1.0 / spec.m0), false)),
        HamiltonianForm::Sqrt => {
            let n = q.interval();
            if n < 0.0 {
                Err(Error::NegativeNorm(n))
            } else if n == 0.0 {
                Ok((FourVector::zero(q.d())?, true))
            } else {
                Ok((q.scale(0.5 * spec.c / n.sqrt()), false))
            }
        }
    }
}

/// Classic fourth-order Runge–Kutta integration of `ẋ = ∂M/∂p`, `ṗ = −∂M/∂x`.
///
/// The gauge potential is constant, so `∂M/∂x = 0` and `p` is carried
/// through the stages unchanged.
pub fn hamilton_flow(
    spec: &HamiltonianSpec,
    x0: &FourVector,
    p0: &FourVector,
    tau_span: f64,
    steps: usize,
) -> Result<PhaseTrajectory> {
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    require_positive("tau_span", tau_span)?;
    x0.same_dim(p0)?;
    hamiltonian_value(spec, p0)?;

    let h = tau_span / steps as f64;
    let d = x0.d();
    let mut degenerate = 0usize;
    let mut deriv = |p: &FourVector| -> Result<(FourVector, FourVector)> {
        let (v, deg) = momentum_gradient(spec, p)?;
        degenerate += deg as usize;
        Ok((v, FourVector::zero(d)?))
    };

    let mut samples = Vec::with_capacity(steps + 1);
    let (mut x, mut p) = (*x0, *p0);
    samples.push(PhaseSample { tau: 0.0, x, p });
    for k in 1..=steps {
        let (k1x, k1p) = deriv(&p)?;
        let p2 = p.try_add(&k1p.scale(0.5 * h))?;
        let (k2x, k2p) = deriv(&p2)?;
        let p3 = p.try_add(&k2p.scale(0.5 * h))?;
        let (k3x, k3p) = deriv(&p3)?;
        let p4 = p.try_add(&k3p.scale(h))?;
        let (k4x, k4p) = deriv(&p4)?;

        let dx = k1x
            .try_add(&k2x.scale(2.0))?
            .try_add(&k3x.scale(2.0))?
            .try_add(&k4x)?
            .scale(h / 6.0);
        let dp = k1p
            .try_add(&k2p.scale(2.0))?
            .try_add(&k3p.scale(2.0))?
            .try_add(&k4p)?
            .scale(h / 6.0);
        x = x.try_add(&dx)?;
        p = p.try_add(&dp)?;
        if x.components().iter().chain(p.components()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("phase-space state at step {k}")));
        }
        samples.push(PhaseSample {
            tau: k as f64 * h,
            x,
            p,
        });
    }
    let mut traj = PhaseTrajectory::new(samples)?;
    traj.degenerate_evaluations = degenerate;
    Ok(traj)
}

/// Discrete phase-space action `Σ [p·δx − M(p)·δτ]` with left-point momenta.
pub fn phase_space_action(traj: &PhaseTrajectory, spec: &HamiltonianSpec) -> Result<f64> {
    let s = traj.samples();
    if s.len() < 2 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for w in s.windows(2) {
        let dx = w[1].x.try_sub(&w[0].x)?;
        let dtau = w[1].tau - w[0].tau;
        total += minkowski_dot(&w[0].p, &dx)? - hamiltonian_value(spec, &w[0].p)? * dtau;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::boost;

    fn v(a: f64, b: f64) -> FourVector {
        FourVector::new_1d(a, b).unwrap()
    }

    #[test]
    fn lagrangian_examples() {
        let spec = LagrangianSpec::free(1.0, 1.0).unwrap();
        assert_eq!(lagrangian_value(&spec, &v(1.0, 0.0)), 0.5);
        assert_eq!(lagrangian_value(&spec, &v(0.0, 0.0)), 0.0);
        let u = v(0.5f64.cosh(), 0.5f64.sinh());
        assert!((lagrangian_value(&spec, &u) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn action_examples() {
        let spec = LagrangianSpec::free(1.0, 1.0).unwrap();
        let one = WorldlinePath::uniform(vec![v(0.0, 0.0), v(1.0, 0.0)], 0.0, 1.0).unwrap();
        assert_eq!(discrete_action(&one, &spec).unwrap(), 0.5);

        let zero = WorldlinePath::uniform(vec![v(0.3, 0.1), v(0.3, 0.1)], 0.0, 1e-9).unwrap();
        assert_eq!(discrete_action(&zero, &spec).unwrap(), 0.0);

        let bad = WorldlinePath::uniform(vec![v(0.0, 0.0), v(0.1, 2.0)], 0.0, 0.05).unwrap();
        assert!(matches!(
            discrete_action(&bad, &spec),
            Err(Error::InadmissiblePath { segment: 0 })
        ));
    }

    #[test]
    fn action_is_boost_invariant() {
        let spec = LagrangianSpec::free(1.3, 1.0).unwrap();
        let events: Vec<_> = (0..20)
            .map(|k| {
                let t = k as f64 * 0.3;
                v(t, 0.4 * (0.7 * t).sin())
            })
            .collect();
        let path = WorldlinePath::uniform(events, 0.0, 0.1).unwrap();
        let a = discrete_action(&path, &spec).unwrap();
        let b = discrete_action(&path.boosted(0.7), &spec).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs());
    }

    #[test]
    fn straight_line_has_zero_residual() {
        let spec = LagrangianSpec::free(2.0, 1.0).unwrap();
        let path = WorldlinePath::uniform(
            (0..10).map(|k| v(1.0 + 1.2 * k as f64 * 0.1, -0.5 + 0.3 * k as f64 * 0.1)).collect(),
            0.0,
            0.1,
        )
        .unwrap();
        let r = euler_lagrange_residual(&path, &spec).unwrap();
        assert_eq!(r.len(), 8);
        for res in r {
            assert!(res.components().iter().all(|c| c.abs() <= 1e-10));
        }
    }

    fn bent(h: f64, n: usize, amp: f64, omega: f64) -> WorldlinePath {
        WorldlinePath::uniform(
            (0..n)
                .map(|k| {
                    let tau = k as f64 * h;
                    v(2.0 * tau, amp * (omega * tau).sin())
                })
                .collect(),
            0.0,
            h,
        )
        .unwrap()
    }

    #[test]
    fn bent_path_has_residual() {
        let spec = LagrangianSpec::free(1.0, 1.0).unwrap();
        let r = euler_lagrange_residual(&bent(0.05, 41, 0.1, 2.0 * std::f64::consts::PI), &spec)
            .unwrap();
        let max = r.iter().map(|f| f.spatial()[0].abs()).fold(0.0, f64::max);
        assert!(max > 0.1, "max residual {max}");
    }

    #[test]
    fn residual_converges_at_second_order() {
        // error against the analytic −m₀·A·ω²·sin(ωτ) at τ = 0.5
        let spec = LagrangianSpec::free(1.0, 1.0).unwrap();
        let (amp, omega) = (0.1, 3.0);
        let exact = -amp * omega * omega * (omega * 0.5f64).sin();
        let err = |h: f64| {
            let n = (1.0 / h).round() as usize + 1;
            let r = euler_lagrange_residual(&bent(h, n, amp, omega), &spec).unwrap();
            let mid = (0.5 / h).round() as usize - 1;
            (r[mid].spatial()[0] - exact).abs()
        };
        let ratio = err(0.05) / err(0.025);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn legendre_examples() {
        let spec = LagrangianSpec::free(1.0, 1.0).unwrap();
        let (p, m) = legendre(&spec, &v(1.0, 0.0));
        assert_eq!(p, v(1.0, 0.0));
        assert_eq!(m, 0.5);
        let (p, m) = legendre(&spec, &v(0.0, 0.0));
        assert_eq!(p, v(0.0, 0.0));
        assert_eq!(m, 0.0);

        let (m0, c) = (1.7, 2.5);
        let lspec = LagrangianSpec::free(m0, c).unwrap();
        let hspec = HamiltonianSpec::free(HamiltonianForm::Sqrt, m0, c, 1).unwrap();
        let u = v(c * 0.9f64.cosh(), c * 0.9f64.sinh());
        let (p, m) = legendre(&lspec, &u);
        assert!((m - hamiltonian_value(&hspec, &p).unwrap()).abs() <= 1e-12 * m);
    }

    #[test]
    fn hamiltonian_examples() {
        let sqrt = HamiltonianSpec::free(HamiltonianForm::Sqrt, 1.0, 1.0, 1).unwrap();
        let quad = HamiltonianSpec::free(HamiltonianForm::Quadratic, 1.0, 1.0, 1).unwrap();
        assert_eq!(hamiltonian_value(&sqrt, &v(1.0, 0.0)).unwrap(), 0.5);
        assert!((hamiltonian_value(&quad, &v(1.2, 0.0)).unwrap() - 0.72).abs() < 1e-15);
        assert!(matches!(
            hamiltonian_value(&sqrt, &v(0.0, 1.0)),
            Err(Error::NegativeNorm(_))
        ));
        let gauged =
            HamiltonianSpec::new(HamiltonianForm::Quadratic, 1.0, 1.0, v(0.2, 0.0)).unwrap();
        assert!((hamiltonian_value(&gauged, &v(1.0, 0.0)).unwrap() - 0.72).abs() < 1e-15);
    }

    #[test]
    fn on_shell_forms_agree() {
        for (m0, c, chi) in [(1.0, 1.0, 0.0), (2.0, 3.0, 0.4), (0.5, 10.0, -1.3)] {
            let p = boost(&v(m0 * c, 0.0), chi);
            let a = hamiltonian_value(&HamiltonianSpec::free(HamiltonianForm::Sqrt, m0, c, 1).unwrap(), &p)
                .unwrap();
            let b = hamiltonian_value(
                &HamiltonianSpec::free(HamiltonianForm::Quadratic, m0, c, 1).unwrap(),
                &p,
            )
            .unwrap();
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn degenerate_sqrt_is_flagged() {
        let spec = HamiltonianSpec::free(HamiltonianForm::Sqrt, 1.0, 1.0, 1).unwrap();
        let traj = hamilton_flow(&spec, &v(0.0, 0.0), &v(1.0, 1.0), 1.0, 4).unwrap();
        assert_eq!(traj.degenerate_evaluations, 16);
        assert_eq!(traj.samples().last().unwrap().x, v(0.0, 0.0));
    }

    #[test]
    fn free_flow_is_exact() {
        for form in [HamiltonianForm::Sqrt, HamiltonianForm::Quadratic] {
            let spec = HamiltonianSpec::free(form, 1.0, 1.0, 1).unwrap();
            let p0 = v(1.25, 0.75);
            let x0 = v(0.5, -0.2);
            let traj = hamilton_flow(&spec, &x0, &p0, 10.0, 1000).unwrap();
            let (vel, _) = momentum_gradient(&spec, &p0).unwrap();
            for s in traj.samples() {
                assert!(s.p.try_sub(&p0).unwrap().euclidean_norm_sq().sqrt() <= 1e-12);
                let expect = x0.try_add(&vel.scale(s.tau)).unwrap();
                assert!(s.x.try_sub(&expect).unwrap().euclidean_norm_sq().sqrt() <= 1e-10);
            }
        }
    }

    #[test]
    fn phase_space_action_matches_lagrangian_action() {
        let hspec = HamiltonianSpec::free(HamiltonianForm::Quadratic, 1.0, 1.0, 1).unwrap();
        let lspec = LagrangianSpec::free(1.0, 1.0).unwrap();
        let traj = hamilton_flow(&hspec, &v(0.0, 0.0), &v(1.3, 0.4), 2.0, 50).unwrap();
        let a = phase_space_action(&traj, &hspec).unwrap();
        let b = discrete_action(&traj.worldline().unwrap(), &lspec).unwrap();
        assert!((a - b).abs() <= 1e-9, "{a} vs {b}");

        let single = PhaseTrajectory::new(vec![PhaseSample {
            tau: 0.0,
            x: v(0.0, 0.0),
            p: v(1.0, 0.0),
        }])
        .unwrap();
        assert_eq!(phase_space_action(&single, &hspec).unwrap(), 0.0);

        let boosted = phase_space_action(&traj.boosted(0.7), &hspec).unwrap();
        assert!((a - boosted).abs() <= 1e-9 * a.abs());
    }
}
