use std::f64::consts::PI;

use num_complex::Complex64;
use super::config::RunConfig;
use super::report::{json_list, Cell, ColumnKind, RunReport, Status, Table};
use crate::dynamics::{
    discrete_action, euler_lagrange_residual, hamilton_flow, hamiltonian_value, phase_space_action,
    HamiltonianForm, HamiltonianSpec, LagrangianSpec,
};
use crate::error::{Error, Result};
use crate::locality::{
    correlation_speed, critical_time, first_contact_time, overlap, perturbation_field,
    regions_disjoint_at,
};
use crate::minkowski::{boost, classify_path, classify_step, minkowski_dot, FourVector, WorldlinePath};
use crate::nr_limit::nr_limit_error;
use crate::propagator::{
    compose, enumerate_chains, evolve_field, ft_factor, kernel_prefactor, observable_expectation,
    single_step_kernel, sliced_propagator, st_coefficient, stability_number, ComplexField,
    KernelOnLattice, SliceLattice,
};
use crate::wave::{
    clifford_components, clifford_map, dirac_zero_mode, gamma_basis, gauge_shifted_m, kg_residual,
    MForm, MValue,
};

use ColumnKind::{Complex as C, Plain as P, Real as R};

pub const COMMANDS: &[&str] = &[
    "flow",
    "action-check",
    "kernel",
    "compose-check",
    "ft-check",
    "st-check",
    "evolve",
    "kg-check",
    "dirac-check",
    "locality",
    "correlation-speed",
    "nr-limit",
    "oracle-compare",
];

/// Raised for names outside [`COMMANDS`]; exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCommand(pub String);

impl std::fmt::Display for UnknownCommand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unknown command `{}` (expected one of: {})", self.0, COMMANDS.join(", "))
    }
}

impl std::error::Error for UnknownCommand {}

/// Runs one suite. Parameter errors surfacing from the engine count as
/// configuration errors (exit 2); every other engine error is a numeric
/// failure (exit 3). The report is complete in both cases.
pub fn run_command(name: &str, cfg: &RunConfig) -> std::result::Result<RunReport, UnknownCommand> {
    let run: fn(&RunConfig, &mut RunReport) -> Result<()> = match name {
        "flow" => flow,
        "action-check" => action_check,
        "kernel" => kernel,
        "compose-check" => compose_check,
        "ft-check" => ft_check,
        "st-check" => st_check,
        "evolve" => evolve,
        "kg-check" => kg_check,
        "dirac-check" => dirac_check,
        "locality" => locality,
        "correlation-speed" => correlation_speed_cmd,
        "nr-limit" => nr_limit,
        "oracle-compare" => oracle_compare,
        other => return Err(UnknownCommand(other.to_string())),
    };
    let mut report = RunReport::new(name, cfg.to_json(), cfg.warnings.clone());
    if let Err(e) = run(cfg, &mut report) {
        report.status = match e {
            Error::InvalidParameter { .. } => Status::ConfigError,
            _ => Status::NumericFailure,
        };
        report.error = Some(e.to_string());
    }
    Ok(report)
}

fn vector_columns(prefix: &str, d: usize) -> Vec<String> {
    (0..=d).map(|mu| format!("{prefix}{mu}")).collect()
}

fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn lattice_center(lattice: &SliceLattice, it: usize) -> usize {
    lattice.flatten(it, &[lattice.nx() / 2; 3])
}

fn flow(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let (m0, c) = (cfg.f64("m0"), cfg.f64("c"));
    let form = match cfg.text("flow.form") {
        "quadratic" => HamiltonianForm::Quadratic,
        _ => HamiltonianForm::Sqrt,
    };
    let gauge = cfg.vector("flow.gauge");
    let spec = HamiltonianSpec::new(form, m0, c, gauge)?;
    let (x0, p0) = (cfg.vector("flow.x"), cfg.vector("flow.p"));
    let traj = hamilton_flow(&spec, &x0, &p0, cfg.f64("flow.tau_span"), cfg.usize("flow.steps"))?;

    let m_start = hamiltonian_value(&spec, &p0)?;
    let mut max_dp = 0.0f64;
    let mut max_dm = 0.0f64;
    let d = x0.d();
    let names: Vec<String> = ["tau".to_string()]
        .into_iter()
        .chain(vector_columns("x", d))
        .chain(vector_columns("p", d))
        .chain(["m".to_string()])
        .collect();
    let cols: Vec<(&str, ColumnKind)> = names.iter().map(|n| (n.as_str(), R)).collect();
    let mut table = Table::new("trajectory", &cols);
    for s in traj.samples() {
        let m = hamiltonian_value(&spec, &s.p)?;
        for (a, b) in s.p.components().iter().zip(p0.components()) {
            max_dp = max_dp.max((a - b).abs());
        }
        max_dm = max_dm.max((m - m_start).abs());
        let mut row = vec![Cell::Real(s.tau)];
        row.extend(s.x.components().iter().map(|&v| Cell::Real(v)));
        row.extend(s.p.components().iter().map(|&v| Cell::Real(v)));
        row.push(Cell::Real(m));
        table.push(row);
    }
    let rapidity = cfg.f64("flow.rapidity");
    let action = phase_space_action(&traj, &spec)?;
    let boosted_spec = HamiltonianSpec::new(form, m0, c, boost(&gauge, rapidity))?;
    let boosted = phase_space_action(&traj.boosted(rapidity), &boosted_spec)?;

    r.real("m_initial", m_start);
    r.real("max_abs_momentum_drift", max_dp);
    r.real(
        "max_relative_m_drift",
        if m_start != 0.0 { max_dm / m_start.abs() } else { max_dm },
    );
    r.real("phase_space_action", action);
    r.real("boosted_phase_space_action", boosted);
    // the square-root form gives S ≈ 0 term by term; scale by |M|·τ
    let scale = action.abs().max(m_start.abs() * cfg.f64("flow.tau_span"));
    r.real(
        "boost_relative_difference",
        if scale > 0.0 { (action - boosted).abs() / scale } else { 0.0 },
    );
    r.value("degenerate_evaluations", traj.degenerate_evaluations as u64);
    if traj.degenerate_evaluations > 0 {
        r.warnings.push(format!(
            "{} gradient evaluations hit the lightlike limit of the square-root form (M = 0, ∂M/∂p = 0)",
            traj.degenerate_evaluations
        ));
    }
    r.tables.push(table);
    Ok(())
}

fn action_check(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let spec = LagrangianSpec::free(cfg.f64("m0"), cfg.f64("c"))?;
    let u = cfg.vector("action.velocity");
    let (nodes, h, wiggle) = (cfg.usize("action.nodes"), cfg.f64("action.h"), cfg.f64("action.wiggle"));
    let span = (nodes - 1) as f64 * h;
    let events: Vec<FourVector> = (0..nodes)
        .map(|k| {
            let tau = k as f64 * h;
            let mut comps = u.scale(tau).components().to_vec();
            comps[1] += wiggle * (2.0 * PI * tau / span).sin();
            FourVector::new(&comps)
        })
        .collect::<Result<_>>()?;
    let path = WorldlinePath::uniform(events, 0.0, h)?;
    let rapidity = cfg.f64("action.rapidity");
    let action = discrete_action(&path, &spec)?;
    let boosted = discrete_action(&path.boosted(rapidity), &spec)?;
    let residual = euler_lagrange_residual(&path, &spec)?;

    let d = u.d();
    let names: Vec<String> = ["node".to_string()]
        .into_iter()
        .chain(vector_columns("r", d))
        .chain(["norm".to_string()])
        .collect();
    let cols: Vec<(&str, ColumnKind)> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), if i == 0 { P } else { R }))
        .collect();
    let mut table = Table::new("residual", &cols);
    let mut max_norm = 0.0f64;
    for (i, v) in residual.iter().enumerate() {
        let norm = v.euclidean_norm_sq().sqrt();
        max_norm = max_norm.max(norm);
        let mut row = vec![Cell::Int(i as u64 + 1)];
        row.extend(v.components().iter().map(|&x| Cell::Real(x)));
        row.push(Cell::Real(norm));
        table.push(row);
    }
    r.value("path_class", format!("{:?}", classify_path(&path, &cfg.spec()?)));
    r.real("discrete_action", action);
    r.real("boosted_discrete_action", boosted);
    r.real("boost_relative_difference", rel_diff(action.into(), boosted.into()));
    r.real("max_euler_lagrange_residual", max_norm);
    r.tables.push(table);
    Ok(())
}

fn kernel(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let params = cfg.params()?;
    let spec = cfg.spec()?;
    let lattice = cfg.lattice()?;
    let dx = cfg.vector("kernel.dx");
    let class = classify_step(&dx, params.epsilon(), &spec);
    r.real("alpha", params.alpha());
    r.complex("prefactor", kernel_prefactor(dx.d(), &params)?);
    r.value("class", format!("{class:?}"));
    r.complex("kernel", single_step_kernel(&dx, &params)?);

    let mut table = Table::new("kernel_scan", &[("offset", R), ("class", P), ("kernel", C)]);
    let nx = lattice.nx();
    for j in 0..nx {
        let s = (j as f64 - (nx - 1) as f64 / 2.0) * lattice.dx();
        let mut comps = vec![0.0; dx.d() + 1];
        comps[0] = lattice.c() * lattice.dt();
        comps[1] = s;
        let step = FourVector::new(&comps)?;
        let class = classify_step(&step, params.epsilon(), &spec);
        let k = if class.is_admissible() {
            single_step_kernel(&step, &params)?
        } else {
            Complex64::new(0.0, 0.0)
        };
        table.push(vec![Cell::Real(s), Cell::Text(format!("{class:?}")), Cell::Complex(k)]);
    }
    r.tables.push(table);
    Ok(())
}

fn compose_check(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let params = cfg.params()?;
    let spec = cfg.spec()?;
    let lattice = cfg.lattice()?;
    let n = cfg.usize("n_slices");
    let k = KernelOnLattice::single_step(&lattice, &spec, &params)?;
    let mut kn = k.clone();
    for _ in 1..n {
        kn = compose(&kn, &k, &lattice, &spec)?;
    }

    let a = lattice_center(&lattice, 0);
    let pairs = cfg.usize("compose.pairs");
    let last = lattice.nt() - 1;
    let nx = lattice.nx();
    let mut table = Table::new(
        "pairs",
        &[("a", P), ("b", P), ("sliced", C), ("composed", C), ("relative_difference", R), ("empty_domain", P)],
    );
    let (mut max_rel, mut support_mismatch, mut max_obs) = (0.0f64, 0u64, 0.0f64);
    for i in 0..pairs {
        let j = if pairs == 1 { nx / 2 } else { (i * (nx - 1) + (pairs - 1) / 2) / (pairs - 1) };
        let b = lattice.flatten(last, &[j; 3]);
        let (ea, eb) = (lattice.event(a), lattice.event(b));
        let sliced = sliced_propagator(&ea, &eb, n, &lattice, &spec, &params)?;
        let composed = kn.get(b, a);
        if sliced.empty_domain == kn.supported(b, a) {
            support_mismatch += 1;
        }
        let rel = rel_diff(sliced.amplitude, composed);
        max_rel = max_rel.max(rel);
        if n >= 2 {
            let one = |_: &FourVector| Complex64::new(1.0, 0.0);
            let o = observable_expectation(&one, 1, &ea, &eb, n, &lattice, &spec, &params)?;
            max_obs = max_obs.max((o.amplitude - sliced.amplitude).norm());
        }
        table.push(vec![
            Cell::Int(a as u64),
            Cell::Int(b as u64),
            Cell::Complex(sliced.amplitude),
            Cell::Complex(composed),
            Cell::Real(rel),
            Cell::Flag(sliced.empty_domain),
        ]);
    }
    r.value("n_slices", n as u64);
    r.real("max_relative_difference", max_rel);
    r.value("support_mismatches", support_mismatch);
    r.real("unit_observable_max_abs_difference", max_obs);
    r.tables.push(table);
    Ok(())
}

/// Least-squares `s` in `F(ε) − 1 ≈ s·ε`.
pub fn fit_through_origin(eps: &[f64], values: &[Complex64]) -> Complex64 {
    let num: Complex64 = eps.iter().zip(values).map(|(e, v)| (v - 1.0) * *e).sum();
    let den: f64 = eps.iter().map(|e| e * e).sum();
    num / den
}

fn ft_check(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let base = cfg.params()?;
    let quad = cfg.quad();
    let grid = cfg.list("ft.eps_grid");
    let mut table = Table::new(
        "ft",
        &[("epsilon", R), ("factor", C), ("ratio", C), ("t_max", R), ("tail_bound", R), ("panels", P)],
    );
    let mut values = Vec::new();
    for &eps in grid {
        let e = ft_factor(&base.with_epsilon(eps)?, &quad)?;
        values.push(e.value);
        table.push(vec![
            Cell::Real(eps),
            Cell::Complex(e.value),
            Cell::Complex((e.value - 1.0) / eps),
            Cell::Real(e.t_max),
            Cell::Real(e.tail_bound),
            Cell::Int(e.panels as u64),
        ]);
    }
    let slope = fit_through_origin(grid, &values);
    let target = Complex64::new(0.0, -base.m0() * base.c() * base.c() / (4.0 * base.hbar()));
    r.complex("fitted_slope", slope);
    r.complex("first_order_slope", target);
    r.real("relative_deviation", (slope - target).norm() / target.norm());
    r.tables.push(table);
    Ok(())
}

fn st_check(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let base = cfg.params()?;
    let quad = cfg.quad();
    let grid = cfg.list("ft.eps_grid");
    let mut table = Table::new(
        "st",
        &[("epsilon", R), ("coefficient", C), ("ratio", C), ("halving_ratio", R), ("t_max", R)],
    );
    let target = Complex64::new(0.0, base.hbar() / (2.0 * base.m0()));
    let (mut max_dev, mut max_halving) = (0.0f64, 0.0f64);
    for &eps in grid {
        let e = st_coefficient(&base.with_epsilon(eps)?, &quad)?;
        let half = st_coefficient(&base.with_epsilon(0.5 * eps)?, &quad)?;
        let ratio = e.value / eps;
        let halving = (e.value / half.value).norm();
        max_dev = max_dev.max((ratio - target).norm() / target.norm());
        max_halving = max_halving.max((halving / 2.0 - 1.0).abs());
        table.push(vec![
            Cell::Real(eps),
            Cell::Complex(e.value),
            Cell::Complex(ratio),
            Cell::Real(halving),
            Cell::Real(e.t_max),
        ]);
    }
    r.complex("target_ratio", target);
    r.real("max_relative_deviation", max_dev);
    r.real("max_halving_deviation", max_halving);
    r.tables.push(table);
    Ok(())
}

fn evolve(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let params = cfg.params()?;
    let lattice = cfg.lattice()?;
    let hbar = params.hbar();
    let modes = cfg.list("evolve.modes");
    let steps = cfg.usize("evolve.steps");
    let periods: Vec<f64> = std::iter::once(lattice.nt() as f64 * lattice.c() * lattice.dt())
        .chain(std::iter::repeat_n(lattice.nx() as f64 * lattice.dx(), lattice.d()))
        .collect();
    let p_comps: Vec<f64> = modes.iter().zip(&periods).map(|(m, l)| 2.0 * PI * hbar * m / l).collect();
    let p = FourVector::new(&p_comps)?;
    let psi = ComplexField::from_fn(lattice, |x| {
        Complex64::from_polar(1.0, minkowski_dot(&p, x).expect("same dimension") / hbar)
    });
    let theta = stability_number(&psi, &params);
    let out = evolve_field(&psi, &params, steps)?;

    let ratios: Vec<Complex64> = out.values().iter().zip(psi.values()).map(|(a, b)| a / b).collect();
    let measured = ratios[0];
    let spread = ratios.iter().map(|z| (z - measured).norm()).fold(0.0, f64::max);

    let (m0, c, eps) = (params.m0(), params.c(), params.epsilon());
    let continuum = crate::propagator::continuum_multiplier(p.interval(), &params);
    let symbol = |k: f64, h: f64| (2.0 * (k * h).cos() - 2.0) / (h * h);
    let mut boxed = symbol(p_comps[0] / hbar, lattice.c() * lattice.dt());
    for &pk in &p_comps[1..] {
        boxed -= symbol(pk / hbar, lattice.dx());
    }
    let discrete = Complex64::new(1.0, -m0 * c * c * eps / (4.0 * hbar)) + Complex64::new(0.0, hbar * eps / (2.0 * m0)) * boxed;
    let n = steps as i32;

    r.real("stability_number", theta);
    r.real("p_dot_p", p.interval());
    r.complex("measured_multiplier", measured);
    r.real("site_spread", spread);
    r.complex("continuum_multiplier", continuum.powi(n));
    r.complex("discrete_multiplier", discrete.powi(n));
    r.real("continuum_deviation", (measured - continuum.powi(n)).norm());
    r.real("discrete_deviation", (measured - discrete.powi(n)).norm());

    let mut table = Table::new("slice0", &[("site", P), ("psi", C)]);
    for (i, v) in out.slice(0)?.iter().enumerate() {
        table.push(vec![Cell::Int(i as u64), Cell::Complex(*v)]);
    }
    r.tables.push(table);
    Ok(())
}

fn kg_check(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let (m0, c) = (cfg.f64("m0"), cfg.f64("c"));
    let d = cfg.usize("d");
    let basis = gamma_basis(d)?;
    let scale = m0 * m0 * c * c;
    let shell_tol = 1e-12 * scale;
    let mode_tol = 1e-9 * m0 * c;

    let p = cfg.vector("kg.p");
    let residual = kg_residual(&p, m0, c);
    let zero_mode = dirac_zero_mode(&p, m0, c, &basis)?;
    r.real("kg_residual", residual);
    r.real("dirac_min_singular_value", zero_mode);
    r.value("on_shell", residual <= shell_tol);

    let n = cfg.usize("kg.grid_points");
    let k_max = cfg.f64("kg.k_max");
    let off = cfg.f64("kg.off_shell");
    let mut table = Table::new(
        "grid",
        &[("k", R), ("shell", P), ("kg_residual", R), ("dirac_min_singular_value", R), ("consistent", P)],
    );
    let mut all_consistent = true;
    for j in 0..n {
        let k = if n == 1 { 0.0 } else { -k_max + 2.0 * k_max * j as f64 / (n - 1) as f64 };
        let e = (scale + k * k).sqrt();
        for (label, p0) in [("on", e), ("off", e * (1.0 + off))] {
            let mut comps = vec![0.0; d + 1];
            comps[0] = p0;
            comps[1] = k;
            let q = FourVector::new(&comps)?;
            let res = kg_residual(&q, m0, c);
            let zm = dirac_zero_mode(&q, m0, c, &basis)?;
            let consistent = (res <= 1e-9 * scale) == (zm <= mode_tol);
            all_consistent &= consistent;
            table.push(vec![
                Cell::Real(k),
                Cell::Text(label.into()),
                Cell::Real(res),
                Cell::Real(zm),
                Cell::Flag(consistent),
            ]);
        }
    }
    r.value("grid_consistent", all_consistent);
    r.tables.push(table);
    Ok(())
}

/// Deterministic low-discrepancy points in `[−1, 1]^(d+1)`.
fn weyl_vector(k: usize, d: usize) -> Result<FourVector> {
    const ROOTS: [f64; 4] = [2.0, 3.0, 5.0, 7.0];
    let comps: Vec<f64> = ROOTS[..=d]
        .iter()
        .map(|r| 2.0 * ((k as f64 + 1.0) * r.sqrt()).fract() - 1.0)
        .collect();
    FourVector::new(&comps)
}

fn dirac_check(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let d = cfg.usize("d");
    let c = cfg.f64("c");
    let basis = gamma_basis(d)?;
    let n = basis.dim();
    let id = nalgebra::DMatrix::<Complex64>::identity(n, n);

    let mut table = Table::new("anticommutators", &[("mu", P), ("nu", P), ("max_abs_error", R)]);
    let mut max_anti = 0.0f64;
    for mu in 0..=d {
        for nu in 0..=d {
            let (g1, g2) = (basis.gamma(mu), basis.gamma(nu));
            let metric = if mu != nu { 0.0 } else if mu == 0 { 1.0 } else { -1.0 };
            let defect = g1 * g2 + g2 * g1 - &id * Complex64::new(2.0 * metric, 0.0);
            let err = defect.iter().map(|z| z.norm()).fold(0.0, f64::max);
            max_anti = max_anti.max(err);
            table.push(vec![Cell::Int(mu as u64), Cell::Int(nu as u64), Cell::Real(err)]);
        }
    }

    let (mut max_square, mut max_extract) = (0.0f64, 0.0f64);
    for k in 0..cfg.usize("dirac.samples") {
        let x = weyl_vector(k, d)?;
        let m = clifford_map(&x, &basis)?;
        let defect = &m * &m - &id * Complex64::new(x.interval(), 0.0);
        max_square = max_square.max(defect.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let back = clifford_components(&m, &basis)?;
        let err = back
            .components()
            .iter()
            .zip(x.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        max_extract = max_extract.max(err);
    }

    let p = cfg.vector("dirac.p");
    let a = cfg.vector("dirac.gauge");
    let q = p.try_add(&a)?;
    let gauge_err = match gauge_shifted_m(&p, &a, cfg.f64("m0"), c, &basis, MForm::Dirac)? {
        MValue::Matrix(m) => {
            let defect = &m * &m - &id * Complex64::new(0.25 * c * c * q.interval(), 0.0);
            defect.iter().map(|z| z.norm()).fold(0.0, f64::max)
        }
        MValue::Scalar(_) => f64::NAN,
    };

    r.value("spinor_dimension", n as u64);
    r.real("max_anticommutator_error", max_anti);
    r.real("max_clifford_square_error", max_square);
    r.real("max_component_extraction_error", max_extract);
    r.real("gauge_shifted_square_error", gauge_err);
    r.tables.push(table);
    Ok(())
}

fn locality(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let params = cfg.params()?;
    let spec = cfg.spec()?;
    let lattice = cfg.lattice()?;
    let c = spec.c();
    let delta_rev = cfg.f64("delta_rev");
    let (e1, e2) = (cfg.event("loc.e1")?, cfg.event("loc.e2")?);
    let psi0 = ComplexField::from_fn(lattice, |_| Complex64::new(1.0, 0.0));
    let f1 = perturbation_field(&psi0, &e1, &spec, &params, delta_rev)?;
    let f2 = perturbation_field(&psi0, &e2, &spec, &params, delta_rev)?;
    for (name, f) in [("loc.e1", &f1), ("loc.e2", &f2)] {
        if f.snapped {
            r.warnings.push(format!("{name} moved to the nearest lattice site {}", f.site));
        }
    }
    let t_c = critical_time(&e1, &e2, c)?;
    let t_contact = first_contact_time(&e1, &e2, delta_rev, c)?;

    let mut table = Table::new("overlap", &[("slice", P), ("t", R), ("disjoint", P), ("overlap", C)]);
    let (mut zero_before, mut nonzero_after) = (true, false);
    for it in 0..lattice.nt() {
        let t = lattice.time_of(it);
        let ov = overlap(&f1.field, &f2.field, it)?;
        let is_zero = ov.re.to_bits() == 0 && ov.im.to_bits() == 0;
        if t <= t_contact {
            zero_before &= is_zero;
        } else {
            nonzero_after |= !is_zero;
        }
        table.push(vec![
            Cell::Int(it as u64),
            Cell::Real(t),
            Cell::Flag(regions_disjoint_at(&e1, &e2, t, delta_rev, c)?),
            Cell::Complex(ov),
        ]);
    }
    r.real("critical_time", t_c);
    r.real("first_contact_time", t_contact);
    r.value("zero_until_contact", zero_before);
    r.value("nonzero_after_contact", nonzero_after);
    r.tables.push(table);
    Ok(())
}

fn correlation_speed_cmd(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let c = cfg.f64("c");
    let (e1, e2) = (cfg.event("loc.e1")?, cfg.event("loc.e2")?);
    let sep = e1.event.try_sub(&e2.event)?.spatial_norm();
    let mut grid = cfg.list("cs.delta_rev_grid").to_vec();
    grid.sort_by(f64::total_cmp);
    let mut table = Table::new(
        "correlation_speed",
        &[("delta_rev", R), ("first_contact_time", R), ("correlation_speed", R)],
    );
    let mut monotone = true;
    let mut prev = 0.0f64;
    for &dr in &grid {
        let v = correlation_speed(&e1, &e2, dr, c)?;
        monotone &= v >= prev;
        prev = v;
        table.push(vec![
            Cell::Real(dr),
            Cell::Real(first_contact_time(&e1, &e2, dr, c)?),
            Cell::Real(v),
        ]);
    }
    r.real("speed_without_reversal", correlation_speed(&e1, &e2, 0.0, c)?);
    r.real("instant_threshold", sep / (4.0 * c));
    r.value("monotone", monotone);
    r.tables.push(table);
    Ok(())
}

fn nr_limit(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let rows = nr_limit_error(&cfg.nr())?;
    let mut table = Table::new(
        "nr_limit",
        &[("c", R), ("relative_error", R), ("admissible_fraction", R), ("scale", C)],
    );
    for row in &rows {
        if let Some(w) = &row.warning {
            r.warnings.push(w.clone());
        }
        table.push(vec![
            Cell::Real(row.c),
            Cell::Real(row.relative_error),
            Cell::Real(row.admissible_fraction),
            Cell::Complex(row.scale),
        ]);
    }
    let decreasing = rows.windows(2).all(|w| w[1].relative_error < w[0].relative_error);
    let increasing = rows.windows(2).all(|w| w[1].admissible_fraction > w[0].admissible_fraction);
    r.value("error_strictly_decreasing", decreasing);
    r.value("fraction_increasing", increasing);
    r.real("final_relative_error", rows.last().map_or(f64::NAN, |w| w.relative_error));
    r.tables.push(table);
    Ok(())
}

fn oracle_compare(cfg: &RunConfig, r: &mut RunReport) -> Result<()> {
    let params = cfg.params()?;
    let spec = cfg.spec()?;
    let lattice = cfg.lattice()?;
    let n = cfg.usize("n_slices");
    let a = lattice.event(lattice_center(&lattice, 0));
    let b = lattice.event(lattice_center(&lattice, lattice.nt() - 1));
    let chains = enumerate_chains(&a, &b, n, &lattice, &spec, &params)?;
    let sliced = sliced_propagator(&a, &b, n, &lattice, &spec, &params)?;
    r.results.insert("a".into(), json_list(a.components()));
    r.results.insert("b".into(), json_list(b.components()));
    r.complex("chain_total", chains.total());
    r.complex("sliced", sliced.amplitude);
    r.value("empty_domain", sliced.empty_domain);
    r.real("relative_difference", rel_diff(chains.total(), sliced.amplitude));
    let mut table = Table::new("classes", &[("class", P), ("chains", P), ("amplitude", C)]);
    table.push(vec![
        Cell::Text("forward".into()),
        Cell::Int(chains.forward_chains as u64),
        Cell::Complex(chains.forward),
    ]);
    table.push(vec![
        Cell::Text("reverse".into()),
        Cell::Int(chains.reverse_chains as u64),
        Cell::Complex(chains.reverse),
    ]);
    r.tables.push(table);
    Ok(())
}
