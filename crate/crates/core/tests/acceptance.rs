//! End-to-end acceptance checks. Each test writes one `PASS`/`FAIL` line to
//! stderr (uncaptured) and then asserts the same verdict.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tau_core::cli::{fit_through_origin, COMMANDS};
use tau_core::dynamics::{
    discrete_action, hamilton_flow, hamiltonian_value, phase_space_action, HamiltonianForm,
    HamiltonianSpec, LagrangianSpec,
};
use tau_core::locality::{
    correlation_speed, critical_time, overlap, perturbation_field, MeasurementEvent,
};
use tau_core::minkowski::{minkowski_dot, DomainSpec, FourVector, WorldlinePath};
use tau_core::nr_limit::{nr_limit_error, NrCompareConfig};
use tau_core::propagator::{
    compose, continuum_multiplier, evolve_field, ft_factor, observable_expectation,
    sliced_propagator, st_coefficient, ComplexField, KernelOnLattice, KernelParams, QuadConfig,
    SliceLattice,
};
use tau_core::wave::{clifford_map, dirac_zero_mode, gamma_basis, kg_residual};

fn verdict(name: &str, ok: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let in_time = elapsed <= budget;
    let pass = ok && in_time;
    let line = format!(
        "{} {name}: {detail} [{:.2} s, budget {:.0} s]\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "{name}: {detail}");
    assert!(in_time, "{name}: runtime {elapsed:?} exceeds {budget:?}");
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_vector(rng: &mut StdRng, d: usize) -> FourVector {
    let comps: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    FourVector::new(&comps).unwrap()
}

#[test]
fn gamma_algebra() {
    let start = Instant::now();
    let mut anti_exact = true;
    let mut worst_square = 0.0f64;
    let mut rng = StdRng::seed_from_u64(11);
    for d in [1, 3] {
        let basis = gamma_basis(d).unwrap();
        let n = basis.dim();
        let id = DMatrix::<Complex64>::identity(n, n);
        for mu in 0..=d {
            for nu in 0..=d {
                let (a, b) = (basis.gamma(mu), basis.gamma(nu));
                let eta = if mu != nu { 0.0 } else if mu == 0 { 1.0 } else { -1.0 };
                let expect = &id * Complex64::new(2.0 * eta, 0.0);
                anti_exact &= a * b + b * a == expect;
            }
        }
        for _ in 0..1000 {
            let x = random_vector(&mut rng, d);
            let m = clifford_map(&x, &basis).unwrap();
            let defect = &m * &m - &id * Complex64::new(minkowski_dot(&x, &x).unwrap(), 0.0);
            worst_square = worst_square.max(max_abs(&defect));
        }
    }
    verdict(
        "gamma_algebra",
        anti_exact && worst_square <= 1e-13,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("anticommutators exact: {anti_exact}, max |X² − x·x I| = {worst_square:.3e} (tol 1e-13)"),
    );
}

#[test]
fn conservation_and_boost_invariance() {
    let start = Instant::now();
    let (m0, c) = (1.3, 1.7);
    let mut worst_p = 0.0f64;
    let mut worst_m = 0.0f64;
    let mut worst_boost = 0.0f64;
    let rapidity = 0.7;
    let mut rng = StdRng::seed_from_u64(22);
    for d in [1, 3] {
        for form in [HamiltonianForm::Quadratic, HamiltonianForm::Sqrt] {
            let spec = HamiltonianSpec::free(form, m0, c, d).unwrap();
            for _ in 0..4 {
                let mut comps: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let k2: f64 = comps[1..].iter().map(|k| k * k).sum();
                comps[0] = (m0 * m0 * c * c + k2).sqrt() * rng.gen_range(1.0..1.2);
                let p0 = FourVector::new(&comps).unwrap();
                let x0 = random_vector(&mut rng, d);
                let traj = hamilton_flow(&spec, &x0, &p0, 10.0, 1000).unwrap();
                let m_start = hamiltonian_value(&spec, &p0).unwrap();
                for s in traj.samples() {
                    for (a, b) in s.p.components().iter().zip(p0.components()) {
                        worst_p = worst_p.max((a - b).abs());
                    }
                    let m = hamiltonian_value(&spec, &s.p).unwrap();
                    worst_m = worst_m.max((m - m_start).abs() / m_start.abs());
                }
                let s = phase_space_action(&traj, &spec).unwrap();
                let sb = phase_space_action(&traj.boosted(rapidity), &spec).unwrap();
                // the square-root form gives S ≈ 0 term by term; scale by |M|·τ
                let scale = s.abs().max(m_start.abs() * 10.0);
                worst_boost = worst_boost.max((s - sb).abs() / scale);
            }
        }

        // a wiggling admissible worldline for the Lagrangian action
        let lag = LagrangianSpec::free(m0, c).unwrap();
        let h = 0.01;
        let events: Vec<FourVector> = (0..=200)
            .map(|k| {
                let tau = k as f64 * h;
                let mut comps = vec![0.0; d + 1];
                comps[0] = 1.5 * c * tau;
                comps[1] = 0.3 * c * tau + 0.05 * (2.0 * PI * tau).sin();
                FourVector::new(&comps).unwrap()
            })
            .collect();
        let path = WorldlinePath::uniform(events, 0.0, h).unwrap();
        let s = discrete_action(&path, &lag).unwrap();
        let sb = discrete_action(&path.boosted(rapidity), &lag).unwrap();
        worst_boost = worst_boost.max((s - sb).abs() / s.abs());
    }
    verdict(
        "conservation_and_boost_invariance",
        worst_p <= 1e-12 && worst_m <= 1e-8 && worst_boost <= 1e-9,
        start.elapsed(),
        Duration::from_secs(5),
        &format!(
            "max |Δp| = {worst_p:.3e} (tol 1e-12), max rel ΔM = {worst_m:.3e} (tol 1e-8), \
             max rel boost change = {worst_boost:.3e} (tol 1e-9)"
        ),
    );
}

const EPS_GRID: [f64; 6] = [1e-3, 1.5e-3, 2.5e-3, 4e-3, 6e-3, 1e-2];

#[test]
fn fresnel_time_factor_slope() {
    let start = Instant::now();
    let cfg = QuadConfig::default();
    let values: Vec<Complex64> = EPS_GRID
        .iter()
        .map(|&e| ft_factor(&KernelParams::natural(e, 1e-2).unwrap(), &cfg).unwrap().value)
        .collect();
    let slope = fit_through_origin(&EPS_GRID, &values);
    let target = Complex64::new(0.0, -0.25);
    let dev = (slope - target).norm() / target.norm();
    verdict(
        "fresnel_time_factor_slope",
        dev <= 0.10,
        start.elapsed(),
        Duration::from_secs(60),
        &format!(
            "fitted slope {:.4}{:+.4}i vs −0.25i, relative deviation {dev:.3e} (tol 0.10); \
             F(1e-3) = {:.6}{:+.6}i, F(1e-2) = {:.6}{:+.6}i",
            slope.re, slope.im, values[0].re, values[0].im, values[5].re, values[5].im
        ),
    );
}

#[test]
fn fresnel_second_moment() {
    let start = Instant::now();
    let cfg = QuadConfig::default();
    let st = |e: f64| st_coefficient(&KernelParams::natural(e, 1e-2).unwrap(), &cfg).unwrap().value;
    let target = Complex64::new(0.0, 0.5);
    let mut worst_ratio = 0.0f64;
    let mut worst_halving = 0.0f64;
    for &e in &EPS_GRID {
        let full = st(e);
        worst_ratio = worst_ratio.max((full / e - target).norm() / target.norm());
        worst_halving = worst_halving.max(((full / st(0.5 * e)).norm() / 2.0 - 1.0).abs());
    }
    verdict(
        "fresnel_second_moment",
        worst_ratio <= 0.10 && worst_halving <= 0.15,
        start.elapsed(),
        Duration::from_secs(60),
        &format!(
            "max |S/ε − i/2|/|i/2| = {worst_ratio:.3e} (tol 0.10), \
             max |S(ε)/S(ε/2)/2 − 1| = {worst_halving:.3e} (tol 0.15)"
        ),
    );
}

#[test]
fn klein_gordon_recovery() {
    let start = Instant::now();
    // one period over 64 sites on each axis
    let n = 64;
    let lat = SliceLattice::new_1d(n, n, 2.0 * PI / n as f64, 2.0 * PI / n as f64, 1.0, 0.0, 0.0).unwrap();
    let params = KernelParams::natural(1e-5, 0.0).unwrap();
    let mut worst_mult = 0.0f64;
    for (k0, k1) in [(1.0, 0.0), (2.0, 1.0), (0.0, 3.0), (-1.0, 2.0), (3.0, -2.0)] {
        let p = FourVector::new_1d(k0, k1).unwrap();
        let psi = ComplexField::from_fn(lat, |x| Complex64::from_polar(1.0, minkowski_dot(&p, x).unwrap()));
        let out = evolve_field(&psi, &params, 1).unwrap();
        let expect = continuum_multiplier(minkowski_dot(&p, &p).unwrap(), &params);
        for (a, b) in out.values().iter().zip(psi.values()) {
            worst_mult = worst_mult.max((a / b - expect).norm());
        }
    }

    let mut equivalent = true;
    let mut worst_on_shell = 0.0f64;
    for d in [1, 3] {
        let basis = gamma_basis(d).unwrap();
        let (m0, c) = (1.0, 1.0);
        for j in 0..20 {
            let k = -2.0 + 4.0 * j as f64 / 19.0;
            let e = (m0 * m0 * c * c + k * k).sqrt();
            for (p0, on_shell) in [(e, true), (1.1 * e, false)] {
                let mut comps = vec![0.0; d + 1];
                comps[0] = p0;
                comps[1] = k;
                if d == 3 {
                    comps[3] = 0.0;
                }
                let p = FourVector::new(&comps).unwrap();
                let res = kg_residual(&p, m0, c);
                let zero = dirac_zero_mode(&p, m0, c, &basis).unwrap();
                if on_shell {
                    worst_on_shell = worst_on_shell.max(res);
                }
                equivalent &= (res <= 1e-12) == (zero <= 1e-9) && (res <= 1e-12) == on_shell;
            }
        }
    }
    verdict(
        "klein_gordon_recovery",
        worst_mult <= 1e-6 && equivalent,
        start.elapsed(),
        Duration::from_secs(10),
        &format!(
            "max multiplier error {worst_mult:.3e} (tol 1e-6), KG residual ⇔ Dirac zero mode on 20-point \
             grids: {equivalent} (max on-shell residual {worst_on_shell:.1e})"
        ),
    );
}

#[test]
fn propagator_matches_composition() {
    let start = Instant::now();
    let lat = SliceLattice::new_1d(31, 31, 0.5, 0.25, 1.0, 0.0, -3.75).unwrap();
    let params = KernelParams::natural(0.45, 0.02).unwrap();
    let mut rng = StdRng::seed_from_u64(66);
    let mut worst = 0.0f64;
    let mut observable_exact = true;
    let mut support_agrees = true;
    let mut compared = 0usize;
    for allow_reverse in [false, true] {
        let spec = DomainSpec::new(1.0, allow_reverse).unwrap();
        let k = KernelOnLattice::single_step(&lat, &spec, &params).unwrap();
        let k2 = compose(&k, &k, &lat, &spec).unwrap();
        let k3 = compose(&k2, &k, &lat, &spec).unwrap();
        for (n, kn) in [(2, &k2), (3, &k3)] {
            for _ in 0..60 {
                let a = rng.gen_range(0..lat.len());
                let b = rng.gen_range(0..lat.len());
                let (ea, eb) = (lat.event(a), lat.event(b));
                let r = sliced_propagator(&ea, &eb, n, &lat, &spec, &params).unwrap();
                support_agrees &= r.empty_domain != kn.supported(b, a);
                let want = kn.get(b, a);
                let scale = r.amplitude.norm().max(want.norm());
                if scale > 0.0 {
                    worst = worst.max((r.amplitude - want).norm() / scale);
                }
                let one = |_: &FourVector| Complex64::new(1.0, 0.0);
                for slot in 1..n {
                    let o = observable_expectation(&one, slot, &ea, &eb, n, &lat, &spec, &params).unwrap();
                    observable_exact &= o == r;
                }
                compared += 1;
            }
        }
    }
    verdict(
        "propagator_matches_composition",
        worst <= 1e-12 && observable_exact && support_agrees,
        start.elapsed(),
        Duration::from_secs(30),
        &format!(
            "{compared} pairs on 31×31, max relative difference {worst:.3e} (tol 1e-12), \
             O≡1 insertion bitwise equal: {observable_exact}, supports agree: {support_agrees}"
        ),
    );
}

#[test]
fn locality_of_perturbations() {
    let start = Instant::now();
    let (nt, nx, h) = (41, 81, 0.05);
    let lat = SliceLattice::new_1d(nt, nx, h, h, 1.0, 0.0, -2.0).unwrap();
    let spec = DomainSpec::forward_only(1.0).unwrap();
    let params = KernelParams::natural(0.05, 1e-2).unwrap();
    let psi0 = ComplexField::from_fn(lat, |_| Complex64::new(1.0, 0.0));
    let mut rng = StdRng::seed_from_u64(77);

    let (mut zero_ok, mut nonzero_ok) = (0usize, 0usize);
    let mut speed_exact = true;
    let mut monotone = true;
    let mut infinite = true;
    let pairs = 1000;
    for _ in 0..pairs {
        let it1 = rng.gen_range(1..=12);
        let it2 = rng.gen_range(1..=12);
        let ix1 = rng.gen_range(4..nx - 4);
        let gap = rng.gen_range(1..=40usize);
        let ix2 = if ix1 + gap < nx - 4 { ix1 + gap } else { ix1 - gap.min(ix1 - 4).max(1) };
        let e1 = MeasurementEvent::new(lat.event(lat.flatten(it1, &[ix1])), 0.05, 1.0).unwrap();
        let e2 = MeasurementEvent::new(lat.event(lat.flatten(it2, &[ix2])), 0.05, 1.0).unwrap();
        let t_c = critical_time(&e1, &e2, 1.0).unwrap();

        let f1 = perturbation_field(&psi0, &e1, &spec, &params, 0.0).unwrap();
        let f2 = perturbation_field(&psi0, &e2, &spec, &params, 0.0).unwrap();
        let (mut zero, mut nonzero) = (true, false);
        for it in 0..nt {
            let ov = overlap(&f1.field, &f2.field, it).unwrap();
            let bitwise_zero = ov.re.to_bits() == 0 && ov.im.to_bits() == 0;
            if lat.time_of(it) <= t_c {
                zero &= bitwise_zero;
            } else {
                nonzero |= !bitwise_zero;
            }
        }
        zero_ok += zero as usize;
        nonzero_ok += nonzero as usize;

        let sep = (lat.event(lat.flatten(0, &[ix1])).spatial()[0] - lat.event(lat.flatten(0, &[ix2])).spatial()[0]).abs();
        speed_exact &= correlation_speed(&e1, &e2, 0.0, 1.0).unwrap() == 1.0;
        let threshold = sep / 4.0;
        let mut prev = 0.0;
        for k in 0..=24 {
            let dr = threshold * k as f64 / 16.0;
            let v = correlation_speed(&e1, &e2, dr, 1.0).unwrap();
            monotone &= v >= prev;
            prev = v;
            if dr >= threshold {
                infinite &= v == f64::INFINITY;
            }
        }
        infinite &= correlation_speed(&e1, &e2, threshold, 1.0).unwrap() == f64::INFINITY;
    }
    let ok = zero_ok == pairs && nonzero_ok == pairs && speed_exact && monotone && infinite;
    verdict(
        "locality_of_perturbations",
        ok,
        start.elapsed(),
        Duration::from_secs(60),
        &format!(
            "{zero_ok}/{pairs} pairs bitwise zero for t ≤ t_c, {nonzero_ok}/{pairs} nonzero after; \
             speed(Δ=0) = c exactly: {speed_exact}, monotone: {monotone}, +∞ from |Δx|/(4c): {infinite}"
        ),
    );
}

#[test]
fn nonrelativistic_limit() {
    let start = Instant::now();
    let cfg = NrCompareConfig::default();
    let rows = nr_limit_error(&cfg).unwrap();
    let errors: Vec<f64> = rows.iter().map(|r| r.relative_error).collect();
    let fractions: Vec<f64> = rows.iter().map(|r| r.admissible_fraction).collect();
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let increasing = fractions.windows(2).all(|w| w[1] > w[0]) && fractions.iter().all(|&f| f <= 1.0);
    let last = *errors.last().unwrap();
    verdict(
        "nonrelativistic_limit",
        decreasing && increasing && last <= 1e-2 && cfg.c_grid == [2.0, 4.0, 8.0],
        start.elapsed(),
        Duration::from_secs(120),
        &format!(
            "c = {:?}: relative errors {errors:.3?} (final tol 1e-2), admissible fractions {fractions:.4?}",
            cfg.c_grid
        ),
    );
}

fn run_tau(command: &str, config: &Path, out: &Path, threads: &str) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_tau"))
        .args([command, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("TAU_THREADS", threads)
        .output()
        .expect("tau runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn thread_count_does_not_change_output() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.cfg");
    // a denser lattice so the parallel reductions have real work to split
    std::fs::write(&config, "nt = 15\nnx = 41\ndt = 0.1\ndx = 0.05\nx0 = -1\nn_slices = 3\n").unwrap();
    let mut identical = 0;
    let mut mismatched = Vec::new();
    for command in COMMANDS {
        let a = tmp.path().join(format!("{command}-1"));
        let b = tmp.path().join(format!("{command}-8"));
        let ca = run_tau(command, &config, &a, "1");
        let cb = run_tau(command, &config, &b, "8");
        if ca == cb && dir_bytes(&a) == dir_bytes(&b) {
            identical += 1;
        } else {
            mismatched.push(format!("{command} (exit {ca}/{cb})"));
        }
    }
    verdict(
        "thread_count_does_not_change_output",
        mismatched.is_empty(),
        start.elapsed(),
        Duration::from_secs(120),
        &format!(
            "{identical}/{} commands byte-identical between TAU_THREADS=1 and 8; mismatched: {mismatched:?}",
            COMMANDS.len()
        ),
    );
}
