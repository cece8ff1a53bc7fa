use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dynamics::{hamiltonian_value, HamiltonianForm, HamiltonianSpec};
use crate::error::{require_positive, Error, Result};
use crate::minkowski::FourVector;

pub type Spinor = DVector<Complex64>;

/// Matrices `γ^μ` satisfying `{γ^μ, γ^ν} = 2η^{μν}·I`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaBasis {
    d: usize,
    matrices: Vec<DMatrix<Complex64>>,
}

impl GammaBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Side length of each matrix.
    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn gamma(&self, mu: usize) -> &DMatrix<Complex64> {
        &self.matrices[mu]
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.matrices
    }

    fn check(&self, v: &FourVector) -> Result<()> {
        if v.d() != self.d {
            return Err(Error::DimensionMismatch {
                left: v.d(),
                right: self.d,
            });
        }
        Ok(())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn matrix(n: usize, entries: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(n, n, entries)
}

/// `d = 1`: `γ⁰ = diag(1, −1)`, `γ¹ = [[0, 1], [−1, 0]]`.
/// `d = 3`: Dirac representation.
pub fn gamma_basis(d: usize) -> Result<GammaBasis> {
    let (o, l, m) = (c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0));
    let (i, mi) = (c(0.0, 1.0), c(0.0, -1.0));
    let matrices = match d {
        1 => vec![matrix(2, &[l, o, o, m]), matrix(2, &[o, l, m, o])],
        3 => vec![
            matrix(4, &[l, o, o, o, o, l, o, o, o, o, m, o, o, o, o, m]),
            matrix(4, &[o, o, o, l, o, o, l, o, o, m, o, o, m, o, o, o]),
            matrix(4, &[o, o, o, mi, o, o, i, o, o, i, o, o, mi, o, o, o]),
            matrix(4, &[o, o, l, o, o, o, o, m, m, o, o, o, o, l, o, o]),
        ],
        other => return Err(Error::UnsupportedDimension(other)),
    };
    Ok(GammaBasis { d, matrices })
}

/// `X = Σ_μ γ^μ x_μ` with `x_μ = η_{μμ}x^μ`; equal to the slash `γ_μ x^μ`.
pub fn clifford_map(x: &FourVector, basis: &GammaBasis) -> Result<DMatrix<Complex64>> {
    basis.check(x)?;
    let n = basis.dim();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for (mu, g) in basis.matrices.iter().enumerate() {
        let metric = if mu == 0 { 1.0 } else { -1.0 };
        out += g * c(metric * x.components()[mu], 0.0);
    }
    Ok(out)
}

/// Alias of [`clifford_map`] for momenta: `p̸ = γ_μ p^μ`.
pub fn slash(p: &FourVector, basis: &GammaBasis) -> Result<DMatrix<Complex64>> {
    clifford_map(p, basis)
}

/// Inverse of [`clifford_map`]: `x^μ = tr({X, γ^μ})/(2·dim)`.
pub fn clifford_components(x: &DMatrix<Complex64>, basis: &GammaBasis) -> Result<FourVector> {
    let n = basis.dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::param("matrix", format!("expected {n}×{n}")));
    }
    let mut comps = [0.0; 4];
    for (mu, g) in basis.matrices.iter().enumerate() {
        let anti = x * g + g * x;
        comps[mu] = anti.trace().re / (2.0 * n as f64);
    }
    FourVector::new(&comps[..=basis.d])
}

/// `(c/2)·γ_μp^μ − (m₀c²/2)·I`
pub fn dirac_operator(
    p: &FourVector,
    m0: f64,
    c_light: f64,
    basis: &GammaBasis,
) -> Result<DMatrix<Complex64>> {
    require_positive("m0", m0)?;
    require_positive("c", c_light)?;
    let n = basis.dim();
    Ok(slash(p, basis)? * c(0.5 * c_light, 0.0)
        - DMatrix::<Complex64>::identity(n, n) * c(0.5 * m0 * c_light * c_light, 0.0))
}

/// `‖(γ_μp^μ·c/2 − m₀c²/2)·u‖` in the Euclidean spinor norm, for unit `u`.
pub fn dirac_residual(
    u: &Spinor,
    p: &FourVector,
    m0: f64,
    c_light: f64,
    basis: &GammaBasis,
) -> Result<f64> {
    if u.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: basis.dim(),
        });
    }
    if (u.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::param("u", "spinor must have unit norm"));
    }
    Ok((dirac_operator(p, m0, c_light, basis)? * u).norm())
}

/// Unit spinor `(p̸ + m₀c)·w` annihilated by the Dirac operator when `p` is on
/// shell; `w` is the basis vector giving the largest image.
pub fn on_shell_spinor(p: &FourVector, m0: f64, c_light: f64, basis: &GammaBasis) -> Result<Spinor> {
    require_positive("m0", m0)?;
    let n = basis.dim();
    let proj = slash(p, basis)? + DMatrix::<Complex64>::identity(n, n) * c(m0 * c_light, 0.0);
    let best = (0..n)
        .max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm()))
        .unwrap_or(0);
    let col: Spinor = proj.column(best).into_owned();
    let norm = col.norm();
    if !(norm > 0.0) {
        return Err(Error::NonFinite("degenerate spinor projection".into()));
    }
    Ok(col / c(norm, 0.0))
}

/// Smallest singular value of the Dirac operator; zero exactly when a
/// nontrivial spinor solves the equation.
pub fn dirac_zero_mode(p: &FourVector, m0: f64, c_light: f64, basis: &GammaBasis) -> Result<f64> {
    let op = dirac_operator(p, m0, c_light, basis)?;
    Ok(op.singular_values().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Which expression of `M` is gauge shifted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MForm {
    Scalar(HamiltonianForm),
    /// `M = γ_μ(p + A)^μ·c/2`
    Dirac,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MValue {
    Scalar(f64),
    Matrix(DMatrix<Complex64>),
}

/// `M` with the minimal-coupling shift `p → p + A`.
pub fn gauge_shifted_m(
    p: &FourVector,
    a: &FourVector,
    m0: f64,
    c_light: f64,
    basis: &GammaBasis,
    form: MForm,
) -> Result<MValue> {
    match form {
        MForm::Scalar(f) => {
            let spec = HamiltonianSpec::new(f, m0, c_light, *a)?;
            Ok(MValue::Scalar(hamiltonian_value(&spec, p)?))
        }
        MForm::Dirac => {
            let q = p.try_add(a)?;
            Ok(MValue::Matrix(slash(&q, basis)? * c(0.5 * c_light, 0.0)))
        }
    }
}
