//! Dense complex linear-algebra primitives.
//!
//! Everything floating-point heavy (SVD, pseudoinverse, eigenvalues) goes
//! through this module. Matrices are `nalgebra` types; the SVD is computed by
//! `faer`, the Schur form by `nalgebra`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const SVD_RESIDUAL_TOL: f64 = 1e-8;
const SCHUR_MAX_ITER: usize = 100_000;

/// One singular value with its left/right singular vectors: `M * right = sigma * left`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriple {
    pub sigma: f64,
    pub left: CVector,
    pub right: CVector,
}

/// Thin SVD `M = U diag(sigma) V*`, singular values in nonincreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn compute(m: &CMatrix) -> Result<Self> {
        check_finite(m)?;
        let a = faer::Mat::<Complex64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
        let svd = a.thin_svd().map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
        let (u, s, v) = (svd.U(), svd.S(), svd.V());
        let sigma: Vec<f64> = (0..s.dim()).map(|i| s[i].re).collect();
        if sigma.iter().any(|s| !s.is_finite()) {
            return Err(Error::Numerical("SVD produced non-finite singular values".into()));
        }
        let out = Svd {
            u: CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
            sigma,
            v: CMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
        };
        let residual = (out.reassemble() - m).norm();
        if !(residual <= SVD_RESIDUAL_TOL * m.norm()) {
            return Err(Error::Numerical(format!("SVD failed to reproduce its input (residual {residual:e})")));
        }
        Ok(out)
    }

    /// `U diag(sigma) V*`.
    pub fn reassemble(&self) -> CMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            let mut col = us.column_mut(j);
            col *= Complex64::new(*s, 0.0);
        }
        us * self.v.adjoint()
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// The `i`-th triple (0-based, nonincreasing order).
    pub fn triple(&self, i: usize) -> SingularTriple {
        SingularTriple {
            sigma: self.sigma[i],
            left: self.u.column(i).into_owned(),
            right: self.v.column(i).into_owned(),
        }
    }

    pub fn triples(&self) -> Vec<SingularTriple> {
        (0..self.len()).map(|i| self.triple(i)).collect()
    }

    pub fn largest(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// Numerical rank with the relative threshold `sigma_i > rel_tol * sigma_1`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cut = rel_tol * self.largest();
        self.sigma.iter().filter(|&&s| s > cut).count()
    }
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::InvalidInput("matrix must have at least one row and column".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// All singular triples of `m`, sorted by nonincreasing sigma.
pub fn svd(m: &CMatrix) -> Result<Vec<SingularTriple>> {
    Ok(Svd::compute(m)?.triples())
}

pub fn default_rank_tol(m: &CMatrix) -> f64 {
    m.nrows().max(m.ncols()) as f64 * f64::EPSILON
}

/// Moore-Penrose pseudoinverse by SVD truncation; singular values at or below
/// `rank_tol * s_max` are treated as zero.
pub fn pseudoinverse(m: &CMatrix, rank_tol: f64) -> Result<CMatrix> {
    if !(rank_tol >= 0.0) {
        return Err(Error::InvalidInput(format!("rank_tol must be nonnegative, got {rank_tol}")));
    }
    let svd = Svd::compute(m)?;
    let cut = rank_tol * svd.largest();
    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (i, &s) in svd.sigma.iter().enumerate() {
        if s <= cut || s == 0.0 {
            continue;
        }
        let v = svd.v.column(i);
        let u = svd.u.column(i);
        out += (v * u.adjoint()).unscale(s);
    }
    Ok(out)
}

pub fn pseudoinverse_default(m: &CMatrix) -> Result<CMatrix> {
    pseudoinverse(m, default_rank_tol(m))
}

/// Eigenvalues (with multiplicity, unordered) of a square matrix via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    check_finite(m)?;
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for i in 0..n - 1 {
        // complex Schur form is triangular; a surviving subdiagonal means no convergence
        if t[(i + 1, i)].norm() > 1e3 * f64::EPSILON * scale {
            return Err(Error::Numerical("Schur form is not triangular".into()));
        }
    }
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Largest singular value; the same code path as `svd`.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    Ok(Svd::compute(m)?.largest())
}
