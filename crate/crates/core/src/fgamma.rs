//! Assembly of the block lower-triangular `F_gamma[P, Sigma]` and the scalar
//! `F_gamma[varpi, Sigma]`, plus extraction of the rho-th singular triple.

use num_complex::Complex64;

use crate::error::{Error, Infeasibility, Result};
use crate::matpoly::{DividedDifferences, MatrixPolynomial, TargetSet, VarpiTable, WeightSet};
use crate::numkernel::{CMatrix, CVector, Svd};

/// Relative gap (against `s_1`) below which the rho-th singular value counts as repeated.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// `F_gamma[P, Sigma]` kept in block form: block `(i, j)`, `i >= j`, is
/// `gamma^(i-j) P[mu_j, ..., mu_i]`.
#[derive(Debug, Clone)]
pub struct GammaMatrix {
    pub gamma: f64,
    pub n: usize,
    pub k: usize,
    // row-major lower triangle: blocks[i * (i + 1) / 2 + j]
    blocks: Vec<CMatrix>,
}

impl GammaMatrix {
    /// `rho = n k - k + 1` (1-based rank index into nonincreasing singular values).
    pub fn rho(&self) -> usize {
        self.n * self.k - self.k + 1
    }

    /// Block `(i, j)`, zero above the diagonal.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        if j > i {
            CMatrix::zeros(self.n, self.n)
        } else {
            self.blocks[i * (i + 1) / 2 + j].clone()
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n * self.k, n * self.k);
        for i in 0..self.k {
            for j in 0..=i {
                out.view_mut((i * n, j * n), (n, n)).copy_from(&self.blocks[i * (i + 1) / 2 + j]);
            }
        }
        out
    }
}

/// Caches the divided-difference table of `(P, Sigma)`; `gamma` only enters
/// through the scalar powers `gamma^(i-j)`.
#[derive(Debug, Clone)]
pub struct GammaAssembler {
    n: usize,
    k: usize,
    table: DividedDifferences,
}

impl GammaAssembler {
    pub fn new(p: &MatrixPolynomial, targets: &TargetSet) -> Result<Self> {
        targets.check_fits(p.dim())?;
        Ok(GammaAssembler {
            n: p.dim(),
            k: targets.len(),
            table: DividedDifferences::new(p, targets.as_slice()),
        })
    }

    pub fn assemble(&self, gamma: f64) -> Result<GammaMatrix> {
        check_gamma(gamma)?;
        let mut blocks = Vec::with_capacity(self.k * (self.k + 1) / 2);
        for i in 0..self.k {
            for j in 0..=i {
                let factor = gamma.powi((i - j) as i32);
                blocks.push(self.table.get(j, i) * Complex64::new(factor, 0.0));
            }
        }
        Ok(GammaMatrix { gamma, n: self.n, k: self.k, blocks })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!("gamma must be real, finite and nonnegative, got {gamma}")));
    }
    Ok(())
}

pub fn assemble_f(p: &MatrixPolynomial, targets: &TargetSet, gamma: f64) -> Result<GammaMatrix> {
    GammaAssembler::new(p, targets)?.assemble(gamma)
}

/// `F_gamma[varpi, Sigma]`: `k x k`, lower triangular, entry `(i, j)` equal to
/// `gamma^(i-j) varpi[mu_j, ..., mu_i]`.
pub fn assemble_f_varpi(w: &WeightSet, targets: &TargetSet, gamma: f64) -> Result<CMatrix> {
    check_gamma(gamma)?;
    Ok(varpi_matrix(&VarpiTable::new(w, targets.as_slice()), targets.len(), gamma))
}

pub(crate) fn varpi_matrix(table: &VarpiTable, k: usize, gamma: f64) -> CMatrix {
    CMatrix::from_fn(k, k, |i, j| {
        if j > i {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(gamma.powi((i - j) as i32) * table.get(j, i), 0.0)
        }
    })
}

/// The singular triple of `F_gamma[P, Sigma]` at rank index `rho`.
#[derive(Debug, Clone)]
pub struct RhoTriple {
    pub sigma_rho: f64,
    /// Left singular vector, partitioned into `k` blocks of length `n`.
    pub u: CVector,
    /// Right singular vector, partitioned the same way.
    pub v: CVector,
    pub n: usize,
    pub k: usize,
    /// `s_1(F_gamma)`, i.e. `||F_gamma||_2`.
    pub norm: f64,
    /// Set when `s_rho` is numerically repeated; the pair is then one of many.
    pub degenerate: bool,
}

impl RhoTriple {
    pub fn u_block(&self, i: usize) -> CVector {
        self.u.rows(i * self.n, self.n).into_owned()
    }

    pub fn v_block(&self, i: usize) -> CVector {
        self.v.rows(i * self.n, self.n).into_owned()
    }

    /// `U(gamma) = [u_1 ... u_k]` (`n x k`).
    pub fn u_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.k, |r, c| self.u[c * self.n + r])
    }

    /// `V(gamma) = [v_1 ... v_k]` (`n x k`).
    pub fn v_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.k, |r, c| self.v[c * self.n + r])
    }
}

pub fn rho_triple(f: &GammaMatrix) -> Result<RhoTriple> {
    let svd = Svd::compute(&f.to_dense())?;
    let idx = f.rho() - 1;
    let s1 = svd.largest();
    let sigma = &svd.sigma;
    let gap_tol = DEGENERACY_GAP * s1;
    let below = idx + 1 < sigma.len() && sigma[idx] - sigma[idx + 1] < gap_tol;
    let above = idx > 0 && sigma[idx - 1] - sigma[idx] < gap_tol;
    let t = svd.triple(idx);
    Ok(RhoTriple {
        sigma_rho: t.sigma,
        u: t.left,
        v: t.right,
        n: f.n,
        k: f.k,
        norm: s1,
        degenerate: below || above,
    })
}

/// `theta_{i,j} = gamma / (mu_i - mu_j)` for `i != j` (0-based indices).
pub fn theta(targets: &TargetSet, gamma: f64, i: usize, j: usize) -> Complex64 {
    Complex64::new(gamma, 0.0) / (targets.get(i) - targets.get(j))
}

/// The `k` vectors spanning a subspace of the null space of `F_gamma[P, Sigma]`
/// when every target is an eigenvalue of `P`, built from the given eigenvectors
/// `nu_i` (`P(mu_i) nu_i = 0`).
///
/// Vector `i` is zero in blocks `< i`, `nu_i` in block `i`, and
/// `(prod_{l=i+1}^{q} theta_{i,l}) nu_i` in block `q > i`.
pub fn null_family_from_vectors(targets: &TargetSet, gamma: f64, nus: &[CVector]) -> Result<Vec<CVector>> {
    let k = targets.len();
    if nus.len() != k {
        return Err(Error::Dimension(format!("{} eigenvectors for {k} targets", nus.len())));
    }
    let n = nus[0].len();
    let mut out = Vec::with_capacity(k);
    for (i, nu) in nus.iter().enumerate() {
        if nu.len() != n {
            return Err(Error::Dimension("eigenvectors differ in length".into()));
        }
        let mut x = CVector::zeros(n * k);
        let mut factor = Complex64::new(1.0, 0.0);
        for q in i..k {
            if q > i {
                factor *= theta(targets, gamma, i, q);
            }
            x.rows_mut(q * n, n).copy_from(&(nu * factor));
        }
        out.push(x);
    }
    Ok(out)
}

/// Null-vector family with `nu_i` taken as the right singular vector of `s_n(P(mu_i))`.
///
/// Fails when some `s_n(P(mu_i))` exceeds `1e-8 * max_j ||A_j||_2 * max(1, |mu_i|)^m`,
/// i.e. the target is not an eigenvalue.
pub fn null_family(p: &MatrixPolynomial, targets: &TargetSet, gamma: f64) -> Result<Vec<CVector>> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidInput(format!("gamma must be positive, got {gamma}")));
    }
    targets.check_fits(p.dim())?;
    let coeff_scale = p.max_coeff_norm()?;
    let mut nus = Vec::with_capacity(targets.len());
    for (i, &mu) in targets.as_slice().iter().enumerate() {
        let svd = Svd::compute(&p.evaluate(mu))?;
        let s_n = svd.smallest();
        if s_n > 1e-8 * coeff_scale * mu.norm().max(1.0).powi(p.degree() as i32) {
            return Err(Error::Infeasible(Infeasibility::NotAnEigenvalue { index: i, smallest_singular_value: s_n }));
        }
        nus.push(svd.v.column(svd.len() - 1).into_owned());
    }
    null_family_from_vectors(targets, gamma, &nus)
}
