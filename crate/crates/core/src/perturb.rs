//! Construction of the perturbation `Delta_gamma(lambda)` that places every
//! target in the spectrum of `Q_gamma = P + Delta_gamma`, the constant
//! `gamma = 0` variant, and the standard-eigenproblem specialization.

use num_complex::Complex64;

use crate::error::{Error, Infeasibility, Result};
use crate::fgamma::{self, RhoTriple};
use crate::matpoly::{weight_poly, MatrixPolynomial, TargetSet, WeightSet};
use crate::numkernel::{self, CMatrix, CVector, Svd};

/// Relative threshold for `rank(V) = k`: `s_k(V) > RANK_TOL * s_1(V)`.
pub const RANK_TOL: f64 = 1e-10;
/// `|beta_s| < ZERO_BETA_TOL * max |beta|` counts as zero.
pub const ZERO_BETA_TOL: f64 = 1e-12;
/// Singular values at or below `ZERO_SIGMA_TOL * ||M||_2` are taken as exactly zero.
pub const ZERO_SIGMA_TOL: f64 = 64.0 * f64::EPSILON;

/// Columns `u_hat_i`, `v_hat_i` that decouple the block system into
/// `s_rho u_hat_i = P(mu_i) v_hat_i`.
#[derive(Debug, Clone)]
pub struct HatVectors {
    pub u_hat: CMatrix,
    pub v_hat: CMatrix,
    /// Numerical rank of the raw `V(gamma)`.
    pub rank_v: usize,
    /// `theta_{i,j}` for `i != j`; the diagonal is unused and zero.
    pub thetas: CMatrix,
}

pub fn hat_transform(triple: &RhoTriple, targets: &TargetSet, gamma: f64) -> Result<HatVectors> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!("gamma must be positive, got {gamma}")));
    }
    let k = targets.len();
    if triple.k != k {
        return Err(Error::Dimension(format!("triple has {} blocks for {k} targets", triple.k)));
    }
    let thetas = CMatrix::from_fn(k, k, |i, j| {
        if i == j {
            Complex64::new(0.0, 0.0)
        } else {
            fgamma::theta(targets, gamma, i, j)
        }
    });
    let u = triple.u_matrix();
    let v = triple.v_matrix();
    let mut u_hat = u.clone();
    let mut v_hat = v.clone();
    for p in 1..k {
        // coefficient of column q < p: (-1)^(p-q) prod_{j=q}^{p-1} theta_{j,p}
        let mut coeff = Complex64::new(1.0, 0.0);
        for q in (0..p).rev() {
            coeff *= -thetas[(q, p)];
            let du = u.column(q) * coeff;
            let dv = v.column(q) * coeff;
            let mut uc = u_hat.column_mut(p);
            uc += du;
            let mut vc = v_hat.column_mut(p);
            vc += dv;
        }
    }
    let rank_v = Svd::compute(&v)?.rank(RANK_TOL);
    Ok(HatVectors { u_hat, v_hat, rank_v, thetas })
}

/// `alpha_{i,s}` and their column means `beta_s`.
#[derive(Debug, Clone)]
pub struct BetaScalars {
    pub alphas: CMatrix,
    pub betas: Vec<Complex64>,
    /// Some `|beta_s| < 1e-12 * max |beta|`.
    pub has_zero: bool,
}

impl BetaScalars {
    pub fn first_zero(&self) -> Option<(usize, f64)> {
        let max = self.betas.iter().map(|b| b.norm()).fold(0.0, f64::max);
        self.betas
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.norm() >= ZERO_BETA_TOL * max) || b.norm() == 0.0)
            .map(|(i, b)| (i, b.norm()))
    }
}

/// `(conj(mu) / |mu|)^j`, read as `0^j` (1 for `j = 0`, 0 otherwise) at `mu = 0`.
pub fn phase_power(mu: Complex64, j: usize) -> Complex64 {
    if mu.norm() == 0.0 {
        if j == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    } else {
        (mu.conj() / mu.norm()).powu(j as u32)
    }
}

pub fn beta_scalars(w: &WeightSet, targets: &TargetSet) -> BetaScalars {
    let k = targets.len();
    let mu = targets.as_slice();
    let alphas = CMatrix::from_fn(k, k, |i, s| {
        if mu[i].norm() == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let sum: Complex64 = w
            .as_slice()
            .iter()
            .enumerate()
            .map(|(j, &wj)| phase_power(mu[i], j) * mu[s].powu(j as u32) * wj)
            .sum();
        sum / weight_poly(w, mu[i].norm())
    });
    let betas: Vec<Complex64> = (0..k).map(|s| alphas.column(s).sum() / k as f64).collect();
    let mut out = BetaScalars { alphas, betas, has_zero: false };
    out.has_zero = out.first_zero().is_some();
    out
}

/// `(1/k) sum_i 1 / w(|mu_i|)`.
pub fn weight_factor(w: &WeightSet, targets: &TargetSet) -> f64 {
    targets.as_slice().iter().map(|mu| 1.0 / weight_poly(w, mu.norm())).sum::<f64>() / targets.len() as f64
}

/// Scalar multipliers `c_j` with `Delta_{gamma,j} = c_j Delta_gamma`.
pub fn coefficient_factors(w: &WeightSet, targets: &TargetSet) -> Vec<Complex64> {
    let k = targets.len() as f64;
    (0..=w.degree())
        .map(|j| {
            let s: Complex64 = targets
                .as_slice()
                .iter()
                .map(|&mu| phase_power(mu, j) / weight_poly(w, mu.norm()))
                .sum();
            s * w.get(j) / k
        })
        .collect()
}

/// The perturbation, the perturbed polynomial and its certificates.
#[derive(Debug, Clone)]
pub struct PerturbationResult {
    pub gamma: f64,
    /// `s_rho(F_gamma[P, Sigma])`; `None` for the `gamma = 0` branch.
    pub sigma_rho: Option<f64>,
    /// `Delta_gamma` (for `gamma = 0`, the constant `Delta_0`).
    pub delta_gamma: CMatrix,
    /// `Delta_{gamma,0}, ..., Delta_{gamma,m}`.
    pub delta_coeffs: Vec<CMatrix>,
    pub q: MatrixPolynomial,
    /// Eigenvector candidates, one column per target.
    pub eigvecs: CMatrix,
    /// `||Q(mu_i) x_i||_2 / ||x_i||_2` for the eigenvector columns `x_i`.
    pub residuals: Vec<f64>,
    /// `beta_up` for `gamma > 0`, `||Delta_0||_2 / w_0` for `gamma = 0`.
    pub bound: f64,
    pub degenerate_svd: bool,
}

impl PerturbationResult {
    /// `Delta(lambda) = sum_j Delta_{gamma,j} lambda^j` as a polynomial.
    pub fn delta_poly(&self) -> Result<MatrixPolynomial> {
        MatrixPolynomial::with_any_leading(self.delta_coeffs.clone())
    }
}

fn residuals(q: &MatrixPolynomial, targets: &TargetSet, eigvecs: &CMatrix) -> Result<Vec<f64>> {
    targets
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            let x = eigvecs.column(i);
            let norm = x.norm();
            if norm > 0.0 {
                Ok((q.evaluate(mu) * x).norm() / norm)
            } else {
                Ok(Svd::compute(&q.evaluate(mu))?.smallest())
            }
        })
        .collect()
}

/// `Delta_gamma = -s_rho U_hat diag(1/beta) V_hat^+` and the coefficient perturbations.
pub fn build_delta(
    p: &MatrixPolynomial,
    targets: &TargetSet,
    w: &WeightSet,
    gamma: f64,
    hv: &HatVectors,
    bs: &BetaScalars,
    triple: &RhoTriple,
) -> Result<PerturbationResult> {
    w.check_degree(p)?;
    targets.check_fits(p.dim())?;
    let n = p.dim();
    let k = targets.len();
    let sigma = triple.sigma_rho;

    if sigma <= ZERO_SIGMA_TOL * triple.norm {
        // targets already in the spectrum: nothing to move
        let zero = CMatrix::zeros(n, n);
        let q = p.clone();
        let residuals = residuals(&q, targets, &hv.v_hat)?;
        return Ok(PerturbationResult {
            gamma,
            sigma_rho: Some(0.0),
            delta_gamma: zero.clone(),
            delta_coeffs: vec![zero; p.degree() + 1],
            q,
            eigvecs: hv.v_hat.clone(),
            residuals,
            bound: 0.0,
            degenerate_svd: triple.degenerate,
        });
    }

    if hv.rank_v < k {
        return Err(Error::Infeasible(Infeasibility::RankDeficient { rank: hv.rank_v, k }));
    }
    if let Some((index, modulus)) = bs.first_zero() {
        return Err(Error::Infeasible(Infeasibility::ZeroBeta { index, modulus }));
    }

    let mut scaled = hv.u_hat.clone();
    for (s, beta) in bs.betas.iter().enumerate() {
        let inv = Complex64::new(1.0, 0.0) / beta;
        let mut col = scaled.column_mut(s);
        col *= inv;
    }
    let v_pinv = numkernel::pseudoinverse_default(&hv.v_hat)?;
    let core = scaled * v_pinv;
    let core_norm = numkernel::spectral_norm(&core)?;
    let delta_gamma = &core * Complex64::new(-sigma, 0.0);
    let bound = weight_factor(w, targets) * (sigma * core_norm);

    let delta_coeffs: Vec<CMatrix> = coefficient_factors(w, targets).into_iter().map(|cj| &delta_gamma * cj).collect();
    let q_coeffs = p.coeffs().iter().zip(&delta_coeffs).map(|(a, d)| a + d).collect();
    let q = MatrixPolynomial::with_any_leading(q_coeffs)?;
    let residuals = residuals(&q, targets, &hv.v_hat)?;
    Ok(PerturbationResult {
        gamma,
        sigma_rho: Some(sigma),
        delta_gamma,
        delta_coeffs,
        q,
        eigvecs: hv.v_hat.clone(),
        residuals,
        bound,
        degenerate_svd: triple.degenerate,
    })
}

/// The `gamma = 0` construction: a constant perturbation of `A_0` built from the
/// smallest singular triples of each `P(mu_i)`.
pub fn build_q0(p: &MatrixPolynomial, targets: &TargetSet, w: &WeightSet) -> Result<PerturbationResult> {
    w.check_degree(p)?;
    targets.check_fits(p.dim())?;
    let n = p.dim();
    let k = targets.len();
    let mut u_tilde = CMatrix::zeros(n, k);
    let mut v_tilde = CMatrix::zeros(n, k);
    let mut sigmas = Vec::with_capacity(k);
    for (i, &mu) in targets.as_slice().iter().enumerate() {
        let svd = Svd::compute(&p.evaluate(mu))?;
        let last = svd.triple(svd.len() - 1);
        let s = if last.sigma <= ZERO_SIGMA_TOL * svd.largest() { 0.0 } else { last.sigma };
        u_tilde.set_column(i, &last.left);
        v_tilde.set_column(i, &last.right);
        sigmas.push(s);
    }

    let delta0 = if sigmas.iter().all(|&s| s == 0.0) {
        CMatrix::zeros(n, n)
    } else {
        let rank = Svd::compute(&v_tilde)?.rank(RANK_TOL);
        if rank < k {
            return Err(Error::Infeasible(Infeasibility::DependentVectors { rank, k }));
        }
        let mut scaled = u_tilde;
        for (i, &s) in sigmas.iter().enumerate() {
            let mut col = scaled.column_mut(i);
            col *= Complex64::new(-s, 0.0);
        }
        scaled * numkernel::pseudoinverse_default(&v_tilde)?
    };

    let bound = numkernel::spectral_norm(&delta0)? / w.get(0);
    let mut delta_coeffs = vec![CMatrix::zeros(n, n); p.degree() + 1];
    delta_coeffs[0] = delta0.clone();
    let mut q_coeffs = p.coeffs().to_vec();
    if sigmas.iter().any(|&s| s != 0.0) {
        q_coeffs[0] += &delta0;
    }
    let q = MatrixPolynomial::with_any_leading(q_coeffs)?;
    let residuals = residuals(&q, targets, &v_tilde)?;
    Ok(PerturbationResult {
        gamma: 0.0,
        sigma_rho: None,
        delta_gamma: delta0,
        delta_coeffs,
        q,
        eigvecs: v_tilde,
        residuals,
        bound,
        degenerate_svd: false,
    })
}

/// Perturbation of a matrix `A` so that `A + E` has every target as an eigenvalue.
#[derive(Debug, Clone)]
pub struct StandardPerturbation {
    /// The construction for `P(lambda) = I lambda - A`, `w = {1, 0}`.
    pub result: PerturbationResult,
    /// `A - Delta_gamma`, the matrix whose spectrum contains the targets.
    pub perturbed_matrix: CMatrix,
}

pub fn build_delta_standard(a: &CMatrix, targets: &TargetSet, gamma: f64) -> Result<StandardPerturbation> {
    let p = MatrixPolynomial::linear_pencil(a)?;
    let w = WeightSet::unit(1);
    let f = fgamma::assemble_f(&p, targets, gamma)?;
    let triple = fgamma::rho_triple(&f)?;
    let hv = hat_transform(&triple, targets, gamma)?;
    let bs = beta_scalars(&w, targets);
    let result = build_delta(&p, targets, &w, gamma, &hv, &bs, &triple)?;
    let perturbed_matrix = a - &result.delta_coeffs[0];
    Ok(StandardPerturbation { result, perturbed_matrix })
}

/// Full pipeline at one `gamma`: `gamma = 0` selects [`build_q0`].
pub fn construct(p: &MatrixPolynomial, targets: &TargetSet, w: &WeightSet, gamma: f64) -> Result<PerturbationResult> {
    if gamma == 0.0 {
        return build_q0(p, targets, w);
    }
    let f = fgamma::assemble_f(p, targets, gamma)?;
    let triple = fgamma::rho_triple(&f)?;
    let hv = hat_transform(&triple, targets, gamma)?;
    let bs = beta_scalars(w, targets);
    build_delta(p, targets, w, gamma, &hv, &bs, &triple)
}

/// `||x||` of a column, shared by tests and reports.
pub fn column_norms(m: &CMatrix) -> Vec<f64> {
    m.column_iter().map(|c| c.norm()).collect()
}

#[doc(hidden)]
pub fn hat_identity_residual(p: &MatrixPolynomial, targets: &TargetSet, triple: &RhoTriple, hv: &HatVectors) -> f64 {
    (0..targets.len())
        .map(|i| {
            let lhs: CVector = hv.u_hat.column(i) * Complex64::new(triple.sigma_rho, 0.0);
            let rhs = p.evaluate(targets.get(i)) * hv.v_hat.column(i);
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max)
}
