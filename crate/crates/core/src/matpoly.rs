//! Matrix polynomials, weights, target sets and the divided-difference machinery.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{self, check_finite, CMatrix, Svd};

/// `P(lambda) = A_0 + A_1 lambda + ... + A_m lambda^m` with square `n x n` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<CMatrix>,
}

impl MatrixPolynomial {
    /// Builds a polynomial from `A_0..A_m`, requiring a nonsingular leading coefficient.
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        let p = Self::with_any_leading(coeffs)?;
        p.check_leading()?;
        Ok(p)
    }

    /// Same shape checks as [`MatrixPolynomial::new`] without the regularity requirement.
    ///
    /// Perturbations `Delta(lambda)` and the perturbed `Q(lambda)` may have a
    /// singular leading coefficient.
    pub fn with_any_leading(coeffs: Vec<CMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidInput("a matrix polynomial needs at least one coefficient".into()))?;
        let n = first.nrows();
        for (j, a) in coeffs.iter().enumerate() {
            check_finite(a).map_err(|e| Error::InvalidInput(format!("coefficient A_{j}: {e}")))?;
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::Dimension(format!(
                    "coefficient A_{j} is {}x{}, expected {n}x{n}",
                    a.nrows(),
                    a.ncols()
                )));
            }
        }
        Ok(MatrixPolynomial { coeffs })
    }

    /// `I lambda - A`.
    pub fn linear_pencil(a: &CMatrix) -> Result<Self> {
        let n = a.nrows();
        Self::new(vec![-a.clone(), CMatrix::identity(n, n)])
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &CMatrix {
        &self.coeffs[j]
    }

    pub fn leading(&self) -> &CMatrix {
        self.coeffs.last().expect("nonempty")
    }

    pub fn into_coeffs(self) -> Vec<CMatrix> {
        self.coeffs
    }

    fn check_leading(&self) -> Result<()> {
        let svd = Svd::compute(self.leading())?;
        let (s_min, norm) = (svd.smallest(), svd.largest());
        if !(s_min > 1e-12 * norm) {
            return Err(Error::SingularLeading { s_min, norm });
        }
        Ok(())
    }

    /// Horner evaluation of `P(lambda)`.
    pub fn evaluate(&self, lambda: Complex64) -> CMatrix {
        let mut acc = self.leading().clone();
        for a in self.coeffs.iter().rev().skip(1) {
            acc *= lambda;
            acc += a;
        }
        acc
    }

    /// Coefficient-wise sum `P + D`; degrees may differ.
    pub fn add(&self, other: &MatrixPolynomial) -> Result<MatrixPolynomial> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("adding {}x{} to {}x{} polynomial", other.dim(), other.dim(), self.dim(), self.dim())));
        }
        let n = self.dim();
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = CMatrix::zeros(n, n);
        let coeffs = (0..len)
            .map(|j| self.coeffs.get(j).unwrap_or(&zero) + other.coeffs.get(j).unwrap_or(&zero))
            .collect();
        MatrixPolynomial::with_any_leading(coeffs)
    }

    /// Matrix-valued Newton divided difference `P[nu_0, ..., nu_t]`.
    pub fn divided_difference(&self, nodes: &[Complex64]) -> Result<CMatrix> {
        if nodes.is_empty() {
            return Err(Error::InvalidInput("divided difference needs at least one node".into()));
        }
        check_separation(nodes)?;
        let table = DividedDifferences::new(self, nodes);
        Ok(table.get(0, nodes.len() - 1).clone())
    }

    /// Eigenvalues of `P` (`m * n` values with multiplicity) from the monic companion linearization.
    pub fn spectrum(&self) -> Result<Vec<Complex64>> {
        self.check_leading()?;
        let n = self.dim();
        let m = self.degree();
        if m == 0 {
            return Ok(Vec::new());
        }
        let lead = self.leading().clone();
        let lu = lead.lu();
        let size = m * n;
        let mut comp = CMatrix::zeros(size, size);
        for b in 0..m - 1 {
            for i in 0..n {
                comp[(b * n + i, (b + 1) * n + i)] = Complex64::new(1.0, 0.0);
            }
        }
        for j in 0..m {
            let block = lu
                .solve(&self.coeffs[j])
                .ok_or(Error::SingularLeading { s_min: 0.0, norm: numkernel::spectral_norm(self.leading())? })?;
            comp.view_mut(((m - 1) * n, j * n), (n, n)).copy_from(&(-block));
        }
        numkernel::eigenvalues(&comp)
    }

    pub fn max_coeff_norm(&self) -> Result<f64> {
        self.coeffs.iter().try_fold(0.0_f64, |acc, a| Ok(acc.max(numkernel::spectral_norm(a)?)))
    }
}

/// Nonnegative weights `w_0..w_m` with `w_0 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    weights: Vec<f64>,
}

impl WeightSet {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("weight set is empty".into()));
        }
        if let Some((j, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidInput(format!("weight w_{j} = {w} must be finite and nonnegative")));
        }
        if !(weights[0] > 0.0) {
            return Err(Error::InvalidInput("weight w_0 must be positive".into()));
        }
        Ok(WeightSet { weights })
    }

    /// `w = {1, 0, ..., 0}`: only the constant coefficient may move.
    pub fn unit(degree: usize) -> Self {
        let mut weights = vec![0.0; degree + 1];
        weights[0] = 1.0;
        WeightSet { weights }
    }

    /// `w_j = ||A_j||_2`.
    pub fn coefficient_norms(p: &MatrixPolynomial) -> Result<Self> {
        let weights = p.coeffs().iter().map(numkernel::spectral_norm).collect::<Result<Vec<_>>>()?;
        WeightSet::new(weights)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn degree(&self) -> usize {
        self.weights.len() - 1
    }

    pub(crate) fn check_degree(&self, p: &MatrixPolynomial) -> Result<()> {
        if self.degree() != p.degree() {
            return Err(Error::Dimension(format!(
                "{} weights given for a degree-{} polynomial",
                self.weights.len(),
                p.degree()
            )));
        }
        Ok(())
    }
}

/// The scalar polynomial `w(r) = sum_j w_j r^j`.
pub fn weight_poly(w: &WeightSet, r: f64) -> f64 {
    w.weights.iter().rev().fold(0.0, |acc, &wj| acc * r + wj)
}

/// Distinct prescribed eigenvalues `mu_1..mu_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    targets: Vec<Complex64>,
}

impl TargetSet {
    pub fn new(targets: Vec<Complex64>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidInput("target set is empty".into()));
        }
        if targets.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("targets must be finite".into()));
        }
        check_separation(&targets)?;
        Ok(TargetSet { targets })
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.targets[i]
    }

    pub(crate) fn check_fits(&self, n: usize) -> Result<()> {
        if self.len() > n {
            return Err(Error::Dimension(format!("k = {} targets exceed the dimension n = {n}", self.len())));
        }
        Ok(())
    }
}

/// Rejects node sets with `min |mu_i - mu_j| < 1e-8 * max(1 + |mu_i|)`.
fn check_separation(nodes: &[Complex64]) -> Result<()> {
    let scale = nodes.iter().map(|z| 1.0 + z.norm()).fold(0.0, f64::max);
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let gap = (nodes[i] - nodes[j]).norm();
            if gap < 1e-8 * scale {
                return Err(Error::InvalidInput(format!(
                    "targets {} and {} are not distinct (|difference| = {gap:e})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Table of all divided differences `P[mu_i, ..., mu_{i+t}]` over consecutive nodes.
#[derive(Debug, Clone)]
pub struct DividedDifferences {
    // levels[t][i] = P[mu_i, ..., mu_{i+t}]
    levels: Vec<Vec<CMatrix>>,
}

impl DividedDifferences {
    /// Nodes must already be pairwise distinct.
    pub fn new(p: &MatrixPolynomial, nodes: &[Complex64]) -> Self {
        let k = nodes.len();
        let mut levels: Vec<Vec<CMatrix>> = Vec::with_capacity(k);
        levels.push(nodes.iter().map(|&mu| p.evaluate(mu)).collect());
        for t in 1..k {
            let prev = &levels[t - 1];
            let level = (0..k - t)
                .map(|i| (&prev[i] - &prev[i + 1]) / (nodes[i] - nodes[i + t]))
                .collect();
            levels.push(level);
        }
        DividedDifferences { levels }
    }

    /// `P[mu_first, ..., mu_last]` (0-based, `first <= last`).
    pub fn get(&self, first: usize, last: usize) -> &CMatrix {
        &self.levels[last - first][first]
    }
}

/// `varpi[mu] = w(|mu|)`.
pub fn varpi_single(w: &WeightSet, mu: Complex64) -> f64 {
    weight_poly(w, mu.norm())
}

/// `varpi[mu_a, mu_b] = sum_j w_j |mu_a^j - mu_b^j| / |mu_a - mu_b|`.
pub fn varpi_pair(w: &WeightSet, a: Complex64, b: Complex64) -> Result<f64> {
    check_separation(&[a, b])?;
    Ok(varpi_pair_unchecked(w, a, b))
}

fn varpi_pair_unchecked(w: &WeightSet, a: Complex64, b: Complex64) -> f64 {
    // (a^j - b^j) / (a - b) = sum_{l<j} a^l b^{j-1-l}, accumulated as h_j = a h_{j-1} + b^{j-1}
    let mut h = Complex64::new(0.0, 0.0);
    let mut b_pow = Complex64::new(1.0, 0.0);
    let mut total = 0.0;
    for &wj in w.weights.iter().skip(1) {
        h = a * h + b_pow;
        b_pow *= b;
        total += wj * h.norm();
    }
    total
}

/// `varpi[mu_i, ..., mu_{i+t}]` for any number of nodes, following the recursion
/// with a sum in the numerator and a modulus in the denominator for `t >= 2`.
pub fn varpi_recursive(w: &WeightSet, nodes: &[Complex64]) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::InvalidInput("varpi needs at least one node".into()));
    }
    check_separation(nodes)?;
    let table = VarpiTable::new(w, nodes);
    Ok(table.get(0, nodes.len() - 1))
}

/// Table of `varpi[mu_i, ..., mu_{i+t}]` over consecutive nodes.
#[derive(Debug, Clone)]
pub struct VarpiTable {
    levels: Vec<Vec<f64>>,
}

impl VarpiTable {
    pub fn new(w: &WeightSet, nodes: &[Complex64]) -> Self {
        let k = nodes.len();
        let mut levels = Vec::with_capacity(k);
        levels.push(nodes.iter().map(|&mu| varpi_single(w, mu)).collect::<Vec<_>>());
        if k > 1 {
            levels.push((0..k - 1).map(|i| varpi_pair_unchecked(w, nodes[i], nodes[i + 1])).collect());
        }
        for t in 2..k {
            let prev = &levels[t - 1];
            let level = (0..k - t)
                .map(|i| (prev[i] + prev[i + 1]) / (nodes[i] - nodes[i + t]).norm())
                .collect();
            levels.push(level);
        }
        VarpiTable { levels }
    }

    pub fn get(&self, first: usize, last: usize) -> f64 {
        self.levels[last - first][first]
    }
}
