#![allow(dead_code)]

use polydist_core::{CMatrix, Complex64, MatrixPolynomial, TargetSet};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_poly<R: Rng>(rng: &mut R, n: usize, m: usize) -> MatrixPolynomial {
    loop {
        let coeffs = (0..=m).map(|_| random_matrix(rng, n)).collect();
        if let Ok(p) = MatrixPolynomial::new(coeffs) {
            return p;
        }
    }
}

/// `k` targets in the disk of radius 1.5, pairwise at least 0.2 apart.
pub fn random_targets<R: Rng>(rng: &mut R, k: usize) -> TargetSet {
    let mut pts: Vec<Complex64> = Vec::with_capacity(k);
    while pts.len() < k {
        let z = c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        if z.norm() <= 1.5 && pts.iter().all(|q| (q - z).norm() >= 0.2) {
            pts.push(z);
        }
    }
    TargetSet::new(pts).unwrap()
}

pub fn min_dist(spec: &[Complex64], mu: Complex64) -> f64 {
    spec.iter().map(|z| (z - mu).norm()).fold(f64::INFINITY, f64::min)
}

/// Complete homogeneous symmetric polynomial of degree `d` in `nodes`, by
/// enumerating nondecreasing index tuples.
pub fn complete_homogeneous(nodes: &[Complex64], d: usize) -> Complex64 {
    fn rec(nodes: &[Complex64], start: usize, left: usize, acc: Complex64) -> Complex64 {
        if left == 0 {
            return acc;
        }
        (start..nodes.len()).map(|i| rec(nodes, i, left - 1, acc * nodes[i])).sum()
    }
    rec(nodes, 0, d, c(1.0, 0.0))
}

/// Divided difference of `sum_j A_j lambda^j` over `nodes` as
/// `sum_j A_j h_{j-t}(nodes)`, `t = nodes.len() - 1`.
pub fn dd_closed_form(p: &MatrixPolynomial, nodes: &[Complex64]) -> CMatrix {
    let t = nodes.len() - 1;
    let n = p.dim();
    let mut out = CMatrix::zeros(n, n);
    for j in t..=p.degree() {
        out += p.coeff(j) * complete_homogeneous(nodes, j - t);
    }
    out
}
