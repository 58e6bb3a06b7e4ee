//! Built-in problem instances: the 3x3 quadratic with three targets and the
//! Frank-matrix standard eigenproblem.

use num_complex::Complex64;

use crate::matpoly::{MatrixPolynomial, TargetSet, WeightSet};
use crate::numkernel::CMatrix;

fn real_matrix(n: usize, rows: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(n, n, rows.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// Quadratic 3x3 polynomial, targets `{1+i, -2, 3}`, weights `w_j = ||A_j||_2`.
pub fn example1() -> (MatrixPolynomial, TargetSet, WeightSet) {
    let a2 = real_matrix(3, &[7.0, 9.0, -2.0, 0.0, -2.0, 0.0, 6.0, -3.0, -1.0]);
    let a1 = real_matrix(3, &[9.0, -3.0, 3.0, -5.0, 8.0, 10.0, 4.0, -3.0, 0.0]);
    let a0 = real_matrix(3, &[-5.0, 0.0, 5.0, -2.0, -2.0, 10.0, 1.0, 9.0, 2.0]);
    let p = MatrixPolynomial::new(vec![a0, a1, a2]).expect("nonsingular leading coefficient");
    let targets = TargetSet::new(vec![
        Complex64::new(1.0, 1.0),
        Complex64::new(-2.0, 0.0),
        Complex64::new(3.0, 0.0),
    ])
    .expect("distinct targets");
    let w = WeightSet::coefficient_norms(&p).expect("positive w_0");
    (p, targets, w)
}

/// Targets for the Frank-matrix problem, in the order `-0.1, 0.1, 0.1i, -0.1i`.
pub fn example2_targets() -> TargetSet {
    TargetSet::new(vec![
        Complex64::new(-0.1, 0.0),
        Complex64::new(0.1, 0.0),
        Complex64::new(0.0, 0.1),
        Complex64::new(0.0, -0.1),
    ])
    .expect("distinct targets")
}

/// `I lambda - F_12` with targets `{-0.1, 0.1, 0.1i, -0.1i}` and `w = {1, 0}`.
pub fn example2() -> (MatrixPolynomial, TargetSet, WeightSet) {
    let p = MatrixPolynomial::linear_pencil(&frank_matrix(12)).expect("identity leading coefficient");
    (p, example2_targets(), WeightSet::unit(1))
}

/// Frank matrix of the given order: upper Hessenberg, entry `(i, j)` (1-based)
/// is `order + 1 - max(i, j)` for `i <= j + 1` and zero below the subdiagonal.
pub fn frank_matrix(order: usize) -> CMatrix {
    assert!(order >= 1, "Frank matrix order must be at least 1");
    CMatrix::from_fn(order, order, |i, j| {
        if i > j + 1 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((order - i.max(j)) as f64, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::spectral_norm;

    #[test]
    fn example1_weights_are_coefficient_norms() {
        let (_, _, w) = example1();
        let expected = [12.0731, 14.8523, 11.7991];
        for (got, want) in w.as_slice().iter().zip(expected) {
            assert!((got - want).abs() < 5e-5, "{got} vs {want}");
        }
        let (p, _, _) = example1();
        assert!((spectral_norm(p.coeff(2)).unwrap() - 11.7991).abs() < 5e-5);
    }

    #[test]
    fn frank_12_matches_display() {
        let f = frank_matrix(12);
        let first_row: Vec<f64> = (0..12).map(|j| f[(0, j)].re).collect();
        assert_eq!(first_row, (1..=12).rev().map(|x| x as f64).collect::<Vec<_>>());
        assert_eq!(f[(1, 0)].re, 11.0);
        assert_eq!(f[(2, 0)].re, 0.0);
        assert_eq!(f[(2, 1)].re, 10.0);
        let last_row: Vec<f64> = (0..12).map(|j| f[(11, j)].re).collect();
        let mut want = vec![0.0; 12];
        want[10] = 1.0;
        want[11] = 1.0;
        assert_eq!(last_row, want);
        assert!(f.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn frank_order_one() {
        assert_eq!(frank_matrix(1), CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn frank_12_has_unit_determinant() {
        // partial-pivot Gaussian elimination, independent of nalgebra's LU
        let n = 12;
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| frank_matrix(n)[(i, j)].re).collect()).collect();
        let mut det = 1.0;
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap()).unwrap();
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
        assert!((det - 1.0).abs() < 1e-8, "det = {det}");
    }
}
