//! HBVM(k, s) coefficients and their Runge-Kutta form.
//!
//! With `k` Gauss-Legendre nodes `c_i`, weights `ω_i` and the orthonormal basis
//! `P_1..P_s`, the method is
//!
//! ```text
//! y_i = y_0 + h Σ_j a_ij Σ_l ω_l P_j(c_l) J∇H(y_l),   a_ij = ∫_0^{c_i} P_j,
//! ```
//!
//! which is the `k`-stage Runge-Kutta scheme with `M_il = ω_l Σ_j a_ij P_j(c_l)`,
//! `b = ω`. For `k = s` it is the `s`-stage Gauss collocation method. Letting
//! `k` grow recovers the continuous-quadrature limit for non-polynomial `H`,
//! so that case needs no separate code path.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{HbvmError, Result};
use crate::legendre::tabulate_basis;
use crate::quadrature::{gauss_rule, QuadratureRule};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct HbvmTableau<T> {
    pub s: usize,
    pub k: usize,
    pub rule: Arc<QuadratureRule<T>>,
    /// `basis_at_nodes[l][j - 1] = P_j(c_l)`, `k × s`.
    pub basis_at_nodes: Vec<Vec<T>>,
    /// `integrated_basis[i][j - 1] = ∫_0^{c_i} P_j`, `k × s`.
    pub integrated_basis: Vec<Vec<T>>,
    /// `end_integrals[j - 1] = ∫_0^1 P_j`, which is `(1, 0, …, 0)`.
    pub end_integrals: Vec<T>,
}

/// Builds the HBVM(k, s) tableau. Note the argument order: nodes first.
pub fn build_tableau<T: Scalar>(k: usize, s: usize) -> Result<HbvmTableau<T>> {
    if s < 1 {
        return Err(HbvmError::Argument("s must be >= 1".into()));
    }
    if k < s {
        return Err(HbvmError::Argument(format!(
            "k must be >= s (k = {k}, s = {s})"
        )));
    }
    let rule = gauss_rule::<T>(k)?;
    // lower half (and the midpoint) directly; upper half by reflection through
    // x = 1/2: P_j(1 - x) = (-1)^(j-1) P_j(x), ∫_0^{1-x} P_j = δ_j1 - (-1)^(j-1) ∫_0^x P_j,
    // which keeps the discrete scheme exactly symmetric
    let lower = k.div_ceil(2);
    let table = tabulate_basis(s, &rule.nodes[..lower])?;
    let mut basis_at_nodes = vec![vec![T::zero(); s]; k];
    let mut integrated_basis = vec![vec![T::zero(); s]; k];
    for l in 0..lower {
        let mirror = k - 1 - l;
        for j in 0..s {
            let (value, integral) = (table.values[j][l], table.integrals[j][l]);
            basis_at_nodes[l][j] = value;
            integrated_basis[l][j] = integral;
            if mirror != l {
                let odd = j % 2 == 1;
                basis_at_nodes[mirror][j] = if odd { -value } else { value };
                integrated_basis[mirror][j] = match j {
                    0 => rule.nodes[mirror],
                    _ if odd => integral,
                    _ => -integral,
                };
            }
        }
    }
    let end = tabulate_basis(s, &[T::one()])?;
    let end_integrals = end.integrals.iter().map(|row| row[0]).collect();
    Ok(HbvmTableau {
        s,
        k,
        rule,
        basis_at_nodes,
        integrated_basis,
        end_integrals,
    })
}

/// Smallest `k >= s` for which `k` Gauss nodes integrate the line integral of a
/// degree-`nu` polynomial Hamiltonian exactly: `max(s, ⌈nu·s/2⌉)`.
pub fn min_silent_k(nu: usize, s: usize) -> usize {
    s.max((nu * s).div_ceil(2))
}

/// Butcher form `(M, b, c)` of an HBVM tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct RungeKuttaForm<T> {
    pub matrix: Vec<Vec<T>>,
    pub weights: Vec<T>,
    pub abscissae: Vec<T>,
}

impl<T: Scalar> HbvmTableau<T> {
    pub fn nodes(&self) -> &[T] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.rule.weights
    }

    pub fn as_runge_kutta(&self) -> RungeKuttaForm<T> {
        let w = &self.rule.weights;
        let matrix = (0..self.k)
            .map(|i| {
                (0..self.k)
                    .map(|l| {
                        let dot = (0..self.s).fold(T::zero(), |acc, j| {
                            acc + self.integrated_basis[i][j] * self.basis_at_nodes[l][j]
                        });
                        w[l] * dot
                    })
                    .collect()
            })
            .collect();
        RungeKuttaForm {
            matrix,
            weights: w.clone(),
            abscissae: self.rule.nodes.clone(),
        }
    }

    /// Stability function `R(z) = 1 + z bᵀ (I - zM)⁻¹ 1`.
    pub fn stability_value(&self, z: Complex<T>) -> Result<Complex<T>> {
        let rk = self.as_runge_kutta();
        let n = self.k;
        let mut a: Vec<Vec<Complex<T>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|l| {
                        let id = if i == l { T::one() } else { T::zero() };
                        Complex::new(id, T::zero()) - z * rk.matrix[i][l]
                    })
                    .collect()
            })
            .collect();
        let mut rhs = vec![Complex::new(T::one(), T::zero()); n];
        let x = solve_complex(&mut a, &mut rhs)?;
        let bx = rk
            .weights
            .iter()
            .zip(&x)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&b, &xi)| {
                acc + xi * b
            });
        Ok(Complex::new(T::one(), T::zero()) + z * bx)
    }
}

/// Gaussian elimination with partial pivoting; consumes `a` and `b`.
fn solve_complex<T: Scalar>(
    a: &mut [Vec<Complex<T>>],
    b: &mut [Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(T::zero(), |acc, v| acc.max(v.norm()));
    let threshold = scale * T::epsilon() * T::from_usize_lossy(n.max(1));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .norm()
                    .partial_cmp(&a[r2][col].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if !(a[pivot][col].norm() > threshold) {
            return Err(HbvmError::Singular);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[row][c] = a[row][c] - factor * v;
            }
            let v = b[col];
            b[row] = b[row] - factor * v;
        }
    }
    let mut x = vec![Complex::new(T::zero(), T::zero()); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc = acc - a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn midpoint_ingredients() {
        let t = build_tableau::<f64>(1, 1).unwrap();
        assert_eq!(t.nodes(), &[0.5]);
        assert_eq!(t.integrated_basis, vec![vec![0.5]]);
        assert_eq!(t.basis_at_nodes, vec![vec![1.0]]);
        let rk = t.as_runge_kutta();
        assert_eq!(rk.matrix, vec![vec![0.5]]);
        assert_eq!(rk.weights, vec![1.0]);
    }

    #[test]
    fn two_two_entries() {
        let t = build_tableau::<f64>(2, 2).unwrap();
        let c1 = 0.5 - 3f64.sqrt() / 6.0;
        assert_abs_diff_eq!(t.integrated_basis[0][0], c1, epsilon = 1e-15);
        let closed = 3f64.sqrt() * (c1 * c1 - c1);
        assert_abs_diff_eq!(t.integrated_basis[0][1], closed, epsilon = 1e-15);

        let rk = t.as_runge_kutta();
        let r = 3f64.sqrt() / 6.0;
        let expected = [[0.25, 0.25 - r], [0.25 + r, 0.25]];
        for i in 0..2 {
            for l in 0..2 {
                assert_abs_diff_eq!(rk.matrix[i][l], expected[i][l], epsilon = 1e-15);
            }
            assert_abs_diff_eq!(rk.weights[i], 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn four_two_basis_column() {
        let t = build_tableau::<f64>(4, 2).unwrap();
        let rule = gauss_rule::<f64>(4).unwrap();
        for l in 0..4 {
            assert_abs_diff_eq!(
                t.basis_at_nodes[l][1],
                3f64.sqrt() * (2.0 * rule.nodes[l] - 1.0),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn invalid_pairs() {
        assert!(matches!(
            build_tableau::<f64>(2, 3),
            Err(HbvmError::Argument(_))
        ));
        assert!(matches!(
            build_tableau::<f64>(2, 0),
            Err(HbvmError::Argument(_))
        ));
    }

    #[test]
    fn silent_stage_rule() {
        assert_eq!(min_silent_k(3, 2), 3);
        assert_eq!(min_silent_k(5, 2), 5);
        assert_eq!(min_silent_k(5, 3), 8);
        assert_eq!(min_silent_k(5, 4), 10);
        assert_eq!(min_silent_k(5, 5), 13);
        for s in 1..10 {
            assert_eq!(min_silent_k(2, s), s);
            assert_eq!(min_silent_k(1, s), s);
        }
    }

    #[test]
    fn row_sums_and_end_integrals() {
        for s in 1..=5 {
            for k in s..=20 {
                let t = build_tableau::<f64>(k, s).unwrap();
                assert_abs_diff_eq!(t.end_integrals[0], 1.0, epsilon = 1e-14);
                for j in 1..s {
                    assert_abs_diff_eq!(t.end_integrals[j], 0.0, epsilon = 1e-14);
                }
                let rk = t.as_runge_kutta();
                for i in 0..k {
                    assert_abs_diff_eq!(t.integrated_basis[i][0], t.nodes()[i], epsilon = 1e-14);
                    let sum: f64 = rk.matrix[i].iter().sum();
                    assert_abs_diff_eq!(sum, t.nodes()[i], epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn stability_function() {
        let t = build_tableau::<f64>(1, 1).unwrap();
        let r0 = t.stability_value(Complex::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(r0.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r0.im, 0.0, epsilon = 1e-15);
        for z in [
            Complex::new(-1.3, 0.4),
            Complex::new(0.7, -2.0),
            Complex::new(0.0, 3.0),
        ] {
            let expected = (Complex::new(1.0, 0.0) + z / 2.0) / (Complex::new(1.0, 0.0) - z / 2.0);
            let got = t.stability_value(z).unwrap();
            assert_abs_diff_eq!((got - expected).norm(), 0.0, epsilon = 1e-14);
        }
        // midpoint: I - zM singular at z = 2
        assert!(matches!(
            t.stability_value(Complex::new(2.0, 0.0)),
            Err(HbvmError::Singular)
        ));
    }

    #[test]
    fn unit_modulus_on_imaginary_axis() {
        for (k, s) in [(1, 1), (2, 2), (4, 2), (8, 3), (13, 5)] {
            let t = build_tableau::<f64>(k, s).unwrap();
            for y in [0.1, 1.0, 10.0] {
                let r = t.stability_value(Complex::new(0.0, y)).unwrap();
                assert_abs_diff_eq!(r.norm(), 1.0, epsilon = 1e-12);
            }
            // A-stable: bounded by one in the left half-plane
            for z in [
                Complex::new(-0.5, 2.0),
                Complex::new(-10.0, 0.0),
                Complex::new(-3.0, -7.0),
            ] {
                assert!(t.stability_value(z).unwrap().norm() <= 1.0 + 1e-12);
            }
        }
    }
}
