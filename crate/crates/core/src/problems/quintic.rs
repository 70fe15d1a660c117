//! Planar quintic Hamiltonian `H = A(p) + B(p) q + C(p) q² + D(p) q³` with
//!
//! ```text
//! A = p²(½ + c3 p + b3 p² + a3 p³)    B = p²(c2 + b2 p + a2 p²)
//! C = ½ + c1 p + b1 p² + a1 p³        D = c0 + b0 p + a0 p²
//! ```
//!
//! The state is ordered `(q, p)` as everywhere else in the crate. With the
//! reference coefficients the equilibria `QUINTIC_P1`, `QUINTIC_P2` are
//! critical points of `H` only when read as `(q, p)` pairs, and
//! `H(0, 0.3757055929263451) = H*` places the annulus boundary point on the
//! momentum axis.

use crate::error::{HbvmError, Result};
use crate::scalar::Scalar;
use crate::system::HamiltonianSystem;

/// Saddle `(q, p)` on the boundary of the period annulus of the origin.
pub const QUINTIC_P1: [f64; 2] = [-6.879_526_475_540_134e-1, -5.206_527_058_470_621e-1];
/// Second real saddle `(q, p)`.
pub const QUINTIC_P2: [f64; 2] = [-1.179_582_379_893_681, 1.756_351_969_248_087];
/// `H(P1)`, the energy of the period-annulus boundary.
pub const HSTAR: f64 = 9.050_199_350_868_576e-2;

pub fn hstar_reference() -> f64 {
    HSTAR
}

/// Coefficients `a0..a3`, `b0..b3`, `c0..c3`, each array indexed by subscript.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticCoefficients<T> {
    pub a: [T; 4],
    pub b: [T; 4],
    pub c: [T; 4],
}

impl<T: Scalar> QuinticCoefficients<T> {
    /// `a2 = b1 = b3 = c1 = c2 = 1`, all others zero.
    pub fn reference() -> Self {
        let (o, l) = (T::zero(), T::one());
        Self {
            a: [o, o, l, o],
            b: [o, l, o, l],
            c: [o, l, l, o],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticSystem<T> {
    coeffs: QuinticCoefficients<T>,
}

pub fn quintic_system<T: Scalar>(coeffs: QuinticCoefficients<T>) -> Result<QuinticSystem<T>> {
    if coeffs.a.iter().all(|v| *v == T::zero()) {
        return Err(HbvmError::Argument(
            "a0..a3 all vanish; H would have degree below five".into(),
        ));
    }
    Ok(QuinticSystem { coeffs })
}

impl<T: Scalar> QuinticSystem<T> {
    pub fn coefficients(&self) -> &QuinticCoefficients<T> {
        &self.coeffs
    }

    /// `(A, B, C, D)` and their derivatives in `p`.
    fn parts(&self, p: T) -> ([T; 4], [T; 4]) {
        let QuinticCoefficients { a, b, c } = self.coeffs;
        let half = T::lit(0.5);
        let (two, three, four, five) = (T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(5.0));
        let p2 = p * p;
        let cap_a = p2 * (half + c[3] * p + b[3] * p2 + a[3] * p2 * p);
        let cap_b = p2 * (c[2] + b[2] * p + a[2] * p2);
        let cap_c = half + c[1] * p + b[1] * p2 + a[1] * p2 * p;
        let cap_d = c[0] + b[0] * p + a[0] * p2;
        let da = p + three * c[3] * p2 + four * b[3] * p2 * p + five * a[3] * p2 * p2;
        let db = two * c[2] * p + three * b[2] * p2 + four * a[2] * p2 * p;
        let dc = c[1] + two * b[1] * p + three * a[1] * p2;
        let dd = b[0] + two * a[0] * p;
        ([cap_a, cap_b, cap_c, cap_d], [da, db, dc, dd])
    }
}

impl<T: Scalar> HamiltonianSystem<T> for QuinticSystem<T> {
    fn dof(&self) -> usize {
        1
    }

    fn hamiltonian(&self, y: &[T]) -> T {
        let (q, p) = (y[0], y[1]);
        let ([a, b, c, d], _) = self.parts(p);
        a + q * (b + q * (c + q * d))
    }

    fn gradient(&self, y: &[T], grad: &mut [T]) -> Result<()> {
        let (q, p) = (y[0], y[1]);
        let ([_, b, c, d], [da, db, dc, dd]) = self.parts(p);
        let (two, three) = (T::lit(2.0), T::lit(3.0));
        grad[0] = b + q * (two * c + three * q * d);
        grad[1] = da + q * (db + q * (dc + q * dd));
        Ok(())
    }

    fn poly_degree(&self) -> Option<usize> {
        Some(5)
    }
}
