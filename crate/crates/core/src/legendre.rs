//! Orthonormal shifted Legendre basis on `[0, 1]`.
//!
//! Indices follow the 1-based convention: `P_1 ≡ 1`, and `P_j` has degree
//! `j - 1`, unit L² norm on `[0, 1]` and positive leading coefficient, i.e.
//! `P_j(x) = sqrt(2j - 1) · L_{j-1}(2x - 1)` with `L_n` the Legendre
//! polynomial on `[-1, 1]`. Tables store rows 0-based (row `j - 1` is `P_j`).

use crate::error::{HbvmError, Result};
use crate::scalar::Scalar;

/// Points this far outside `[0, 1]` are clamped instead of rejected.
pub const DOMAIN_SLACK: f64 = 1e-12;

fn check_point<T: Scalar>(x: T) -> Result<T> {
    let slack = T::lit(DOMAIN_SLACK);
    if !(x >= -slack && x <= T::one() + slack) {
        return Err(HbvmError::Domain(format!("point {x} outside [0, 1]")));
    }
    Ok(x.max(T::zero()).min(T::one()))
}

fn check_index(j: usize) -> Result<()> {
    if j < 1 {
        return Err(HbvmError::Domain("basis index must be >= 1".into()));
    }
    Ok(())
}

/// Fills `out[n] = L_n(t)` for `n = 0..out.len()` with the three-term recurrence.
pub(crate) fn legendre_sequence<T: Scalar>(t: T, out: &mut [T]) {
    if out.is_empty() {
        return;
    }
    out[0] = T::one();
    if out.len() == 1 {
        return;
    }
    out[1] = t;
    for n in 1..out.len() - 1 {
        let nf = T::from_usize_lossy(n);
        let two_n_plus_one = T::from_usize_lossy(2 * n + 1);
        out[n + 1] = (two_n_plus_one * t * out[n] - nf * out[n - 1]) / (nf + T::one());
    }
}

/// `L_n(t)` and `L_{n-1}(t)` (the latter is zero for `n = 0`).
pub(crate) fn legendre_pair<T: Scalar>(n: usize, t: T) -> (T, T) {
    let mut prev = T::zero();
    let mut cur = T::one();
    for m in 0..n {
        let mf = T::from_usize_lossy(m);
        let next = (T::from_usize_lossy(2 * m + 1) * t * cur - mf * prev) / (mf + T::one());
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Fills `vals[n] = L_n(t)` and `ders[n] = L_n'(t)` using
/// `L'_{n+1} = t L'_n + (n + 1) L_n`.
pub(crate) fn legendre_with_derivative<T: Scalar>(t: T, vals: &mut [T], ders: &mut [T]) {
    legendre_sequence(t, vals);
    if ders.is_empty() {
        return;
    }
    ders[0] = T::zero();
    for n in 0..ders.len() - 1 {
        ders[n + 1] = t * ders[n] + T::from_usize_lossy(n + 1) * vals[n];
    }
}

/// `∫_0^c P_{n+1}` for `n >= 1` from `∫_{-1}^t L_n = (t² - 1) L_n'(t) / (n(n + 1))`
/// with `t² - 1 = 4c(c - 1)`; no cancellation near either end point.
#[inline]
fn integral_from_derivative<T: Scalar>(n: usize, c: T, der: T) -> T {
    let scale = T::lit(2.0) * norm_factor::<T>(n) / T::from_usize_lossy(n * (n + 1));
    scale * c * (c - T::one()) * der
}

#[inline]
fn norm_factor<T: Scalar>(n: usize) -> T {
    T::from_usize_lossy(2 * n + 1).sqrt()
}

/// Value of the basis polynomial `P_j` at `x ∈ [0, 1]`.
pub fn eval_basis<T: Scalar>(j: usize, x: T) -> Result<T> {
    check_index(j)?;
    let x = check_point(x)?;
    let n = j - 1;
    let t = x + x - T::one();
    let (l, _) = legendre_pair(n, t);
    Ok(norm_factor::<T>(n) * l)
}

/// `∫_0^c P_j(x) dx`, evaluated in closed form. Vanishes exactly at `c = 0`,
/// and at `c = 1` for `j >= 2`.
pub fn eval_basis_integral<T: Scalar>(j: usize, c: T) -> Result<T> {
    check_index(j)?;
    let c = check_point(c)?;
    let n = j - 1;
    if n == 0 {
        return Ok(c);
    }
    let t = c + c - T::one();
    let mut vals = vec![T::zero(); n + 1];
    let mut ders = vec![T::zero(); n + 1];
    legendre_with_derivative(t, &mut vals, &mut ders);
    Ok(integral_from_derivative(n, c, ders[n]))
}

/// Basis values and running integrals of `P_1..P_s` at a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValueTable<T> {
    pub s: usize,
    pub points: Vec<T>,
    /// `values[j - 1][l] = P_j(points[l])`.
    pub values: Vec<Vec<T>>,
    /// `integrals[j - 1][l] = ∫_0^{points[l]} P_j`.
    pub integrals: Vec<Vec<T>>,
}

impl<T: Scalar> BasisValueTable<T> {
    /// `P_j(points[l])` with 1-based `j`.
    pub fn value(&self, j: usize, l: usize) -> T {
        self.values[j - 1][l]
    }

    /// `∫_0^{points[l]} P_j` with 1-based `j`.
    pub fn integral(&self, j: usize, l: usize) -> T {
        self.integrals[j - 1][l]
    }
}

/// Tabulates `P_1..P_s` and their integrals from zero at every point.
pub fn tabulate_basis<T: Scalar>(s: usize, points: &[T]) -> Result<BasisValueTable<T>> {
    if s < 1 {
        return Err(HbvmError::Domain("basis size must be >= 1".into()));
    }
    let mut values = vec![vec![T::zero(); points.len()]; s];
    let mut integrals = vec![vec![T::zero(); points.len()]; s];
    let mut vals = vec![T::zero(); s];
    let mut ders = vec![T::zero(); s];
    let mut clamped = Vec::with_capacity(points.len());
    for (l, &x) in points.iter().enumerate() {
        let x = check_point(x)?;
        clamped.push(x);
        let t = x + x - T::one();
        legendre_with_derivative(t, &mut vals, &mut ders);
        for n in 0..s {
            values[n][l] = norm_factor::<T>(n) * vals[n];
            integrals[n][l] = if n == 0 {
                x
            } else {
                integral_from_derivative(n, x, ders[n])
            };
        }
    }
    Ok(BasisValueTable {
        s,
        points: clamped,
        values,
        integrals,
    })
}
