//! Canonical Hamiltonian systems `ẏ = J ∇H(y)` with `y = (q_1..q_m, p_1..p_m)`.

use crate::error::{HbvmError, Result};
use crate::scalar::{max_norm, Scalar};

/// A Hamiltonian system with `m` degrees of freedom (state dimension `2m`).
pub trait HamiltonianSystem<T: Scalar> {
    /// Number of degrees of freedom `m`.
    fn dof(&self) -> usize;

    fn dim(&self) -> usize {
        2 * self.dof()
    }

    fn hamiltonian(&self, y: &[T]) -> T;

    /// Writes `∇H(y)` ordered `[∂H/∂q; ∂H/∂p]` into `grad`.
    fn gradient(&self, y: &[T], grad: &mut [T]) -> Result<()>;

    /// Total degree of `H` when it is a polynomial.
    fn poly_degree(&self) -> Option<usize> {
        None
    }

    /// Names of the quantities conserved by the exact flow.
    fn invariant_names(&self) -> Vec<&'static str> {
        vec!["hamiltonian"]
    }

    fn invariant(&self, name: &str, y: &[T]) -> Option<T> {
        (name == "hamiltonian").then(|| self.hamiltonian(y))
    }
}

impl<T: Scalar, S: HamiltonianSystem<T> + ?Sized> HamiltonianSystem<T> for Box<S> {
    fn dof(&self) -> usize {
        (**self).dof()
    }
    fn hamiltonian(&self, y: &[T]) -> T {
        (**self).hamiltonian(y)
    }
    fn gradient(&self, y: &[T], grad: &mut [T]) -> Result<()> {
        (**self).gradient(y, grad)
    }
    fn poly_degree(&self) -> Option<usize> {
        (**self).poly_degree()
    }
    fn invariant_names(&self) -> Vec<&'static str> {
        (**self).invariant_names()
    }
    fn invariant(&self, name: &str, y: &[T]) -> Option<T> {
        (**self).invariant(name, y)
    }
}

/// `out = J g` where `J = [[0, I], [-I, 0]]`.
pub(crate) fn apply_symplectic_into<T: Scalar>(g: &[T], out: &mut [T]) {
    let m = g.len() / 2;
    for i in 0..m {
        out[i] = g[m + i];
        out[m + i] = -g[i];
    }
}

/// Applies the canonical symplectic matrix `J` to an even-length vector.
pub fn apply_symplectic<T: Scalar>(g: &[T]) -> Result<Vec<T>> {
    if !g.len().is_multiple_of(2) {
        return Err(HbvmError::Dimension {
            expected: g.len() + 1,
            found: g.len(),
        });
    }
    let mut out = vec![T::zero(); g.len()];
    apply_symplectic_into(g, &mut out);
    Ok(out)
}

/// The vector field `J ∇H(y)`.
pub fn vector_field<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    y: &[T],
) -> Result<Vec<T>> {
    let mut grad = vec![T::zero(); y.len()];
    sys.gradient(y, &mut grad)?;
    apply_symplectic(&grad)
}

/// Largest mismatch between `∇H(y)` and central differences of `H` with the
/// given step, relative to `max(‖∇H(y)‖∞, 1)`.
pub fn gradient_mismatch<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    y: &[T],
    step: T,
) -> Result<T> {
    let mut grad = vec![T::zero(); y.len()];
    sys.gradient(y, &mut grad)?;
    let mut probe = y.to_vec();
    let mut worst = T::zero();
    for i in 0..y.len() {
        probe[i] = y[i] + step;
        let up = sys.hamiltonian(&probe);
        probe[i] = y[i] - step;
        let down = sys.hamiltonian(&probe);
        probe[i] = y[i];
        let fd = (up - down) / (step + step);
        worst = worst.max((fd - grad[i]).abs());
    }
    Ok(worst / max_norm(&grad).max(T::one()))
}
