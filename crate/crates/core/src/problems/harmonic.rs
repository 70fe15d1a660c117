use crate::error::Result;
use crate::scalar::Scalar;
use crate::system::HamiltonianSystem;

/// `H = ½ Σ (q_i² + p_i²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicOscillator {
    pub dof: usize,
}

impl Default for HarmonicOscillator {
    fn default() -> Self {
        Self { dof: 1 }
    }
}

impl<T: Scalar> HamiltonianSystem<T> for HarmonicOscillator {
    fn dof(&self) -> usize {
        self.dof
    }

    fn hamiltonian(&self, y: &[T]) -> T {
        y.iter().fold(T::zero(), |acc, &v| acc + v * v) / T::lit(2.0)
    }

    fn gradient(&self, y: &[T], grad: &mut [T]) -> Result<()> {
        grad.copy_from_slice(y);
        Ok(())
    }

    fn poly_degree(&self) -> Option<usize> {
        Some(2)
    }
}
