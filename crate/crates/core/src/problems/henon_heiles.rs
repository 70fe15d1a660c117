use crate::error::Result;
use crate::scalar::Scalar;
use crate::system::HamiltonianSystem;

/// Energy below which orbits starting inside the saddle triangle stay there.
pub const HENON_HEILES_ENERGY_BOUND: f64 = 1.0 / 6.0;

/// Saddle points of the potential; vertices of the equilateral triangle.
pub const HENON_HEILES_SADDLES: [[f64; 2]; 3] = [
    [0.0, 1.0],
    [-0.866_025_403_784_438_6, -0.5],
    [0.866_025_403_784_438_6, -0.5],
];

/// `H = ½(p₁² + p₂²) + U(q)`, `U = ½(q₁² + q₂²) + q₁²q₂ − q₂³/3`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HenonHeiles;

pub fn henon_heiles_system() -> HenonHeiles {
    HenonHeiles
}

impl HenonHeiles {
    pub fn potential<T: Scalar>(q1: T, q2: T) -> T {
        let half = T::lit(0.5);
        half * (q1 * q1 + q2 * q2) + q1 * q1 * q2 - q2 * q2 * q2 / T::lit(3.0)
    }

    /// Whether `(q1, q2)` lies strictly inside the triangle spanned by the saddles.
    pub fn inside_triangle<T: Scalar>(q1: T, q2: T) -> bool {
        let v = HENON_HEILES_SADDLES.map(|p| p.map(T::lit));
        let edge = |a: [T; 2], b: [T; 2]| (b[0] - a[0]) * (q2 - a[1]) - (b[1] - a[1]) * (q1 - a[0]);
        let d1 = edge(v[0], v[1]);
        let d2 = edge(v[1], v[2]);
        let d3 = edge(v[2], v[0]);
        (d1 > T::zero() && d2 > T::zero() && d3 > T::zero())
            || (d1 < T::zero() && d2 < T::zero() && d3 < T::zero())
    }
}

/// Starting state `q = (q1, q2)`, `p = (p1, p2)` with `p2 >= 0` chosen so that
/// `H = energy`. Returns `None` when the energy is unreachable.
pub fn henon_heiles_initial_state<T: Scalar>(q1: T, q2: T, p1: T, energy: T) -> Option<Vec<T>> {
    let rest = HenonHeiles::potential(q1, q2) + p1 * p1 / T::lit(2.0);
    let p2_sq = T::lit(2.0) * (energy - rest);
    (p2_sq >= T::zero()).then(|| vec![q1, q2, p1, p2_sq.sqrt()])
}

impl<T: Scalar> HamiltonianSystem<T> for HenonHeiles {
    fn dof(&self) -> usize {
        2
    }

    fn hamiltonian(&self, y: &[T]) -> T {
        (y[2] * y[2] + y[3] * y[3]) / T::lit(2.0) + Self::potential(y[0], y[1])
    }

    fn gradient(&self, y: &[T], grad: &mut [T]) -> Result<()> {
        let (q1, q2) = (y[0], y[1]);
        let two = T::lit(2.0);
        grad[0] = q1 + two * q1 * q2;
        grad[1] = q2 + q1 * q1 - q2 * q2;
        grad[2] = y[2];
        grad[3] = y[3];
        Ok(())
    }

    fn poly_degree(&self) -> Option<usize> {
        Some(3)
    }
}
