//! Gravitational N-body problem in three dimensions.
//!
//! State layout: `(q_1, …, q_N, p_1, …, p_N)` with each `q_i`, `p_i` in R³.

use crate::error::{HbvmError, Result};
use crate::scalar::Scalar;
use crate::system::HamiltonianSystem;

/// Pair distances below this abort the gradient evaluation.
pub const COLLISION_DISTANCE: f64 = 1e-12;

/// Eccentricity of the primaries' orbits the Sitnikov initial state encodes.
pub const SITNIKOV_ECCENTRICITY: f64 = 0.75;
/// Distance between the primaries at apocentre.
pub const SITNIKOV_APOCENTRE_DISTANCE: f64 = 5.0;
/// Initial speed of the planetoid along the z-axis.
pub const SITNIKOV_PLANETOID_VELOCITY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct NBodyConfig<T> {
    pub g: T,
    pub masses: Vec<T>,
}

impl<T: Scalar> NBodyConfig<T> {
    pub fn bodies(&self) -> usize {
        self.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.masses.len() < 2 {
            return Err(HbvmError::Argument("need at least two bodies".into()));
        }
        if self.masses.iter().any(|m| !(*m > T::zero())) {
            return Err(HbvmError::Argument("masses must be positive".into()));
        }
        Ok(())
    }
}

/// Three bodies, `G = 1`, masses `(1, 1, 1e-5)`.
pub fn sitnikov_config<T: Scalar>() -> NBodyConfig<T> {
    NBodyConfig {
        g: T::one(),
        masses: vec![T::one(), T::one(), T::lit(1e-5)],
    }
}

/// Primaries at apocentre on the x-axis moving in the (x, y)-plane, planetoid
/// just above the origin moving along z.
///
/// The primaries have unit mass, so their momenta equal their velocities
/// `∓√10/20`. The planetoid's `1/2` is a velocity: its momentum is
/// `m_3 · 1/2 = 5e-6`, which keeps it bound (escape speed at the origin is
/// about 1.26).
pub fn sitnikov_initial_state<T: Scalar>() -> Vec<T> {
    let cfg = sitnikov_config::<T>();
    let v = T::lit(10.0).sqrt() / T::lit(20.0);
    let o = T::zero();
    let half_d = T::lit(SITNIKOV_APOCENTRE_DISTANCE / 2.0);
    let pz = cfg.masses[2] * T::lit(SITNIKOV_PLANETOID_VELOCITY);
    vec![
        -half_d,
        o,
        o,
        half_d,
        o,
        o,
        o,
        o,
        T::lit(1e-9), //
        o,
        -v,
        o,
        o,
        v,
        o,
        o,
        o,
        pz,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct NBodySystem<T> {
    cfg: NBodyConfig<T>,
}

impl<T: Scalar> NBodySystem<T> {
    pub fn new(cfg: NBodyConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &NBodyConfig<T> {
        &self.cfg
    }

    fn position(y: &[T], i: usize) -> [T; 3] {
        [y[3 * i], y[3 * i + 1], y[3 * i + 2]]
    }

    fn momentum(&self, y: &[T], i: usize) -> [T; 3] {
        let off = 3 * self.cfg.bodies();
        [y[off + 3 * i], y[off + 3 * i + 1], y[off + 3 * i + 2]]
    }

    /// Total angular momentum `Σ q_i × p_i`.
    pub fn angular_momentum(&self, y: &[T]) -> [T; 3] {
        let mut total = [T::zero(); 3];
        for i in 0..self.cfg.bodies() {
            let q = Self::position(y, i);
            let p = self.momentum(y, i);
            total[0] = total[0] + q[1] * p[2] - q[2] * p[1];
            total[1] = total[1] + q[2] * p[0] - q[0] * p[2];
            total[2] = total[2] + q[0] * p[1] - q[1] * p[0];
        }
        total
    }

    /// Total linear momentum `Σ p_i`.
    pub fn linear_momentum(&self, y: &[T]) -> [T; 3] {
        let mut total = [T::zero(); 3];
        for i in 0..self.cfg.bodies() {
            let p = self.momentum(y, i);
            for d in 0..3 {
                total[d] = total[d] + p[d];
            }
        }
        total
    }
}

fn norm3<T: Scalar>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn nbody_system<T: Scalar>(cfg: NBodyConfig<T>) -> Result<NBodySystem<T>> {
    NBodySystem::new(cfg)
}

impl<T: Scalar> HamiltonianSystem<T> for NBodySystem<T> {
    fn dof(&self) -> usize {
        3 * self.cfg.bodies()
    }

    fn hamiltonian(&self, y: &[T]) -> T {
        let n = self.cfg.bodies();
        let m = &self.cfg.masses;
        let mut kinetic = T::zero();
        for i in 0..n {
            let p = self.momentum(y, i);
            kinetic = kinetic + (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / m[i];
        }
        let mut potential = T::zero();
        for i in 0..n {
            let qi = Self::position(y, i);
            for j in 0..i {
                let qj = Self::position(y, j);
                let r = norm3([qi[0] - qj[0], qi[1] - qj[1], qi[2] - qj[2]]);
                potential = potential + m[i] * m[j] / r;
            }
        }
        kinetic / T::lit(2.0) - self.cfg.g * potential
    }

    fn gradient(&self, y: &[T], grad: &mut [T]) -> Result<()> {
        let n = self.cfg.bodies();
        let m = &self.cfg.masses;
        let off = 3 * n;
        grad[..off].iter_mut().for_each(|v| *v = T::zero());
        for i in 0..n {
            let qi = Self::position(y, i);
            for j in 0..i {
                let qj = Self::position(y, j);
                let d = [qi[0] - qj[0], qi[1] - qj[1], qi[2] - qj[2]];
                let r = norm3(d);
                if !(r >= T::lit(COLLISION_DISTANCE)) {
                    return Err(HbvmError::EvaluationFailure(format!(
                        "bodies {j} and {i} collide (distance {r:e})"
                    )));
                }
                let f = self.cfg.g * m[i] * m[j] / (r * r * r);
                for c in 0..3 {
                    grad[3 * i + c] = grad[3 * i + c] + f * d[c];
                    grad[3 * j + c] = grad[3 * j + c] - f * d[c];
                }
            }
            for c in 0..3 {
                grad[off + 3 * i + c] = y[off + 3 * i + c] / m[i];
            }
        }
        Ok(())
    }

    fn invariant_names(&self) -> Vec<&'static str> {
        vec!["hamiltonian", "angular_momentum_norm"]
    }

    fn invariant(&self, name: &str, y: &[T]) -> Option<T> {
        match name {
            "hamiltonian" => Some(self.hamiltonian(y)),
            "angular_momentum_norm" => Some(norm3(self.angular_momentum(y))),
            _ => None,
        }
    }
}
