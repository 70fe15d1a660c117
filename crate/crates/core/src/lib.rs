//! Hamiltonian Boundary Value Methods HBVM(k, s).
//!
//! One-step integrators for canonical Hamiltonian systems `ẏ = J∇H(y)` that
//! follow a degree-`s` polynomial path and evaluate the vector field at `k ≥ s`
//! Gauss-Legendre nodes. They have order `2s`, are symmetric and perfectly
//! A-stable, reduce to `s`-stage Gauss collocation for `k = s`, and conserve a
//! polynomial Hamiltonian of degree `ν` exactly once `k ≥ νs/2`. The extra
//! `k − s` "silent" nodes do not enlarge the nonlinear system, which always
//! has block size `s`.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.
//!
//! ```
//! use hbvm::{build_tableau, integrate, problems::henon_heiles_system, SolverConfig};
//!
//! let sys = henon_heiles_system();
//! let tab = build_tableau::<f64>(4, 2).unwrap();
//! let y0 = [0.0, 0.2, 0.3, 0.4];
//! let traj = integrate(&sys, &y0, 1.0, 10, &tab, &SolverConfig::default()).unwrap();
//! assert_eq!(traj.states.len(), 11);
//! ```

pub mod annulus;
pub mod error;
pub mod legendre;
pub mod problems;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod system;
pub mod tableau;

pub use annulus::{
    bisect_boundary, orbit_escapes, segment_point, BisectionResult, EscapeCriterion, ProbeOutcome,
    ProbeParams, ProbeRecord,
};
pub use error::{HbvmError, Result};
pub use legendre::{eval_basis, eval_basis_integral, tabulate_basis, BasisValueTable};
pub use quadrature::{gauss_rule, QuadratureRule};
pub use scalar::Scalar;
pub use solver::{
    integrate, solve_stages, step, IntegrationFailure, SolverConfig, StageCoefficients, Trajectory,
};
pub use system::{apply_symplectic, gradient_mismatch, vector_field, HamiltonianSystem};
pub use tableau::{build_tableau, min_silent_k, HbvmTableau, RungeKuttaForm};

pub type Tableau = HbvmTableau<f64>;
pub type Rule = QuadratureRule<f64>;
pub type BasisTable = BasisValueTable<f64>;
pub type Config = SolverConfig<f64>;
pub type Stages = StageCoefficients<f64>;
pub type Path = Trajectory<f64>;
pub type RkForm = RungeKuttaForm<f64>;
pub type Bisection = BisectionResult<f64>;
pub type Escape = EscapeCriterion<f64>;
pub type Probe = ProbeParams<f64>;
