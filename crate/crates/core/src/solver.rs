//! Stage solve, single step and fixed-stepsize integration.
//!
//! The unknowns are the `s` vector coefficients `γ_j` of the polynomial path
//! `σ(t_0 + ch) = y_0 + h Σ_j γ_j ∫_0^c P_j`, so the nonlinear system has
//! block size `s` regardless of `k`. It is solved by fixed-point iteration
//!
//! ```text
//! γ_j ← Σ_l ω_l P_j(c_l) J∇H(y_0 + h Σ_i a_li γ_i),   j = 1..s,
//! ```
//!
//! started from `γ_1 = J∇H(y_0)`, `γ_j = 0` otherwise. Since `∫_0^1 P_j = δ_j1`
//! the new point is `y_1 = y_0 + h γ_1`.

use std::fmt;

use crate::error::{HbvmError, Result};
use crate::scalar::{max_norm, Scalar};
use crate::system::{apply_symplectic_into, HamiltonianSystem};
use crate::tableau::HbvmTableau;

/// Stopping rule of the stage iteration. The solve counts as converged once
/// `‖Δγ‖∞ ≤ abs_tol + rel_tol·‖γ‖∞`; after that it keeps iterating (within
/// `max_iterations`) until the update is at rounding level or has stopped
/// improving for three iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_iterations: usize,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        // 1e-14 is below f32 resolution; fall back to a few ulps there
        let floor = T::epsilon() * T::lit(8.0);
        Self {
            abs_tol: T::lit(1e-14).max(floor),
            rel_tol: T::lit(1e-14).max(floor),
            max_iterations: 100,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero() && self.rel_tol > T::zero()) {
            return Err(HbvmError::Argument(
                "solver tolerances must be positive".into(),
            ));
        }
        if self.max_iterations < 1 {
            return Err(HbvmError::Argument("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Converged coefficients `γ_1..γ_s`, each of the state dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StageCoefficients<T> {
    pub gamma: Vec<Vec<T>>,
    pub iterations: usize,
}

/// Fixed-stepsize trajectory: `states[n]` approximates `y(t0 + n h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub t0: T,
    pub h: T,
    pub states: Vec<Vec<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn step_count(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn time(&self, n: usize) -> T {
        self.t0 + self.h * T::from_usize_lossy(n)
    }

    pub fn last(&self) -> &[T] {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Integration aborted at `step`; `partial` holds the states computed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationFailure<T> {
    pub step: usize,
    pub error: HbvmError,
    pub partial: Trajectory<T>,
}

impl<T> fmt::Display for IntegrationFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} failed: {}", self.step, self.error)
    }
}

impl<T: fmt::Debug> std::error::Error for IntegrationFailure<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

fn check_inputs<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    y0: &[T],
    cfg: &SolverConfig<T>,
) -> Result<()> {
    if y0.len() != sys.dim() {
        return Err(HbvmError::Dimension {
            expected: sys.dim(),
            found: y0.len(),
        });
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(HbvmError::EvaluationFailure(
            "non-finite initial state".into(),
        ));
    }
    cfg.validate()
}

/// Evaluates `J∇H(y)` into `out`; `Ok(false)` when the gradient is not finite.
fn eval_field<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    y: &[T],
    grad: &mut [T],
    out: &mut [T],
) -> Result<bool> {
    sys.gradient(y, grad)?;
    if grad.iter().any(|g| !g.is_finite()) {
        return Ok(false);
    }
    apply_symplectic_into(grad, out);
    Ok(true)
}

/// Solves the HBVM stage equations for one step of size `h` from `y0`.
///
/// Non-finite stage states or gradients that appear while iterating mean the
/// iteration diverged and are reported as [`HbvmError::NonConvergence`]. A
/// gradient that fails outright (e.g. a collision), or is non-finite at `y0`
/// itself, is an [`HbvmError::EvaluationFailure`].
pub fn solve_stages<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    y0: &[T],
    h: T,
    tab: &HbvmTableau<T>,
    cfg: &SolverConfig<T>,
) -> Result<StageCoefficients<T>> {
    check_inputs(sys, y0, cfg)?;
    let n = y0.len();
    let (k, s) = (tab.k, tab.s);
    let weights = tab.weights();

    let mut grad = vec![T::zero(); n];
    let mut field = vec![T::zero(); n];
    let mut stage = vec![T::zero(); n];

    let mut gamma = vec![vec![T::zero(); n]; s];
    if !eval_field(sys, y0, &mut grad, &mut gamma[0])? {
        return Err(HbvmError::EvaluationFailure(
            "gradient is not finite at the initial state".into(),
        ));
    }
    let mut next = vec![vec![T::zero(); n]; s];

    let diverged = |iterations| HbvmError::NonConvergence {
        iterations,
        residual: f64::INFINITY,
    };
    let floor_factor = T::epsilon() * T::lit(4.0);
    let mut best = T::infinity();
    let mut stalled = 0;
    let mut converged = false;
    let mut last = T::infinity();
    for iteration in 1..=cfg.max_iterations {
        next.iter_mut()
            .for_each(|g| g.iter_mut().for_each(|v| *v = T::zero()));
        for l in 0..k {
            let a = &tab.integrated_basis[l];
            for d in 0..n {
                let mut acc = T::zero();
                for i in 0..s {
                    acc = acc + a[i] * gamma[i][d];
                }
                stage[d] = y0[d] + h * acc;
            }
            if stage.iter().any(|v| !v.is_finite()) {
                return Err(diverged(iteration));
            }
            if !eval_field(sys, &stage, &mut grad, &mut field)? {
                return Err(diverged(iteration));
            }
            let p = &tab.basis_at_nodes[l];
            for j in 0..s {
                let coef = weights[l] * p[j];
                for d in 0..n {
                    next[j][d] = next[j][d] + coef * field[d];
                }
            }
        }
        let mut update = T::zero();
        let mut size = T::zero();
        for (new, old) in next.iter().zip(&gamma) {
            for (a, b) in new.iter().zip(old) {
                update = update.max((*a - *b).abs());
            }
            size = size.max(max_norm(new));
        }
        if !update.is_finite() {
            return Err(diverged(iteration));
        }
        std::mem::swap(&mut gamma, &mut next);
        last = update;
        converged = converged || update <= cfg.abs_tol + cfg.rel_tol * size;
        if update < best {
            best = update;
            stalled = 0;
        } else {
            stalled += 1;
        }
        // past the tolerance, polish until rounding noise dominates
        if converged && (update <= floor_factor * size || stalled >= 3) {
            return Ok(StageCoefficients {
                gamma,
                iterations: iteration,
            });
        }
    }
    if converged {
        return Ok(StageCoefficients {
            gamma,
            iterations: cfg.max_iterations,
        });
    }
    Err(HbvmError::NonConvergence {
        iterations: cfg.max_iterations,
        residual: last.to_f64().unwrap_or(f64::NAN),
    })
}

/// Advances `y0` by one step of size `h` (which may be negative).
pub fn step<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    y0: &[T],
    h: T,
    tab: &HbvmTableau<T>,
    cfg: &SolverConfig<T>,
) -> Result<Vec<T>> {
    let stages = solve_stages(sys, y0, h, tab, cfg)?;
    let y1: Vec<T> = y0
        .iter()
        .zip(&stages.gamma[0])
        .map(|(&y, &g)| y + h * g)
        .collect();
    if y1.iter().any(|v| !v.is_finite()) {
        return Err(HbvmError::EvaluationFailure(
            "step produced a non-finite state".into(),
        ));
    }
    Ok(y1)
}

/// Takes `n_steps` steps of size `h` starting from `y0` at time zero.
pub fn integrate<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    y0: &[T],
    h: T,
    n_steps: usize,
    tab: &HbvmTableau<T>,
    cfg: &SolverConfig<T>,
) -> std::result::Result<Trajectory<T>, IntegrationFailure<T>> {
    let mut traj = Trajectory {
        t0: T::zero(),
        h,
        states: Vec::with_capacity(n_steps + 1),
    };
    traj.states.push(y0.to_vec());
    for n in 1..=n_steps {
        match step(sys, traj.last(), h, tab, cfg) {
            Ok(y) => traj.states.push(y),
            Err(error) => {
                return Err(IntegrationFailure {
                    step: n,
                    error,
                    partial: traj,
                })
            }
        }
    }
    Ok(traj)
}
