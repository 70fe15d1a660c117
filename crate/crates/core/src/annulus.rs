//! Dichotomic search for a point on the boundary of a center's period annulus.
//!
//! Initial conditions `γ(c) = (1 − c) P0 + c Q` are probed for `c ∈ [0, 1]`,
//! where `Q` starts an orbit that leaves the neighbourhood of `P0`. A probe
//! "escapes" when its numerical orbit moves further than the escape radius
//! from `P0` (max-norm) within the step budget, or when the stage iteration
//! fails to converge. The bracket `[c_low, c_high]` always has a bounded
//! probe at `c_low` and an escaping one at `c_high`.

use crate::error::{HbvmError, Result};
use crate::scalar::Scalar;
use crate::solver::{step, SolverConfig, Trajectory};
use crate::system::HamiltonianSystem;
use crate::tableau::{build_tableau, HbvmTableau};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeCriterion<T> {
    pub radius: T,
    /// Test the distance every this many steps.
    pub check_every: usize,
}

impl<T: Scalar> Default for EscapeCriterion<T> {
    fn default() -> Self {
        Self {
            radius: T::lit(2.0),
            check_every: 1,
        }
    }
}

impl<T: Scalar> EscapeCriterion<T> {
    fn has_left(&self, center: &[T], y: &[T]) -> bool {
        y.iter()
            .zip(center)
            .any(|(&a, &b)| !((a - b).abs() <= self.radius))
    }
}

/// First sampled index at which the trajectory is further than the escape
/// radius from `center`, if any.
pub fn orbit_escapes<T: Scalar>(
    traj: &Trajectory<T>,
    center: &[T],
    crit: &EscapeCriterion<T>,
) -> Option<usize> {
    let every = crit.check_every.max(1);
    traj.states
        .iter()
        .enumerate()
        .filter(|(n, _)| n % every == 0)
        .find(|(_, y)| crit.has_left(center, y))
        .map(|(n, _)| n)
}

/// Method and budget used for every probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeParams<T> {
    pub s: usize,
    pub k: usize,
    pub h: T,
    pub n_steps: usize,
    pub solver: SolverConfig<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOutcome {
    Bounded,
    Escaped {
        step: usize,
    },
    /// The stage iteration failed at `step`; counted as an escape.
    SolverFailure {
        step: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRecord<T> {
    pub c: T,
    pub outcome: ProbeOutcome,
    pub steps_run: usize,
}

impl<T> ProbeRecord<T> {
    pub fn escaped(&self) -> bool {
        !matches!(self.outcome, ProbeOutcome::Bounded)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionResult<T> {
    pub c_low: T,
    pub c_high: T,
    /// `γ(c_low)`.
    pub boundary_point: Vec<T>,
    pub probes: Vec<ProbeRecord<T>>,
}

/// `(1 − c) p0 + c q`.
pub fn segment_point<T: Scalar>(p0: &[T], q: &[T], c: T) -> Vec<T> {
    p0.iter()
        .zip(q)
        .map(|(&a, &b)| (T::one() - c) * a + c * b)
        .collect()
}

fn probe<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    center: &[T],
    y0: Vec<T>,
    params: &ProbeParams<T>,
    tab: &HbvmTableau<T>,
    crit: &EscapeCriterion<T>,
) -> Result<(ProbeOutcome, usize)> {
    let every = crit.check_every.max(1);
    if crit.has_left(center, &y0) {
        return Ok((ProbeOutcome::Escaped { step: 0 }, 0));
    }
    let mut y = y0;
    for n in 1..=params.n_steps {
        y = match step(sys, &y, params.h, tab, &params.solver) {
            Ok(next) => next,
            Err(HbvmError::NonConvergence { .. }) => {
                return Ok((ProbeOutcome::SolverFailure { step: n }, n))
            }
            Err(e) => return Err(e),
        };
        if n % every == 0 && crit.has_left(center, &y) {
            return Ok((ProbeOutcome::Escaped { step: n }, n));
        }
    }
    Ok((ProbeOutcome::Bounded, params.n_steps))
}

/// Bisects the escape predicate along the segment from `p0` to `q` until the
/// bracket is shorter than `tol`.
pub fn bisect_boundary<T: Scalar, S: HamiltonianSystem<T> + ?Sized>(
    sys: &S,
    p0: &[T],
    q: &[T],
    params: &ProbeParams<T>,
    tol: T,
    crit: &EscapeCriterion<T>,
) -> Result<BisectionResult<T>> {
    if !(tol > T::zero()) {
        return Err(HbvmError::Argument("tolerance must be positive".into()));
    }
    if p0.len() != sys.dim() || q.len() != sys.dim() {
        return Err(HbvmError::Dimension {
            expected: sys.dim(),
            found: if p0.len() != sys.dim() {
                p0.len()
            } else {
                q.len()
            },
        });
    }
    let distance = p0
        .iter()
        .zip(q)
        .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
    if !(crit.radius > distance) {
        return Err(HbvmError::Argument(format!(
            "escape radius {} does not exceed the segment length {}",
            crit.radius, distance
        )));
    }
    let tab = build_tableau::<T>(params.k, params.s)?;
    let mut probes = Vec::new();
    let run = |c: T, probes: &mut Vec<ProbeRecord<T>>| -> Result<bool> {
        let (outcome, steps_run) = probe(sys, p0, segment_point(p0, q, c), params, &tab, crit)?;
        let record = ProbeRecord {
            c,
            outcome,
            steps_run,
        };
        probes.push(record);
        Ok(record.escaped())
    };

    let (mut c_low, mut c_high) = (T::zero(), T::one());
    if !run(c_high, &mut probes)? {
        return Err(HbvmError::Argument(
            "the orbit from Q stays bounded; pick a point outside the annulus".into(),
        ));
    }
    if run(c_low, &mut probes)? {
        return Err(HbvmError::Argument(
            "the orbit from P0 escapes; P0 is not a center".into(),
        ));
    }
    while c_high - c_low >= tol {
        let c = (c_low + c_high) / T::lit(2.0);
        if c <= c_low || c >= c_high {
            // bracket exhausted at the scalar resolution
            break;
        }
        if run(c, &mut probes)? {
            c_high = c;
        } else {
            c_low = c;
        }
    }
    Ok(BisectionResult {
        c_low,
        c_high,
        boundary_point: segment_point(p0, q, c_low),
        probes,
    })
}
