//! Gauss-Legendre rules on `[0, 1]`.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{HbvmError, Result};
use crate::legendre::legendre_pair;
use crate::scalar::Scalar;

/// Largest node count `gauss_rule` will build.
pub const MAX_NODES: usize = 512;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// A `k`-node Gauss-Legendre rule on `[0, 1]`: nodes ascending, weights positive.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> QuadratureRule<T> {
    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ ω_l f(c_l)`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&c, &w)| acc + w * f(c))
    }
}

type Cache = RwLock<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The `k`-node Gauss-Legendre rule on `[0, 1]`, memoized per process.
pub fn gauss_rule<T: Scalar>(k: usize) -> Result<Arc<QuadratureRule<T>>> {
    if k == 0 {
        return Err(HbvmError::Argument(
            "quadrature needs at least one node".into(),
        ));
    }
    if k > MAX_NODES {
        return Err(HbvmError::Resource(format!(
            "{k} quadrature nodes requested, cap is {MAX_NODES}"
        )));
    }
    let key = (TypeId::of::<T>(), k);
    if let Some(hit) = cache().read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(hit
            .clone()
            .downcast::<QuadratureRule<T>>()
            .expect("cache entry keyed by scalar type"));
    }
    let rule = Arc::new(compute_rule::<T>(k)?);
    let mut guard = cache().write().unwrap_or_else(|e| e.into_inner());
    // another thread may have inserted first; keep a single canonical entry
    let entry = guard
        .entry(key)
        .or_insert_with(|| rule.clone() as Arc<dyn Any + Send + Sync>);
    Ok(entry
        .clone()
        .downcast::<QuadratureRule<T>>()
        .expect("cache entry keyed by scalar type"))
}

/// Newton iteration on `L_k(t)` for the roots in `(0, 1)` of `[-1, 1]`, then
/// mapped to `[0, 1]` by symmetry so that `c_l + c_{k+1-l} = 1`.
fn compute_rule<T: Scalar>(k: usize) -> Result<QuadratureRule<T>> {
    let tol = T::lit(NEWTON_TOL).max(T::epsilon() * T::lit(4.0));
    let kf = T::from_usize_lossy(k);
    let mut nodes = vec![T::zero(); k];
    let mut weights = vec![T::zero(); k];
    let half = k / 2;

    let derivative = |t: T| -> (T, T) {
        let (lk, lkm1) = legendre_pair(k, t);
        (lk, kf * (t * lk - lkm1) / (t * t - T::one()))
    };

    for i in 0..half {
        // i-th largest root
        let guess = T::PI() * (T::from_usize_lossy(i + 1) - T::lit(0.25)) / (kf + T::lit(0.5));
        let mut t = guess.cos();
        let mut converged = false;
        let mut last = T::infinity();
        for _ in 0..NEWTON_MAX_ITER {
            let (lk, dlk) = derivative(t);
            let dt = lk / dlk;
            t = t - dt;
            last = dt.abs();
            if last <= tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(HbvmError::NonConvergence {
                iterations: NEWTON_MAX_ITER,
                residual: last.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (_, dlk) = derivative(t);
        let w = T::one() / ((T::one() - t * t) * dlk * dlk);
        let low = (T::one() - t) / T::lit(2.0);
        nodes[i] = low;
        nodes[k - 1 - i] = T::one() - low;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    if k % 2 == 1 {
        let (_, dlk) = derivative(T::zero());
        nodes[half] = T::lit(0.5);
        weights[half] = T::one() / (dlk * dlk);
    }
    Ok(QuadratureRule { nodes, weights })
}
