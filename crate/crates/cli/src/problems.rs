//! Built-in problems and their default initial states.

use hbvm::problems::{
    henon_heiles_initial_state, henon_heiles_system, nbody_system, quintic_system, sitnikov_config,
    sitnikov_initial_state, HarmonicOscillator, QuinticCoefficients,
};
use hbvm::HamiltonianSystem;

use crate::args::{InitialArgs, ProblemId};
use crate::error::CliError;

pub type DynSystem = Box<dyn HamiltonianSystem<f64> + Send + Sync>;

pub const HENON_HEILES_DEFAULT: [f64; 3] = [0.0, 0.2, 0.3];

pub fn build_system(id: ProblemId) -> Result<DynSystem, CliError> {
    Ok(match id {
        ProblemId::Harmonic => Box::new(HarmonicOscillator::default()),
        ProblemId::Sitnikov => Box::new(nbody_system(sitnikov_config::<f64>())?),
        ProblemId::HenonHeiles => Box::new(henon_heiles_system()),
        ProblemId::Quintic => Box::new(quintic_system(QuinticCoefficients::<f64>::reference())?),
    })
}

fn henon_heiles_state(v: [f64; 3], energy: f64) -> Result<Vec<f64>, CliError> {
    henon_heiles_initial_state(v[0], v[1], v[2], energy).ok_or_else(|| {
        CliError::Usage(format!(
            "no real p2 gives energy {energy} at q = ({}, {}), p1 = {}",
            v[0], v[1], v[2]
        ))
    })
}

/// Initial state from the flags, or the problem's default.
pub fn initial_state(
    id: ProblemId,
    sys: &dyn HamiltonianSystem<f64>,
    init: &InitialArgs,
) -> Result<Vec<f64>, CliError> {
    let dim = sys.dim();
    let y0 = match (&init.y0, id) {
        (Some(v), ProblemId::HenonHeiles) if v.len() == 3 => {
            henon_heiles_state([v[0], v[1], v[2]], init.energy)?
        }
        (Some(v), _) => v.clone(),
        (None, ProblemId::Harmonic) => {
            let mut y = vec![0.0; dim];
            y[0] = 1.0;
            y
        }
        (None, ProblemId::Sitnikov) => sitnikov_initial_state(),
        (None, ProblemId::HenonHeiles) => henon_heiles_state(HENON_HEILES_DEFAULT, init.energy)?,
        (None, ProblemId::Quintic) => vec![0.0, 0.3],
    };
    if y0.len() != dim {
        return Err(CliError::Usage(format!(
            "--y0 has {} values, {} expects {dim}",
            y0.len(),
            id.name()
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage("--y0 must be finite".into()));
    }
    Ok(y0)
}
