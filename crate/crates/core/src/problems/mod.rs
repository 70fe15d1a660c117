//! Built-in Hamiltonian test problems.

mod harmonic;
mod henon_heiles;
mod nbody;
mod quintic;

pub use harmonic::HarmonicOscillator;
pub use henon_heiles::{
    henon_heiles_initial_state, henon_heiles_system, HenonHeiles, HENON_HEILES_ENERGY_BOUND,
    HENON_HEILES_SADDLES,
};
pub use nbody::{
    nbody_system, sitnikov_config, sitnikov_initial_state, NBodyConfig, NBodySystem,
    COLLISION_DISTANCE, SITNIKOV_APOCENTRE_DISTANCE, SITNIKOV_ECCENTRICITY,
    SITNIKOV_PLANETOID_VELOCITY,
};
pub use quintic::{
    hstar_reference, quintic_system, QuinticCoefficients, QuinticSystem, HSTAR, QUINTIC_P1,
    QUINTIC_P2,
};
