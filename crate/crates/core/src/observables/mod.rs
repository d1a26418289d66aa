//! Temperatures, concurrence, the non-Markovianity witness and trajectory
//! features.

pub mod concurrence;
pub mod features;
pub mod temperature;
pub mod witness;

pub use concurrence::concurrence;
pub use features::{
    extract_features, simulation_features, trajectory_features, Envelope, Extremum, FeatureOptions, FeatureReport,
    Steady,
};
pub use temperature::{
    analytic_single_qubit_temperature, local_temperature, temperature_from_population, temperature_series,
    TemperaturePoint,
};
pub use witness::{rhp_concurrence_series, rhp_nonmonotonicity, witness_mc, MarkovFamily, WitnessResult};
