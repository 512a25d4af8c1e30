//! Quantum noise of the recycled Michelson: shot noise, radiation-pressure
//! back-action, squeezed input and homodyne readout.

mod compare;
mod io;
mod params;
mod spectrum;

pub use compare::{
    compare_topologies, default_readout, peak_sensitivity, CompareResult, CompareSetup,
    TIE_TOLERANCE,
};
pub use io::{io_relation, io_relation_with, sideband_signal_moduli, BackAction};
pub use params::{InterferometerParams, Sideband, Topology};
pub use spectrum::{
    first_index_holding_above, input_covariance, noise_spectral_density,
    noise_spectral_density_with, nsd_of, optimal_squeeze_angle, radiation_pressure_crossover,
    squeezing_db, FrequencyGrid, HomodyneReadout, NoiseSpectrum, Spacing, SpectrumMetadata,
    SqueezedInput,
};
