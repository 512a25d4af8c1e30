//! Frequency-domain model of detuned signal recycling and twin signal
//! recycling: coupled-cavity resonances, coupling-mirror design and quantum
//! noise spectra in the two-photon picture.

pub mod cavity;
pub mod error;
pub mod noise;
pub mod numeric;
pub mod optics;

pub use error::{Error, Result};
