use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cavity::CavityChain;
use crate::error::{Error, Result};
use crate::optics::{wrap_phase, MirrorSpec, PropagationSegment, HBAR, SPEED_OF_LIGHT};

/// Laser, test-mass and Michelson parameters shared by every topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerParams {
    /// Carrier wavelength, m.
    pub wavelength: f64,
    /// Carrier power at the beam splitter, W.
    pub power_at_bs: f64,
    /// Mass of each test mass, kg.
    pub mirror_mass: f64,
    /// Michelson arm length, m.
    pub arm_length: f64,
    /// Michelson folded into one effective mirror as seen from the recycling side.
    pub michelson_reflectivity: MirrorSpec,
}

impl InterferometerParams {
    /// Stand-in values for a 1.2 km folded-arm detector.
    pub fn canonical() -> Self {
        Self {
            wavelength: 1.064e-6,
            power_at_bs: 10e3,
            mirror_mass: 5.6,
            arm_length: 1200.0,
            michelson_reflectivity: MirrorSpec::lossless(0.99995).expect("valid reflectivity"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("wavelength", self.wavelength),
            ("power_at_bs", self.power_at_bs),
            ("mirror_mass", self.mirror_mass),
            ("arm_length", self.arm_length),
        ];
        for (name, v) in checks {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Carrier angular frequency ω₀.
    pub fn carrier_omega(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.wavelength
    }

    /// Radiation-pressure coupling `K = 4ω₀P / (m c² Ω²)` of the free masses.
    pub fn coupling_constant(&self, omega: f64) -> f64 {
        4.0 * self.carrier_omega() * self.power_at_bs
            / (self.mirror_mass * SPEED_OF_LIGHT * SPEED_OF_LIGHT * omega * omega)
    }

    /// Carrier amplitude in units of √(photons/s), so that unit differential
    /// phase produces this much phase-quadrature signal.
    pub fn carrier_amplitude(&self) -> f64 {
        (self.power_at_bs / (2.0 * HBAR * self.carrier_omega())).sqrt()
    }

    /// Multiplies a differential-phase spectral density into strain.
    pub fn strain_factor(&self) -> f64 {
        self.wavelength / (4.0 * PI * self.arm_length)
    }
}

/// Which signal sideband a detuned recycling cavity is tuned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sideband {
    Upper,
    Lower,
}

/// Recycling configuration at the dark port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    /// One recycling mirror, with a microscopic detuning of the recycling cavity.
    DetunedSr {
        detuning: f64,
        recycling_mirror: MirrorSpec,
        length: f64,
    },
    /// Two coupled, carrier-tuned recycling cavities.
    Tsr {
        l1: f64,
        l2: f64,
        srm: MirrorSpec,
        tsrm: MirrorSpec,
    },
}

impl Topology {
    /// Detuned SR with the chosen sideband resonant at `resonance_hz`.
    pub fn detuned_sr_resonant_at(
        resonance_hz: f64,
        sideband: Sideband,
        recycling_mirror: MirrorSpec,
        length: f64,
    ) -> Self {
        let phase = 2.0 * PI * resonance_hz * length / SPEED_OF_LIGHT;
        let detuning = match sideband {
            Sideband::Lower => phase,
            Sideband::Upper => -phase,
        };
        Topology::DetunedSr {
            detuning: wrap_phase(detuning),
            recycling_mirror,
            length,
        }
    }

    /// Mirror chain from the dark port inwards, ending at the Michelson.
    pub fn chain(&self, michelson: &MirrorSpec) -> Result<CavityChain> {
        match *self {
            Topology::DetunedSr {
                detuning,
                recycling_mirror,
                length,
            } => {
                if !(detuning > -PI && detuning <= PI) {
                    return Err(Error::InvalidParameter {
                        name: "detuning",
                        reason: format!("{detuning} is outside (-π, π]"),
                    });
                }
                CavityChain::new(
                    vec![recycling_mirror, *michelson],
                    vec![PropagationSegment::new(length, detuning)?],
                )
            }
            Topology::Tsr { l1, l2, srm, tsrm } => CavityChain::twin(tsrm, srm, *michelson, l1, l2),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Topology::DetunedSr {
                detuning,
                recycling_mirror,
                length,
            } => format!(
                "detuned_sr(detuning={detuning:.9e} rad, R={:.9e}, L={length} m)",
                recycling_mirror.reflectivity()
            ),
            Topology::Tsr { l1, l2, srm, tsrm } => format!(
                "tsr(L1={l1} m, L2={l2} m, T_srm={:.9e}, R_tsrm={:.9e})",
                srm.transmissivity(),
                tsrm.reflectivity()
            ),
        }
    }
}
