//! JSON run configuration.
//!
//! ```json
//! {
//!   "interferometer": { "wavelength": 1.064e-6, "power_at_bs": 10000.0, "mirror_mass": 5.6,
//!                       "arm_length": 1200.0,
//!                       "michelson_reflectivity": { "reflectivity": 0.99995, "transmissivity": 5e-5 } },
//!   "topology": { "kind": "tsr", "l1": 1200.0, "l2": 1200.0,
//!                 "tsrm": { "reflectivity": 0.963, "transmissivity": 0.037 },
//!                 "srm": { "design": { "splitting_hz": 1000.0, "model": "ideal" } } },
//!   "squeezing": { "r": 1.0, "angle": 1.5707963267948966, "enabled": true },
//!   "grid": { "f_min_hz": 10.0, "f_max_hz": 5000.0, "points": 600, "spacing": "log" },
//!   "output": { "format": "csv", "path": "nsd.csv", "units": "phase" },
//!   "compare": { "sr_mirror": { "reflectivity": 0.991, "transmissivity": 0.009 } }
//! }
//! ```

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tsr_core::cavity::{
    coupling_transmission_equal_lengths, coupling_transmission_ideal, solve_coupling_transmission,
    DoubletObservable,
};
use tsr_core::noise::{
    default_readout, FrequencyGrid, HomodyneReadout, InterferometerParams, Sideband, SqueezedInput,
    Topology,
};
use tsr_core::optics::{MirrorSpec, PropagationSegment};

use crate::error::CliError;

pub const MIN_GRID_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub interferometer: InterferometerParams,
    pub topology: TopologyConfig,
    #[serde(default)]
    pub squeezing: SqueezedInput,
    /// Homodyne angle; defaults to the phase quadrature for TSR and the
    /// amplitude quadrature for detuned SR.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<HomodyneReadout>,
    #[serde(default)]
    pub grid: FrequencyGrid,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub doublet: DoubletSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologyConfig {
    Tsr {
        l1: f64,
        l2: f64,
        tsrm: MirrorSpec,
        srm: SrmConfig,
    },
    DetunedSr {
        length: f64,
        recycling_mirror: MirrorSpec,
        tuning: TuningConfig,
    },
}

/// The coupling mirror is either given directly or designed for a splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SrmConfig {
    Mirror(MirrorSpec),
    Design {
        splitting_hz: f64,
        #[serde(default)]
        model: DesignModel,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignModel {
    /// Perfect end mirror, equal cavity lengths.
    Ideal,
    /// Actual Michelson reflectivity, equal cavity lengths.
    EqualLengths,
    /// Numerical solution of the round-trip condition.
    #[default]
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TuningConfig {
    DetuningRad(f64),
    Resonance { hz: f64, sideband: Sideband },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// rad/√Hz of differential arm phase.
    #[default]
    Phase,
    /// 1/√Hz of strain.
    Strain,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub units: Units,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubletSettings {
    #[serde(default)]
    pub observable: DoubletObservable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    /// Recycling mirror of the detuned SR reference configurations.
    pub sr_mirror: MirrorSpec,
    /// SR cavity length; defaults to the TSR `l2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_length: Option<f64>,
    /// Centre of the peak search; defaults to the designed splitting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance_hz: Option<f64>,
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.interferometer
            .validate()
            .map_err(|e| prefixed("interferometer", e))?;
        self.topology.validate()?;
        self.squeezing
            .validate()
            .map_err(|e| prefixed("squeezing", e))?;
        let g = &self.grid;
        if !(g.f_min_hz.is_finite() && g.f_max_hz.is_finite()) || g.f_min_hz >= g.f_max_hz {
            return Err(CliError::config(
                "grid.f_min_hz",
                format!(
                    "must be below grid.f_max_hz ({} >= {})",
                    g.f_min_hz, g.f_max_hz
                ),
            ));
        }
        if g.points < MIN_GRID_POINTS {
            return Err(CliError::config(
                "grid.points",
                format!("need at least {MIN_GRID_POINTS}, got {}", g.points),
            ));
        }
        g.values().map_err(|e| CliError::config("grid", e))?;
        if let Some(c) = &self.compare {
            if let Some(l) = c.sr_length {
                positive("compare.sr_length", l)?;
            }
            if let Some(f) = c.resonance_hz {
                positive("compare.resonance_hz", f)?;
            }
        }
        Ok(())
    }

    /// Physical topology, with the coupling mirror designed if requested.
    pub fn resolve_topology(&self) -> Result<Topology, CliError> {
        self.topology
            .resolve(&self.interferometer.michelson_reflectivity)
    }

    pub fn readout_for(&self, topology: &Topology) -> HomodyneReadout {
        self.readout.unwrap_or_else(|| default_readout(topology))
    }
}

impl TopologyConfig {
    fn validate(&self) -> Result<(), CliError> {
        match *self {
            TopologyConfig::Tsr { l1, l2, srm, .. } => {
                positive("topology.l1", l1)?;
                positive("topology.l2", l2)?;
                if let SrmConfig::Design {
                    splitting_hz,
                    model,
                } = srm
                {
                    if !splitting_hz.is_finite() || splitting_hz < 0.0 {
                        return Err(CliError::config(
                            "topology.srm.design.splitting_hz",
                            format!("must be finite and non-negative, got {splitting_hz}"),
                        ));
                    }
                    if model != DesignModel::General && l1 != l2 {
                        return Err(CliError::config(
                            "topology.srm.design.model",
                            "closed-form models need l1 == l2; use \"general\"",
                        ));
                    }
                }
            }
            TopologyConfig::DetunedSr { length, tuning, .. } => {
                positive("topology.length", length)?;
                match tuning {
                    TuningConfig::DetuningRad(d) if !(d > -PI && d <= PI) => {
                        return Err(CliError::config(
                            "topology.tuning.detuning_rad",
                            format!("must lie in (-π, π], got {d}"),
                        ));
                    }
                    TuningConfig::Resonance { hz, .. } if !hz.is_finite() => {
                        return Err(CliError::config(
                            "topology.tuning.resonance.hz",
                            "must be finite",
                        ));
                    }
                    _ => {}
                }
                PropagationSegment::new(length, 0.0)
                    .map_err(|e| CliError::config("topology.length", e))?;
            }
        }
        Ok(())
    }

    pub fn resolve(&self, michelson: &MirrorSpec) -> Result<Topology, CliError> {
        Ok(match *self {
            TopologyConfig::Tsr { l1, l2, tsrm, srm } => Topology::Tsr {
                l1,
                l2,
                tsrm,
                srm: match srm {
                    SrmConfig::Mirror(m) => m,
                    SrmConfig::Design {
                        splitting_hz,
                        model,
                    } => {
                        let t = design_transmission(splitting_hz, l1, l2, michelson, model)?;
                        MirrorSpec::from_transmissivity(t)
                            .map_err(|e| CliError::config("topology.srm", e))?
                    }
                },
            },
            TopologyConfig::DetunedSr {
                length,
                recycling_mirror,
                tuning,
            } => match tuning {
                TuningConfig::DetuningRad(detuning) => Topology::DetunedSr {
                    detuning,
                    recycling_mirror,
                    length,
                },
                TuningConfig::Resonance { hz, sideband } => {
                    Topology::detuned_sr_resonant_at(hz, sideband, recycling_mirror, length)
                }
            },
        })
    }

    /// Designed splitting, if the coupling mirror is specified that way.
    pub fn splitting_hz(&self) -> Option<f64> {
        match self {
            TopologyConfig::Tsr {
                srm: SrmConfig::Design { splitting_hz, .. },
                ..
            } => Some(*splitting_hz),
            _ => None,
        }
    }
}

/// Coupling transmission for a splitting in Hz under the chosen model.
pub fn design_transmission(
    splitting_hz: f64,
    l1: f64,
    l2: f64,
    end: &MirrorSpec,
    model: DesignModel,
) -> Result<f64, CliError> {
    let w = 2.0 * PI * splitting_hz;
    Ok(match model {
        DesignModel::Ideal => coupling_transmission_ideal(w, l1),
        DesignModel::EqualLengths => coupling_transmission_equal_lengths(w, l1, end),
        DesignModel::General => solve_coupling_transmission(w, l1, l2, end)?,
    })
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::config(
            path,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn prefixed(section: &str, e: tsr_core::Error) -> CliError {
    match e {
        tsr_core::Error::InvalidParameter { name, reason } => {
            CliError::config(&format!("{section}.{name}"), reason)
        }
        other => CliError::config(section, other),
    }
}
