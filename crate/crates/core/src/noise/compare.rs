//! Twin signal recycling against detuned signal recycling of either sideband.
//!
//! The three configurations are compared at equal peak sensitivity. The SR
//! cavities are detuned so their sensitivity peak coincides with the TSR
//! peak, and the TSRM reflectivity is then chosen so the TSR peak NSD equals
//! the better of the two SR peaks. Both steps feed back into each other and
//! are iterated to a fixed point. Matching always uses vacuum input.
//!
//! Squeezed input is oriented per configuration at the fixed angle that is
//! optimal at the common peak frequency; `SqueezedInput::angle` is added as
//! an offset.

use super::io::io_relation;
use super::params::{InterferometerParams, Sideband, Topology};
use super::spectrum::{
    first_index_holding_above, noise_spectral_density, nsd_of, optimal_squeeze_angle,
    HomodyneReadout, NoiseSpectrum, SqueezedInput,
};
use crate::error::{Error, Result};
use crate::numeric::{bisect, scan_min_log};
use crate::optics::{MirrorSpec, SidebandFrequency};
use nalgebra::Matrix2;

/// Relative slack when deciding that TSR is at least as good as SR.
pub const TIE_TOLERANCE: f64 = 1e-9;

const PEAK_SAMPLES: usize = 240;
const MATCH_TOLERANCE: f64 = 1e-10;
const MAX_OUTER: usize = 40;

/// Fixed geometry of the comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareSetup {
    pub l1: f64,
    pub l2: f64,
    /// Coupling mirror between the two TSR cavities.
    pub srm: MirrorSpec,
    /// Recycling mirror of both detuned SR configurations.
    pub sr_mirror: MirrorSpec,
    pub sr_length: f64,
    /// Nominal optical resonance; peaks are searched within a factor of two.
    pub resonance_hz: f64,
}

#[derive(Debug, Clone)]
pub struct CompareResult {
    pub tsr: NoiseSpectrum,
    pub sr_upper: NoiseSpectrum,
    pub sr_lower: NoiseSpectrum,
    pub tsr_topology: Topology,
    pub sr_upper_topology: Topology,
    pub sr_lower_topology: Topology,
    pub matched_tsrm: MirrorSpec,
    /// `(TSR peak - SR peak) / SR peak` after matching.
    pub match_residual: f64,
    /// Common frequency of the three sensitivity peaks, Hz.
    pub peak_hz: f64,
    /// Lowest grid frequency above which TSR is never worse than either SR trace.
    pub crossover_hz: Option<f64>,
    /// Largest `min(SR) / TSR` at or above the crossover.
    pub max_improvement: Option<f64>,
}

impl CompareResult {
    pub fn crossover_index(&self) -> Option<usize> {
        let f = &self.tsr.frequencies;
        self.crossover_hz
            .map(|c| f.iter().position(|&x| x == c).expect("grid point"))
    }

    /// `min(SR upper, SR lower) / TSR` at each grid point.
    pub fn improvement(&self) -> Vec<f64> {
        self.tsr
            .nsd
            .iter()
            .zip(self.sr_upper.nsd.iter().zip(&self.sr_lower.nsd))
            .map(|(t, (u, l))| u.min(*l) / t)
            .collect()
    }
}

/// Readout used for each topology: amplitude quadrature for detuned SR,
/// phase quadrature for TSR.
pub fn default_readout(topology: &Topology) -> HomodyneReadout {
    match topology {
        Topology::DetunedSr { .. } => HomodyneReadout::amplitude(),
        Topology::Tsr { .. } => HomodyneReadout::phase(),
    }
}

/// Location and value of the vacuum NSD minimum within `[f/2, 2f]`.
pub fn peak_sensitivity(
    topology: &Topology,
    params: &InterferometerParams,
    readout: &HomodyneReadout,
    around_hz: f64,
) -> Result<(f64, f64)> {
    let vacuum = Matrix2::identity();
    let mut failure = None;
    let (f, v) =
        scan_min_log(
            0.5 * around_hz,
            2.0 * around_hz,
            PEAK_SAMPLES,
            1e-12,
            |f| match io_relation(topology, params, SidebandFrequency::from_hz(f)) {
                Ok(t) => nsd_of(&t, &vacuum, readout),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
        );
    match failure {
        Some(e) => Err(e),
        None if v.is_finite() => Ok((f, v)),
        None => Err(Error::MatchingFailed(format!(
            "no finite NSD near {around_hz} Hz"
        ))),
    }
}

pub fn compare_topologies(
    params: &InterferometerParams,
    setup: &CompareSetup,
    sq: &SqueezedInput,
    grid_hz: &[f64],
) -> Result<CompareResult> {
    params.validate()?;
    sq.validate()?;
    if !(setup.resonance_hz.is_finite() && setup.resonance_hz > 0.0) {
        return Err(Error::InvalidParameter {
            name: "resonance_hz",
            reason: format!("must be positive, got {}", setup.resonance_hz),
        });
    }
    let tsr_with = |tsrm: MirrorSpec| Topology::Tsr {
        l1: setup.l1,
        l2: setup.l2,
        srm: setup.srm,
        tsrm,
    };
    let tsr_readout = HomodyneReadout::phase();
    let sr_readout = HomodyneReadout::amplitude();
    let f0 = setup.resonance_hz;

    let mut fr = [f0, f0];
    let mut target = sr_target(params, setup, &fr, &sr_readout)?;
    let mut tsrm = match_tsrm(params, &tsr_with, &tsr_readout, f0, target)?;
    let mut peak_hz = f0;
    let mut converged = false;
    for _ in 0..MAX_OUTER {
        peak_hz = peak_sensitivity(&tsr_with(tsrm), params, &tsr_readout, f0)?.0;
        for (k, side) in [Sideband::Upper, Sideband::Lower].into_iter().enumerate() {
            fr[k] = align_sr(params, setup, side, &sr_readout, peak_hz, fr[k])?;
        }
        target = sr_target(params, setup, &fr, &sr_readout)?;
        let next = match_tsrm(params, &tsr_with, &tsr_readout, f0, target)?;
        let delta = (next.reflectivity() - tsrm.reflectivity()).abs();
        tsrm = next;
        if delta < MATCH_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::MatchingFailed(format!(
            "TSRM reflectivity did not settle within {MAX_OUTER} iterations"
        )));
    }

    let tsr_topology = tsr_with(tsrm);
    let sr_upper_topology = sr(setup, Sideband::Upper, fr[0]);
    let sr_lower_topology = sr(setup, Sideband::Lower, fr[1]);
    let tsr_peak = peak_sensitivity(&tsr_topology, params, &tsr_readout, f0)?.1;

    let spectrum = |topology: &Topology, readout: &HomodyneReadout| -> Result<NoiseSpectrum> {
        let t = io_relation(topology, params, SidebandFrequency::from_hz(peak_hz))?;
        let oriented = sq.with_angle(optimal_squeeze_angle(&t, readout) + sq.angle);
        noise_spectral_density(topology, params, &oriented, readout, grid_hz)
    };
    let tsr = spectrum(&tsr_topology, &tsr_readout)?;
    let sr_upper = spectrum(&sr_upper_topology, &sr_readout)?;
    let sr_lower = spectrum(&sr_lower_topology, &sr_readout)?;

    let best_sr = |i: usize| sr_upper.nsd[i].min(sr_lower.nsd[i]);
    let idx = first_index_holding_above(grid_hz.len(), |i| {
        tsr.nsd[i] <= best_sr(i) * (1.0 + TIE_TOLERANCE)
    });
    let max_improvement = idx.map(|i0| {
        (i0..grid_hz.len())
            .map(|i| best_sr(i) / tsr.nsd[i])
            .fold(f64::NEG_INFINITY, f64::max)
    });

    Ok(CompareResult {
        crossover_hz: idx.map(|i| grid_hz[i]),
        max_improvement,
        tsr,
        sr_upper,
        sr_lower,
        tsr_topology,
        sr_upper_topology,
        sr_lower_topology,
        matched_tsrm: tsrm,
        match_residual: (tsr_peak - target) / target,
        peak_hz,
    })
}

fn sr(setup: &CompareSetup, side: Sideband, resonance_hz: f64) -> Topology {
    Topology::detuned_sr_resonant_at(resonance_hz, side, setup.sr_mirror, setup.sr_length)
}

fn sr_target(
    params: &InterferometerParams,
    setup: &CompareSetup,
    fr: &[f64; 2],
    readout: &HomodyneReadout,
) -> Result<f64> {
    let up = peak_sensitivity(
        &sr(setup, Sideband::Upper, fr[0]),
        params,
        readout,
        setup.resonance_hz,
    )?;
    let lo = peak_sensitivity(
        &sr(setup, Sideband::Lower, fr[1]),
        params,
        readout,
        setup.resonance_hz,
    )?;
    Ok(up.1.min(lo.1))
}

/// Resonance setting that puts the SR sensitivity peak at `peak_hz`.
fn align_sr(
    params: &InterferometerParams,
    setup: &CompareSetup,
    side: Sideband,
    readout: &HomodyneReadout,
    peak_hz: f64,
    start: f64,
) -> Result<f64> {
    let mut fr = start;
    for _ in 0..100 {
        let at = peak_sensitivity(&sr(setup, side, fr), params, readout, setup.resonance_hz)?.0;
        let step = peak_hz - at;
        fr += step;
        if step.abs() <= 1e-7 * peak_hz {
            return Ok(fr);
        }
    }
    Err(Error::MatchingFailed(format!(
        "could not place the {side:?} SR peak at {peak_hz} Hz"
    )))
}

/// TSRM whose peak NSD equals `target`, searched downwards from high
/// reflectivity so that the branch connected to a narrow resonance is kept.
fn match_tsrm(
    params: &InterferometerParams,
    tsr_with: &dyn Fn(MirrorSpec) -> Topology,
    readout: &HomodyneReadout,
    around_hz: f64,
    target: f64,
) -> Result<MirrorSpec> {
    let mut failure = None;
    let mut excess = |t: f64| -> f64 {
        let m = MirrorSpec::from_transmissivity(t).expect("transmissivity in (0, 1)");
        match peak_sensitivity(&tsr_with(m), params, readout, around_hz) {
            Ok((_, v)) => v - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let samples: Vec<f64> = (0..=115)
        .map(|i| 1e-6 * 10f64.powf(i as f64 / 20.0))
        .collect();
    let mut prev = (samples[0], excess(samples[0]));
    if prev.1 > 0.0 {
        return Err(Error::MatchingFailed(format!(
            "TSR cannot reach a peak NSD of {target:.6e} even with T_tsrm = {:.1e}",
            samples[0]
        )));
    }
    for &t in &samples[1..] {
        let v = excess(t);
        if v.is_nan() {
            break;
        }
        if v >= 0.0 {
            let root = bisect(prev.0, t, 1e-15, 1e-17, 200, &mut excess);
            return root
                .map(|t| MirrorSpec::from_transmissivity(t).expect("transmissivity in (0, 1)"))
                .ok_or_else(|| Error::MatchingFailed("bracket lost during refinement".into()));
        }
        prev = (t, v);
    }
    Err(failure.unwrap_or_else(|| {
        Error::MatchingFailed(format!(
            "no TSRM transmissivity reaches a peak NSD of {target:.6e}"
        ))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn readouts_follow_the_signal_quadrature() {
        let m = MirrorSpec::lossless(0.9).unwrap();
        let sr = Topology::detuned_sr_resonant_at(1e3, Sideband::Upper, m, 1.0);
        assert_eq!(default_readout(&sr).angle(), 0.0);
        let tsr = Topology::Tsr {
            l1: 1.0,
            l2: 1.0,
            srm: m,
            tsrm: m,
        };
        assert_eq!(default_readout(&tsr).angle(), PI / 2.0);
    }
}
