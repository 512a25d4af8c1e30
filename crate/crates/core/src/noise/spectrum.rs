use std::f64::consts::PI;

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::{io_relation_with, BackAction};
use super::params::{InterferometerParams, Topology};
use crate::error::{Error, Result};
use crate::optics::{QuadVec, QuadratureTransfer, SidebandFrequency};

/// Broadband squeezed vacuum entering the dark port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezedInput {
    /// Squeeze parameter; the squeezed quadrature has variance `e^{-2r}`.
    pub r: f64,
    /// Rotation of the squeezed quadrature away from the amplitude quadrature, rad.
    pub angle: f64,
    pub enabled: bool,
}

impl SqueezedInput {
    pub fn vacuum() -> Self {
        Self {
            r: 0.0,
            angle: 0.0,
            enabled: false,
        }
    }

    pub fn new(r: f64, angle: f64) -> Result<Self> {
        let sq = Self {
            r,
            angle,
            enabled: true,
        };
        sq.validate()?;
        Ok(sq)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!(
                    "squeeze parameter must be finite and non-negative, got {}",
                    self.r
                ),
            });
        }
        if !self.angle.is_finite() {
            return Err(Error::InvalidParameter {
                name: "angle",
                reason: "squeeze angle must be finite".into(),
            });
        }
        Ok(())
    }

    pub fn is_vacuum(&self) -> bool {
        !self.enabled || self.r == 0.0
    }

    pub fn with_angle(self, angle: f64) -> Self {
        Self { angle, ..self }
    }
}

impl Default for SqueezedInput {
    fn default() -> Self {
        Self::vacuum()
    }
}

/// Quadrature covariance of the input field in shot-noise units. The input is
/// broadband, so `_omega` does not enter.
pub fn input_covariance(sq: &SqueezedInput, _omega: SidebandFrequency) -> Matrix2<f64> {
    if sq.is_vacuum() {
        return Matrix2::identity();
    }
    let (s, c) = sq.angle.sin_cos();
    let rot = Matrix2::new(c, -s, s, c);
    let diag = Matrix2::new((-2.0 * sq.r).exp(), 0.0, 0.0, (2.0 * sq.r).exp());
    rot * diag * rot.transpose()
}

/// Squeezed-quadrature variance reduction in dB, `10·log10(e^{2r})`.
pub fn squeezing_db(r: f64) -> f64 {
    10.0 * (2.0 * r).exp().log10()
}

/// Balanced homodyne detection of one output quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawReadout", into = "RawReadout")]
pub struct HomodyneReadout {
    quadrature_angle: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReadout {
    quadrature_angle: f64,
}

impl From<RawReadout> for HomodyneReadout {
    fn from(raw: RawReadout) -> Self {
        Self::new(raw.quadrature_angle)
    }
}

impl From<HomodyneReadout> for RawReadout {
    fn from(r: HomodyneReadout) -> Self {
        Self {
            quadrature_angle: r.quadrature_angle,
        }
    }
}

impl HomodyneReadout {
    /// Angle 0 reads the amplitude quadrature, π/2 the phase quadrature.
    /// Stored modulo π.
    pub fn new(quadrature_angle: f64) -> Self {
        let mut a = quadrature_angle.rem_euclid(PI);
        if a >= PI {
            a = 0.0;
        }
        Self {
            quadrature_angle: a,
        }
    }

    pub fn amplitude() -> Self {
        Self::new(0.0)
    }

    pub fn phase() -> Self {
        Self::new(PI / 2.0)
    }

    pub fn angle(&self) -> f64 {
        self.quadrature_angle
    }

    pub fn projection(&self) -> [f64; 2] {
        let (s, c) = self.quadrature_angle.sin_cos();
        [c, s]
    }
}

/// Spacing of a frequency grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self {
            f_min_hz: 10.0,
            f_max_hz: 5000.0,
            points: 600,
            spacing: Spacing::Log,
        }
    }
}

impl FrequencyGrid {
    pub fn log(f_min_hz: f64, f_max_hz: f64, points: usize) -> Self {
        Self {
            f_min_hz,
            f_max_hz,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn linear(f_min_hz: f64, f_max_hz: f64, points: usize) -> Self {
        Self {
            f_min_hz,
            f_max_hz,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let (lo, hi, n) = (self.f_min_hz, self.f_max_hz, self.points);
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidGrid(format!(
                "need f_min < f_max, got {lo} and {hi}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least two points, got {n}"
            )));
        }
        let last = (n - 1) as f64;
        let mut v: Vec<f64> = match self.spacing {
            Spacing::Linear => (0..n).map(|i| lo + (hi - lo) * i as f64 / last).collect(),
            Spacing::Log => {
                if lo <= 0.0 {
                    return Err(Error::InvalidGrid(format!(
                        "logarithmic grid needs f_min > 0, got {lo}"
                    )));
                }
                (0..n)
                    .map(|i| lo * (hi / lo).powf(i as f64 / last))
                    .collect()
            }
        };
        v[n - 1] = hi;
        Ok(v)
    }
}

/// Descriptor attached to every spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumMetadata {
    pub topology: String,
    pub squeezing: SqueezedInput,
    pub readout: HomodyneReadout,
    pub back_action: bool,
}

/// Signal-referred linear noise spectral density in rad/√Hz of differential phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSpectrum {
    pub frequencies: Vec<f64>,
    pub nsd: Vec<f64>,
    pub metadata: SpectrumMetadata,
}

impl NoiseSpectrum {
    /// Index and value of the lowest NSD on the grid.
    pub fn minimum(&self) -> (usize, f64) {
        self.nsd
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            )
    }

    /// Same curve scaled to strain.
    pub fn to_strain(&self, params: &InterferometerParams) -> NoiseSpectrum {
        let k = params.strain_factor();
        NoiseSpectrum {
            nsd: self.nsd.iter().map(|v| v * k).collect(),
            ..self.clone()
        }
    }
}

/// Quadrature weights `Mᵀv` seen by the detector, and the detected signal.
fn detected(t: &QuadratureTransfer, readout: &HomodyneReadout) -> (QuadVec, f64) {
    let [c, s] = readout.projection();
    let v = QuadVec::new(c.into(), s.into());
    let w = t.matrix.transpose() * v;
    (w, (v.transpose() * t.signal)[0].norm())
}

/// NSD of one transfer for a given input covariance and readout.
pub fn nsd_of(t: &QuadratureTransfer, cov: &Matrix2<f64>, readout: &HomodyneReadout) -> f64 {
    let (w, sig) = detected(t, readout);
    let mut noise = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            noise += cov[(i, j)] * (w[i] * w[j].conj()).re;
        }
    }
    noise.max(0.0).sqrt() / sig
}

/// Fixed squeeze angle minimizing the detected noise of `t`.
pub fn optimal_squeeze_angle(t: &QuadratureTransfer, readout: &HomodyneReadout) -> f64 {
    let (w, _) = detected(t, readout);
    let cross = (w[0] * w[1].conj()).re;
    0.5 * (2.0 * cross).atan2(w[0].norm_sqr() - w[1].norm_sqr())
}

pub fn noise_spectral_density(
    topology: &Topology,
    params: &InterferometerParams,
    sq: &SqueezedInput,
    readout: &HomodyneReadout,
    grid_hz: &[f64],
) -> Result<NoiseSpectrum> {
    noise_spectral_density_with(topology, params, sq, readout, grid_hz, BackAction::Enabled)
}

pub fn noise_spectral_density_with(
    topology: &Topology,
    params: &InterferometerParams,
    sq: &SqueezedInput,
    readout: &HomodyneReadout,
    grid_hz: &[f64],
    back_action: BackAction,
) -> Result<NoiseSpectrum> {
    check_grid(grid_hz)?;
    sq.validate()?;
    params.validate()?;
    let nsd = grid_hz
        .par_iter()
        .map(|&f| {
            let omega = SidebandFrequency::from_hz(f);
            let t = io_relation_with(topology, params, omega, back_action)?;
            let v = nsd_of(&t, &input_covariance(sq, omega), readout);
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::NoSignal { frequency_hz: f })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NoiseSpectrum {
        frequencies: grid_hz.to_vec(),
        nsd,
        metadata: SpectrumMetadata {
            topology: topology.describe(),
            squeezing: *sq,
            readout: *readout,
            back_action: back_action == BackAction::Enabled,
        },
    })
}

fn check_grid(grid_hz: &[f64]) -> Result<()> {
    if grid_hz.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if grid_hz.contains(&0.0) {
        return Err(Error::DegenerateFrequency);
    }
    if let Some(f) = grid_hz.iter().find(|f| !f.is_finite() || **f < 0.0) {
        return Err(Error::InvalidGrid(format!(
            "noise frequencies must be positive and finite, got {f}"
        )));
    }
    if grid_hz.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(
            "frequencies must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Lowest index from which `holds` is true at every later grid point.
pub fn first_index_holding_above(len: usize, holds: impl Fn(usize) -> bool) -> Option<usize> {
    let mut idx = None;
    for i in (0..len).rev() {
        if holds(i) {
            idx = Some(i);
        } else {
            break;
        }
    }
    idx
}

/// Frequency above which shot noise exceeds radiation-pressure noise at every
/// grid point. The shot-noise part is the spectrum with back-action removed;
/// the radiation-pressure part is the remainder in quadrature.
pub fn radiation_pressure_crossover(
    topology: &Topology,
    params: &InterferometerParams,
    sq: &SqueezedInput,
    readout: &HomodyneReadout,
    grid_hz: &[f64],
) -> Result<Option<f64>> {
    let total = noise_spectral_density(topology, params, sq, readout, grid_hz)?;
    let shot =
        noise_spectral_density_with(topology, params, sq, readout, grid_hz, BackAction::Disabled)?;
    let idx = first_index_holding_above(grid_hz.len(), |i| {
        let s2 = shot.nsd[i].powi(2);
        s2 >= total.nsd[i].powi(2) - s2
    });
    Ok(idx.map(|i| grid_hz[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{quadrature_rotation, Quad};
    use num_complex::Complex64;

    #[test]
    fn covariance_examples() {
        let w = SidebandFrequency::from_hz(100.0);
        assert_eq!(
            input_covariance(&SqueezedInput::vacuum(), w),
            Matrix2::identity()
        );
        assert_eq!(
            input_covariance(&SqueezedInput::new(0.0, 1.0).unwrap(), w),
            Matrix2::identity()
        );
        let c = input_covariance(&SqueezedInput::new(1.0, 0.0).unwrap(), w);
        assert!((c[(0, 0)] - (-2f64).exp()).abs() < 1e-15);
        assert!((c[(1, 1)] - 2f64.exp()).abs() < 1e-15);
        assert_eq!(c[(0, 1)], 0.0);
        assert!((squeezing_db(1.0) - 8.685_889_638_065_035).abs() < 1e-12);
        for angle in [-2.0, 0.3, 1.1, 3.0] {
            let c = input_covariance(&SqueezedInput::new(1.0, angle).unwrap(), w);
            assert!((c.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_squeezing_is_rejected() {
        assert!(SqueezedInput::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn readout_angle_is_reduced_mod_pi() {
        assert!((HomodyneReadout::new(3.0 * PI / 2.0).angle() - PI / 2.0).abs() < 1e-15);
        assert_eq!(HomodyneReadout::new(-PI).angle(), 0.0);
        let json = serde_json::to_string(&HomodyneReadout::new(7.0)).unwrap();
        let back: HomodyneReadout = serde_json::from_str(&json).unwrap();
        assert_eq!(back, HomodyneReadout::new(7.0));
    }

    #[test]
    fn grid_values() {
        let g = FrequencyGrid::default().values().unwrap();
        assert_eq!(g.len(), 600);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[599], 5000.0);
        assert!(FrequencyGrid::log(0.0, 10.0, 20).values().is_err());
        assert!(FrequencyGrid::linear(10.0, 1.0, 20).values().is_err());
        let lin = FrequencyGrid::linear(-3000.0, 3000.0, 6001)
            .values()
            .unwrap();
        assert_eq!(lin[3000], 0.0);
    }

    #[test]
    fn optimal_angle_beats_a_scan() {
        let m = Quad::new(
            Complex64::new(0.3, 0.1),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.7, 0.4),
            Complex64::new(0.8, -0.2),
        );
        let t = QuadratureTransfer {
            matrix: m,
            signal: QuadVec::new(0.0.into(), 1.0.into()),
        }
        .then(&quadrature_rotation(0.4));
        let readout = HomodyneReadout::phase();
        let best = optimal_squeeze_angle(&t, &readout);
        let at = |a: f64| {
            nsd_of(
                &t,
                &input_covariance(
                    &SqueezedInput::new(1.0, a).unwrap(),
                    SidebandFrequency::from_hz(1.0),
                ),
                &readout,
            )
        };
        let scan = (0..20_000)
            .map(|i| at(PI * i as f64 / 20_000.0))
            .fold(f64::INFINITY, f64::min);
        assert!(at(best) <= scan * (1.0 + 1e-12));
    }

    #[test]
    fn crossover_index() {
        let v = [false, true, false, true, true];
        assert_eq!(first_index_holding_above(5, |i| v[i]), Some(3));
        assert_eq!(first_index_holding_above(2, |_| false), None);
        assert_eq!(first_index_holding_above(3, |_| true), Some(0));
    }
}
