//! Mirrors, free-space propagation and the two-photon quadrature picture.
//!
//! # Conventions
//!
//! Field amplitudes use the `exp(-iωt)` time dependence, so a wave crossing a
//! length `L` picks up `exp(+iωL/c)`. A sideband at offset `Ω` from the
//! carrier therefore sees `exp(i(φ + ΩL/c))`, where `φ` is the microscopic
//! carrier tuning of the segment.
//!
//! Mirror scattering is real: transmission `τ` from either side, reflection
//! `+ρ` from the front face and `-ρ` from the back face. Inside a
//! [`CavityChain`](crate::cavity::CavityChain) the mirrors alternate
//! orientation (even indices face the input port, odd indices face away), so
//! every sub-cavity of a chain with zero tunings is resonant for the carrier.
//!
//! Quadratures are taken against a fixed carrier reference,
//! `a1 = (a₊ + a₋*)/√2` (amplitude) and `a2 = (a₊ - a₋*)/(i√2)` (phase), and are
//! normalized so that vacuum has unit single-sided spectral density.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Tolerance on `R + T + L = 1`.
pub const ENERGY_TOLERANCE: f64 = 1e-12;

/// 2×2 complex matrix acting on (amplitude, phase) quadratures.
pub type Quad = Matrix2<Complex64>;

/// Complex quadrature 2-vector.
pub type QuadVec = Vector2<Complex64>;

/// Power reflectivity, transmissivity and loss of a single mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMirror", into = "RawMirror")]
pub struct MirrorSpec {
    reflectivity: f64,
    transmissivity: f64,
    loss: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMirror {
    reflectivity: f64,
    transmissivity: f64,
    #[serde(default)]
    loss: f64,
}

impl TryFrom<RawMirror> for MirrorSpec {
    type Error = Error;

    fn try_from(raw: RawMirror) -> Result<Self> {
        MirrorSpec::new(raw.reflectivity, raw.transmissivity, raw.loss)
    }
}

impl From<MirrorSpec> for RawMirror {
    fn from(m: MirrorSpec) -> Self {
        RawMirror {
            reflectivity: m.reflectivity,
            transmissivity: m.transmissivity,
            loss: m.loss,
        }
    }
}

impl MirrorSpec {
    pub fn new(reflectivity: f64, transmissivity: f64, loss: f64) -> Result<Self> {
        for (name, v) in [
            ("reflectivity", reflectivity),
            ("transmissivity", transmissivity),
            ("loss", loss),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidMirror(format!(
                    "{name} = {v} is outside [0, 1]"
                )));
            }
        }
        let sum = reflectivity + transmissivity + loss;
        if (sum - 1.0).abs() > ENERGY_TOLERANCE {
            return Err(Error::InvalidMirror(format!(
                "R + T + L = {sum} (R = {reflectivity}, T = {transmissivity}, L = {loss})"
            )));
        }
        Ok(Self {
            reflectivity,
            transmissivity,
            loss,
        })
    }

    /// Lossless mirror with power reflectivity `reflectivity`.
    pub fn lossless(reflectivity: f64) -> Result<Self> {
        Self::new(reflectivity, 1.0 - reflectivity, 0.0)
    }

    /// Lossless mirror with power transmissivity `transmissivity`.
    ///
    /// Prefer this over [`MirrorSpec::lossless`] for nearly perfect mirrors:
    /// `T` is stored exactly instead of as `1 - R`.
    pub fn from_transmissivity(transmissivity: f64) -> Result<Self> {
        Self::new(1.0 - transmissivity, transmissivity, 0.0)
    }

    /// Lossless mirror with amplitude reflectivity `rho`.
    pub fn from_amplitude(rho: f64) -> Result<Self> {
        if !rho.is_finite() || !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidMirror(format!(
                "amplitude reflectivity {rho} is outside [0, 1]"
            )));
        }
        Self::lossless(rho * rho)
    }

    pub fn perfect() -> Self {
        Self {
            reflectivity: 1.0,
            transmissivity: 0.0,
            loss: 0.0,
        }
    }

    pub fn transparent() -> Self {
        Self {
            reflectivity: 0.0,
            transmissivity: 1.0,
            loss: 0.0,
        }
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn is_lossless(&self) -> bool {
        self.loss == 0.0
    }

    /// Amplitude reflectivity ρ = √R.
    pub fn rho(&self) -> f64 {
        self.reflectivity.sqrt()
    }

    /// Amplitude transmissivity τ = √T.
    pub fn tau(&self) -> f64 {
        self.transmissivity.sqrt()
    }
}

/// Which side of a mirror a field is reflected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Front,
    Back,
}

/// Real two-port amplitude coefficients of a mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scattering {
    pub rho: f64,
    pub tau: f64,
}

impl Scattering {
    /// Signed amplitude reflection from `face`: `+ρ` front, `-ρ` back.
    pub fn reflection(&self, face: Face) -> f64 {
        match face {
            Face::Front => self.rho,
            Face::Back => -self.rho,
        }
    }
}

pub fn mirror_scattering(m: &MirrorSpec) -> Scattering {
    Scattering {
        rho: m.rho(),
        tau: m.tau(),
    }
}

/// Free-space segment between two mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationSegment {
    length: f64,
    tuning: f64,
}

impl PropagationSegment {
    /// `length` in meters, `tuning` is the single-pass microscopic carrier
    /// phase in radians and is wrapped into (-π, π].
    pub fn new(length: f64, tuning: f64) -> Result<Self> {
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidSegment(format!(
                "length {length} must be positive"
            )));
        }
        if !tuning.is_finite() {
            return Err(Error::InvalidSegment(format!(
                "tuning {tuning} is not finite"
            )));
        }
        Ok(Self {
            length,
            tuning: wrap_phase(tuning),
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn tuning(&self) -> f64 {
        self.tuning
    }

    /// Single-pass sideband phase `ΩL/c`, without the carrier tuning.
    pub fn sideband_phase(&self, omega: SidebandFrequency) -> f64 {
        omega.omega() * self.length / SPEED_OF_LIGHT
    }
}

/// Wraps an angle into (-π, π].
pub fn wrap_phase(angle: f64) -> f64 {
    let t = angle.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Signed sideband offset from the carrier. Positive values are upper sidebands.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SidebandFrequency {
    omega: f64,
}

impl SidebandFrequency {
    pub fn from_hz(hz: f64) -> Self {
        Self {
            omega: 2.0 * PI * hz,
        }
    }

    pub fn from_angular(omega: f64) -> Self {
        Self { omega }
    }

    /// Angular offset Ω in rad/s.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Offset f = Ω/2π in Hz.
    pub fn hz(&self) -> f64 {
        self.omega / (2.0 * PI)
    }

    pub fn is_upper(&self) -> bool {
        self.omega > 0.0
    }

    pub fn mirrored(&self) -> Self {
        Self { omega: -self.omega }
    }
}

/// Complex single-pass factor `exp(i(tuning + ΩL/c))` seen by a sideband.
pub fn propagation_phase(seg: &PropagationSegment, omega: SidebandFrequency) -> Complex64 {
    Complex64::from_polar(1.0, seg.tuning + seg.sideband_phase(omega))
}

/// Single-pass propagation in the quadrature picture: `exp(iΩL/c)·R(tuning)`.
pub fn propagation_matrix(seg: &PropagationSegment, omega: SidebandFrequency) -> Quad {
    let delay = Complex64::from_polar(1.0, seg.sideband_phase(omega));
    rotation_matrix(seg.tuning).map(|x| x * delay)
}

pub(crate) fn rotation_matrix(angle: f64) -> Quad {
    let (s, c) = angle.sin_cos();
    Quad::new(
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    )
}

/// Quadrature response of a network at one sideband frequency.
///
/// `matrix` maps input quadratures to output quadratures; `signal` is the
/// output produced by unit differential arm phase modulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureTransfer {
    pub matrix: Quad,
    pub signal: QuadVec,
}

impl QuadratureTransfer {
    pub fn identity() -> Self {
        Self {
            matrix: Quad::identity(),
            signal: QuadVec::zeros(),
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.determinant()
    }

    /// `self` followed by `next`. Signals add after `next` acts on ours.
    pub fn then(&self, next: &QuadratureTransfer) -> QuadratureTransfer {
        QuadratureTransfer {
            matrix: next.matrix * self.matrix,
            signal: next.matrix * self.signal + next.signal,
        }
    }

    /// Same transfer expressed on (upper sideband, conjugate lower sideband).
    pub fn sideband_matrix(&self) -> Quad {
        let (to_quad, to_sideband) = basis_change();
        to_sideband * self.matrix * to_quad
    }

    /// Signal column on (upper sideband, conjugate lower sideband).
    pub fn sideband_signal(&self) -> QuadVec {
        let (_, to_sideband) = basis_change();
        to_sideband * self.signal
    }
}

/// Matrices taking sideband amplitudes to quadratures and back.
fn basis_change() -> (Quad, Quad) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let one = Complex64::new(h, 0.0);
    let i = Complex64::new(0.0, h);
    let to_quad = Quad::new(one, one, -i, i);
    let to_sideband = Quad::new(one, i, one, -i);
    (to_quad, to_sideband)
}

pub fn quadrature_rotation(angle: f64) -> QuadratureTransfer {
    QuadratureTransfer {
        matrix: rotation_matrix(angle),
        signal: QuadVec::zeros(),
    }
}
