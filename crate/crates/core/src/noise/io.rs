//! Input–output relations of the dark port in the quadrature picture.
//!
//! The Michelson acts as an effective end mirror that also converts amplitude
//! fluctuations into phase through radiation pressure on free masses:
//! `(a1, a2) → ρ·(a1, a2 - K·a1)`, and injects the differential-phase signal
//! into the phase quadrature. The recycling mirrors are folded in one at a
//! time from the Michelson outwards.

use num_complex::Complex64;

use super::params::{InterferometerParams, Topology};
use crate::error::{Error, Result};
use crate::optics::{propagation_matrix, Quad, QuadVec, QuadratureTransfer, SidebandFrequency};

/// Whether radiation-pressure back-action on the test masses is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackAction {
    #[default]
    Enabled,
    Disabled,
}

/// Quadrature transfer from the dark-port input to the dark-port output at
/// sideband frequency `omega`, including back-action.
pub fn io_relation(
    topology: &Topology,
    params: &InterferometerParams,
    omega: SidebandFrequency,
) -> Result<QuadratureTransfer> {
    io_relation_with(topology, params, omega, BackAction::Enabled)
}

pub fn io_relation_with(
    topology: &Topology,
    params: &InterferometerParams,
    omega: SidebandFrequency,
    back_action: BackAction,
) -> Result<QuadratureTransfer> {
    if omega.omega() == 0.0 {
        return Err(Error::DegenerateFrequency);
    }
    if !omega.omega().is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: "sideband frequency must be finite".into(),
        });
    }
    params.validate()?;
    let chain = topology.chain(&params.michelson_reflectivity)?;
    let n = chain.len();

    let k = match back_action {
        BackAction::Enabled => params.coupling_constant(omega.omega()),
        BackAction::Disabled => 0.0,
    };
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut gamma = Quad::new(c(1.0), c(0.0), c(-k), c(1.0)) * c(chain.left_reflection(n - 1));
    let mut signal = QuadVec::new(c(0.0), c(params.carrier_amplitude()));

    for idx in (0..n - 1).rev() {
        let tau = c(chain.mirrors()[idx].tau());
        let p = propagation_matrix(&chain.segments()[idx], omega);
        let g = p * gamma * p;
        let inv = (Quad::identity() - g * c(chain.right_reflection(idx)))
            .try_inverse()
            .ok_or(Error::SingularSystem {
                omega: omega.omega(),
            })?;
        gamma = Quad::identity() * c(chain.left_reflection(idx)) + g * inv * tau * tau;
        signal = inv * p * signal * tau;
    }

    if gamma
        .iter()
        .chain(signal.iter())
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::SingularSystem {
            omega: omega.omega(),
        });
    }
    Ok(QuadratureTransfer {
        matrix: gamma,
        signal,
    })
}

/// Moduli of the signal carried by the upper sideband at `+Ω` and by the
/// lower sideband at `-Ω`.
pub fn sideband_signal_moduli(
    topology: &Topology,
    params: &InterferometerParams,
    omega: SidebandFrequency,
    back_action: BackAction,
) -> Result<[f64; 2]> {
    let t = io_relation_with(topology, params, omega, back_action)?;
    let s = t.sideband_signal();
    Ok([s[0].norm(), s[1].norm()])
}
