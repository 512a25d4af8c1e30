//! Coupling-mirror transmission that produces a requested doublet splitting.
//!
//! For a carrier-tuned three-mirror chain the doublet resonances sit where
//! the round trip through the input cavity closes on itself:
//! `arg(-ρ₂₃(ω_sp)·exp(2iω_sp·L1/c)) = 0`, i.e. `-½·arg(-ρ₂₃) = ω_sp·L1/c`.
//! The minus sign is the input mirror's back-face reflection in this crate's
//! convention. With `L1 = L2` this reduces to the closed forms below.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::chain::reflection_rho23;
use crate::error::{Error, Result};
use crate::numeric::bisect;
use crate::optics::{MirrorSpec, SidebandFrequency, SPEED_OF_LIGHT};

const EDGE: f64 = 1e-15;
const SCAN_LOG_DECADES: usize = 14;
const SCAN_PER_DECADE: usize = 40;
const SCAN_LINEAR: usize = 400;

/// `T_c` for equal cavity lengths and an arbitrary end mirror:
/// `1 - 4·cos²(2ω_sp·L/c)·ρ_end² / (1 + ρ_end²)²`.
///
/// Evaluated as `((1 - ρ_end²)² + 4·ρ_end²·sin²(2ω_sp·L/c)) / (1 + ρ_end²)²`,
/// which is free of cancellation for small splittings.
pub fn coupling_transmission_equal_lengths(omega_sp: f64, length: f64, end: &MirrorSpec) -> f64 {
    let r = end.reflectivity();
    let one_minus_r = end.transmissivity() + end.loss();
    let s2 = (2.0 * omega_sp * length / SPEED_OF_LIGHT).sin().powi(2);
    let tc = (one_minus_r * one_minus_r + 4.0 * r * s2) / ((1.0 + r) * (1.0 + r));
    tc.clamp(0.0, 1.0)
}

/// `T_c = 1 - cos²(2ω_sp·L/c)` for perfectly reflecting end mirrors.
pub fn coupling_transmission_ideal(omega_sp: f64, length: f64) -> f64 {
    (2.0 * omega_sp * length / SPEED_OF_LIGHT).sin().powi(2)
}

/// Largest splitting the solver accepts, `π·c / (2·max(L1, L2))`.
pub fn splitting_limit(l1: f64, l2: f64) -> f64 {
    PI * SPEED_OF_LIGHT / (2.0 * l1.max(l2))
}

/// Solves the resonance condition for the SRM power transmission `T_c`
/// (lossless SRM) giving doublet resonances at `±omega_sp`.
///
/// The round-trip phase is tracked continuously from `T_c → 0`, where it
/// equals `2·ω_sp·L1/c`, and the first zero crossing is bisected to a
/// relative width of 1e-14.
pub fn solve_coupling_transmission(
    omega_sp: f64,
    l1: f64,
    l2: f64,
    end: &MirrorSpec,
) -> Result<f64> {
    for (name, l) in [("l1", l1), ("l2", l2)] {
        if !l.is_finite() || l <= 0.0 {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("cavity length {l} must be positive"),
            });
        }
    }
    if !omega_sp.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega_sp",
            reason: "splitting must be finite".into(),
        });
    }
    if omega_sp == 0.0 {
        return Ok(0.0);
    }
    let limit = splitting_limit(l1, l2);
    if omega_sp < 0.0 || omega_sp >= limit {
        return Err(Error::NoRootInBracket {
            omega_sp,
            reason: format!("splitting must lie in (0, {limit:.6e}) rad/s"),
        });
    }

    let omega = SidebandFrequency::from_angular(omega_sp);
    let input_round_trip = Complex64::from_polar(1.0, 2.0 * omega_sp * l1 / SPEED_OF_LIGHT);
    let loop_gain = |tc: f64| -> Complex64 {
        let srm = MirrorSpec::from_transmissivity(tc).expect("tc within [0, 1]");
        let rho23 = reflection_rho23(omega, l2, &srm, end, 0.0).expect("validated length");
        -rho23 * input_round_trip
    };

    let samples = scan_points();
    let mut prev_t = samples[0];
    let mut prev_g = loop_gain(prev_t);
    let mut prev_phase = prev_g.arg();
    for &t in &samples[1..] {
        let g = loop_gain(t);
        let phase = prev_phase + unwrap_step(&loop_gain, prev_t, prev_g, t, g, 0);
        if prev_phase > 0.0 && phase <= 0.0 {
            let (base_g, base_phase) = (prev_g, prev_phase);
            let local = |tc: f64| base_phase + (loop_gain(tc) / base_g).arg();
            return bisect(prev_t, t, 1e-14, 0.0, 400, local).ok_or_else(|| {
                Error::NoRootInBracket {
                    omega_sp,
                    reason: "bracket lost during refinement".into(),
                }
            });
        }
        prev_t = t;
        prev_g = g;
        prev_phase = phase;
    }
    Err(Error::NoRootInBracket {
        omega_sp,
        reason: "round-trip phase never closes for T_c in (0, 1); splitting exceeds the \
                 reach of this geometry"
            .into(),
    })
}

/// Phase advance of `gain` from `t0` to `t1`, subdividing until each step is
/// below π/2 so the principal argument can be accumulated safely.
fn unwrap_step<F>(gain: &F, t0: f64, g0: Complex64, t1: f64, g1: Complex64, depth: u32) -> f64
where
    F: Fn(f64) -> Complex64,
{
    let step = (g1 / g0).arg();
    if step.abs() < PI / 2.0 || depth >= 40 {
        return step;
    }
    let tm = 0.5 * (t0 + t1);
    let gm = gain(tm);
    unwrap_step(gain, t0, g0, tm, gm, depth + 1) + unwrap_step(gain, tm, gm, t1, g1, depth + 1)
}

/// Logarithmic in `T_c` up to 0.1, linear from there to one.
fn scan_points() -> Vec<f64> {
    let n_log = SCAN_LOG_DECADES * SCAN_PER_DECADE;
    let log = (0..n_log).map(|i| {
        let e = -(SCAN_LOG_DECADES as f64 + 1.0) + i as f64 / SCAN_PER_DECADE as f64;
        10f64.powf(e).max(EDGE)
    });
    let lin = (0..=SCAN_LINEAR).map(|i| 0.1 + (1.0 - EDGE - 0.1) * i as f64 / SCAN_LINEAR as f64);
    log.chain(lin).collect()
}
