use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::{
    mirror_scattering, propagation_phase, Face, MirrorSpec, PropagationSegment, SidebandFrequency,
};

/// Linear chain of mirrors separated by free-space segments.
///
/// Mirror 0 faces the input port. For signal recycling the chain is
/// `[SRM, Michelson]`, for twin signal recycling `[TSRM, SRM, Michelson]`,
/// where the Michelson is folded into one effective end mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityChain {
    mirrors: Vec<MirrorSpec>,
    segments: Vec<PropagationSegment>,
}

/// Steady-state fields for unit input on the front of mirror 0.
///
/// `forward[k]` leaves mirror `k` towards mirror `k + 1`; `backward[k]` leaves
/// mirror `k + 1` towards mirror `k`. Both are referenced at the face they
/// leave from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainFields {
    pub reflection: Complex64,
    pub transmission: Complex64,
    pub forward: Vec<Complex64>,
    pub backward: Vec<Complex64>,
}

impl CavityChain {
    pub fn new(mirrors: Vec<MirrorSpec>, segments: Vec<PropagationSegment>) -> Result<Self> {
        if mirrors.len() < 2 {
            return Err(Error::InvalidChain(format!(
                "need at least two mirrors, got {}",
                mirrors.len()
            )));
        }
        if segments.len() + 1 != mirrors.len() {
            return Err(Error::InvalidChain(format!(
                "{} mirrors need {} segments, got {}",
                mirrors.len(),
                mirrors.len() - 1,
                segments.len()
            )));
        }
        Ok(Self { mirrors, segments })
    }

    /// Three-mirror twin-signal-recycling chain with zero tunings.
    pub fn twin(
        tsrm: MirrorSpec,
        srm: MirrorSpec,
        end: MirrorSpec,
        l1: f64,
        l2: f64,
    ) -> Result<Self> {
        Self::new(
            vec![tsrm, srm, end],
            vec![
                PropagationSegment::new(l1, 0.0)?,
                PropagationSegment::new(l2, 0.0)?,
            ],
        )
    }

    pub fn mirrors(&self) -> &[MirrorSpec] {
        &self.mirrors
    }

    pub fn segments(&self) -> &[PropagationSegment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.mirrors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mirrors.is_empty()
    }

    pub fn is_carrier_tuned(&self) -> bool {
        self.segments.iter().all(|s| s.tuning() == 0.0)
    }

    /// Faces of mirror `k` seen from the input side and from the far side.
    pub fn faces(k: usize) -> (Face, Face) {
        if k.is_multiple_of(2) {
            (Face::Front, Face::Back)
        } else {
            (Face::Back, Face::Front)
        }
    }

    /// Signed reflection of mirror `k` for light arriving from the input side.
    pub fn left_reflection(&self, k: usize) -> f64 {
        mirror_scattering(&self.mirrors[k]).reflection(Self::faces(k).0)
    }

    /// Signed reflection of mirror `k` for light arriving from the far side.
    pub fn right_reflection(&self, k: usize) -> f64 {
        mirror_scattering(&self.mirrors[k]).reflection(Self::faces(k).1)
    }

    /// Effective reflectivities `Γ_k` seen at the input-side face of each mirror,
    /// folded in from the far end.
    pub fn effective_reflections(&self, omega: SidebandFrequency) -> Vec<Complex64> {
        let n = self.mirrors.len();
        let mut gamma = vec![Complex64::new(0.0, 0.0); n];
        gamma[n - 1] = Complex64::new(self.left_reflection(n - 1), 0.0);
        for k in (0..n - 1).rev() {
            let tau = self.mirrors[k].tau();
            let p = propagation_phase(&self.segments[k], omega);
            let g = p * p * gamma[k + 1];
            gamma[k] =
                self.left_reflection(k) + tau * tau * g / (1.0 - self.right_reflection(k) * g);
        }
        gamma
    }

    /// All fields by composing single-mirror relations.
    pub fn fields(&self, omega: SidebandFrequency) -> ChainFields {
        let n = self.mirrors.len();
        let gamma = self.effective_reflections(omega);
        let mut forward = Vec::with_capacity(n - 1);
        let mut backward = Vec::with_capacity(n - 1);
        let mut incident = Complex64::new(1.0, 0.0);
        for k in 0..n - 1 {
            let tau = self.mirrors[k].tau();
            let p = propagation_phase(&self.segments[k], omega);
            let a = tau * incident / (1.0 - self.right_reflection(k) * p * p * gamma[k + 1]);
            forward.push(a);
            backward.push(gamma[k + 1] * p * a);
            incident = p * a;
        }
        ChainFields {
            reflection: gamma[0],
            transmission: self.mirrors[n - 1].tau() * incident,
            forward,
            backward,
        }
    }

    pub fn reflection(&self, omega: SidebandFrequency) -> Complex64 {
        self.effective_reflections(omega)[0]
    }
}

/// Reflectivity of the SRM–Michelson sub-cavity as seen from the TSRM side.
///
/// The SRM sits at an odd chain position, so this is
/// `-ρ_s + τ_s²·ρ_e·p² / (1 - ρ_s·ρ_e·p²)` with `p = exp(i(tuning + ΩL/c))`.
/// With zero tuning the sub-cavity is carrier resonant.
pub fn reflection_rho23(
    omega: SidebandFrequency,
    length: f64,
    srm: &MirrorSpec,
    end: &MirrorSpec,
    tuning: f64,
) -> Result<Complex64> {
    let seg = PropagationSegment::new(length, tuning)?;
    let p = propagation_phase(&seg, omega);
    let (rho_s, tau_s) = (srm.rho(), srm.tau());
    let g = p * p * end.rho();
    Ok(-rho_s + tau_s * tau_s * g / (1.0 - rho_s * g))
}
