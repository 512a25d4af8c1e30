//! Dense steady-state solve of a mirror chain.
//!
//! Every mirror contributes two scattering equations; the unknowns are the
//! forward and backward fields in each segment plus the two outgoing fields.
//! The system is solved directly with complex LU, independently of the
//! recursive composition in [`CavityChain::fields`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::chain::CavityChain;
use crate::error::{Error, Result};
use crate::optics::{propagation_phase, SidebandFrequency};

/// Fields solved by [`network_oracle_driven`]. Layout matches
/// [`ChainFields`](super::ChainFields); `reflection` leaves mirror 0 towards the
/// input side and `transmission` leaves the last mirror on the far side.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFields {
    pub reflection: Complex64,
    pub transmission: Complex64,
    pub forward: Vec<Complex64>,
    pub backward: Vec<Complex64>,
}

/// Unit drive on the input side only.
pub fn network_oracle(chain: &CavityChain, omega: SidebandFrequency) -> Result<OracleFields> {
    network_oracle_driven(
        chain,
        omega,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
    )
}

/// Drives the chain with `from_left` on mirror 0 and `from_right` on the last mirror.
pub fn network_oracle_driven(
    chain: &CavityChain,
    omega: SidebandFrequency,
    from_left: Complex64,
    from_right: Complex64,
) -> Result<OracleFields> {
    let n = chain.len();
    let s = n - 1;
    let dim = 2 * s + 2;
    let fwd = |k: usize| k;
    let bwd = |k: usize| s + k;
    let refl = 2 * s;
    let trans = 2 * s + 1;

    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut a = DMatrix::from_element(dim, dim, zero);
    let mut rhs = DVector::from_element(dim, zero);
    let phases: Vec<Complex64> = chain
        .segments()
        .iter()
        .map(|seg| propagation_phase(seg, omega))
        .collect();

    for k in 0..n {
        let tau = chain.mirrors()[k].tau();
        let r_left = chain.left_reflection(k);
        let r_right = chain.right_reflection(k);
        let (row_l, row_r) = (2 * k, 2 * k + 1);

        // out_left - r_left·in_left - tau·in_right = 0
        // out_right - tau·in_left - r_right·in_right = 0
        a[(row_l, if k == 0 { refl } else { bwd(k - 1) })] += one;
        a[(row_r, if k == n - 1 { trans } else { fwd(k) })] += one;

        if k == 0 {
            rhs[row_l] += r_left * from_left;
            rhs[row_r] += tau * from_left;
        } else {
            let p = phases[k - 1];
            a[(row_l, fwd(k - 1))] -= r_left * p;
            a[(row_r, fwd(k - 1))] -= tau * p;
        }

        if k == n - 1 {
            rhs[row_l] += tau * from_right;
            rhs[row_r] += r_right * from_right;
        } else {
            let p = phases[k];
            a[(row_l, bwd(k))] -= tau * p;
            a[(row_r, bwd(k))] -= r_right * p;
        }
    }

    let x = a.lu().solve(&rhs).ok_or(Error::SingularSystem {
        omega: omega.omega(),
    })?;
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularSystem {
            omega: omega.omega(),
        });
    }

    Ok(OracleFields {
        reflection: x[refl],
        transmission: x[trans],
        forward: (0..s).map(|k| x[fwd(k)]).collect(),
        backward: (0..s).map(|k| x[bwd(k)]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{MirrorSpec, PropagationSegment};

    #[test]
    fn perfect_resonator_is_singular() {
        let chain = CavityChain::new(
            vec![MirrorSpec::perfect(), MirrorSpec::perfect()],
            vec![PropagationSegment::new(10.0, 0.0).unwrap()],
        )
        .unwrap();
        let err = network_oracle(&chain, SidebandFrequency::from_hz(0.0)).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }

    #[test]
    fn single_pass_through_transparent_chain() {
        let seg = PropagationSegment::new(100.0, 0.25).unwrap();
        let chain = CavityChain::new(
            vec![MirrorSpec::transparent(), MirrorSpec::transparent()],
            vec![seg],
        )
        .unwrap();
        let omega = SidebandFrequency::from_hz(500.0);
        let f = network_oracle(&chain, omega).unwrap();
        assert!(f.reflection.norm() < 1e-15);
        assert!((f.transmission - propagation_phase(&seg, omega)).norm() < 1e-15);
    }
}
