use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use tsr_core::cavity::coupling_transmission_ideal;
use tsr_core::noise::*;
use tsr_core::optics::*;

fn srm() -> MirrorSpec {
    MirrorSpec::from_transmissivity(coupling_transmission_ideal(2.0 * PI * 1000.0, 1200.0)).unwrap()
}

fn tsr(tsrm_r: f64) -> Topology {
    Topology::Tsr {
        l1: 1200.0,
        l2: 1200.0,
        srm: srm(),
        tsrm: MirrorSpec::lossless(tsrm_r).unwrap(),
    }
}

fn sr(side: Sideband) -> Topology {
    Topology::detuned_sr_resonant_at(1000.0, side, MirrorSpec::lossless(0.991).unwrap(), 1200.0)
}

fn lossless() -> InterferometerParams {
    InterferometerParams {
        michelson_reflectivity: MirrorSpec::perfect(),
        ..InterferometerParams::canonical()
    }
}

fn grid() -> Vec<f64> {
    FrequencyGrid::default().values().unwrap()
}

/// Solves the quadrature field equations of the whole dark-port network at
/// once. Unknowns per segment are the 2-vectors leaving its left mirror
/// rightwards and its right mirror leftwards, plus the output field.
fn dense_io(topology: &Topology, params: &InterferometerParams, f: f64) -> QuadratureTransfer {
    let omega = SidebandFrequency::from_hz(f);
    let chain = topology.chain(&params.michelson_reflectivity).unwrap();
    let n = chain.len();
    let s = n - 1;
    let dim = 2 * (2 * s + 1);
    let fwd = |k: usize| 2 * k;
    let bwd = |k: usize| 2 * (s + k);
    let out = 2 * (2 * s);
    let c = |x: f64| Complex64::new(x, 0.0);
    let k = params.coupling_constant(omega.omega());
    let end = Quad::new(c(1.0), c(0.0), c(-k), c(1.0)) * c(chain.left_reflection(n - 1));
    let props: Vec<Quad> = chain
        .segments()
        .iter()
        .map(|seg| propagation_matrix(seg, omega))
        .collect();

    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    // three right-hand sides: unit amplitude input, unit phase input, signal
    let mut rhs = DMatrix::<Complex64>::zeros(dim, 3);
    let put = |a: &mut DMatrix<Complex64>, row: usize, col: usize, m: Quad| {
        for i in 0..2 {
            for j in 0..2 {
                a[(row + i, col + j)] += m[(i, j)];
            }
        }
    };
    let id = Quad::identity();
    let mut row = 0;
    for m in 0..n {
        if m == n - 1 {
            // b_{s-1} = end · P · a_{s-1} + signal
            put(&mut a, row, bwd(s - 1), id);
            put(&mut a, row, fwd(s - 1), -end * props[s - 1]);
            rhs[(row + 1, 2)] = c(params.carrier_amplitude());
            row += 2;
            continue;
        }
        let tau = c(chain.mirrors()[m].tau());
        let (rl, rr) = (c(chain.left_reflection(m)), c(chain.right_reflection(m)));
        let from_right = props[m];
        // field leaving towards the input side
        let left_out = if m == 0 { out } else { bwd(m - 1) };
        put(&mut a, row, left_out, id);
        put(&mut a, row, bwd(m), -from_right * tau);
        // field leaving towards the far side
        put(&mut a, row + 2, fwd(m), id);
        put(&mut a, row + 2, bwd(m), -from_right * rr);
        if m == 0 {
            rhs[(row, 0)] = rl;
            rhs[(row + 1, 1)] = rl;
            rhs[(row + 2, 0)] = tau;
            rhs[(row + 3, 1)] = tau;
        } else {
            let from_left = props[m - 1];
            put(&mut a, row, fwd(m - 1), -from_left * rl);
            put(&mut a, row + 2, fwd(m - 1), -from_left * tau);
        }
        row += 4;
    }
    assert_eq!(row, dim);
    let x = a.lu().solve(&rhs).unwrap();
    let col = |j: usize| DVector::from_iterator(2, (0..2).map(|i| x[(out + i, j)]));
    let (c0, c1, sig) = (col(0), col(1), col(2));
    QuadratureTransfer {
        matrix: Quad::new(c0[0], c1[0], c0[1], c1[1]),
        signal: QuadVec::new(sig[0], sig[1]),
    }
}

fn assert_transfer_close(a: &QuadratureTransfer, b: &QuadratureTransfer, tol: f64) {
    let scale = b.matrix.norm().max(1.0);
    assert!(
        (a.matrix - b.matrix).norm() <= tol * scale,
        "{} vs {}",
        a.matrix,
        b.matrix
    );
    let scale = b.signal.norm().max(1.0);
    assert!((a.signal - b.signal).norm() <= tol * scale);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn io_relation_matches_dense_solve(
        tsrm_r in 0.5..0.999f64,
        sr_r in 0.5..0.999f64,
        detuning in -PI..PI,
        f in 1.0..1e4f64,
        power in 1.0..2e4f64,
    ) {
        let params = InterferometerParams { power_at_bs: power, ..InterferometerParams::canonical() };
        let topologies = [
            tsr(tsrm_r),
            Topology::DetunedSr { detuning, recycling_mirror: MirrorSpec::lossless(sr_r).unwrap(), length: 700.0 },
        ];
        for topo in topologies {
            let composed = io_relation(&topo, &params, SidebandFrequency::from_hz(f)).unwrap();
            assert_transfer_close(&composed, &dense_io(&topo, &params, f), 1e-10);
        }
    }
}

#[test]
fn lossless_transfer_is_symplectic_on_grid() {
    let params = lossless();
    for topo in [tsr(0.963), sr(Sideband::Upper), sr(Sideband::Lower)] {
        for f in grid() {
            let t = io_relation(&topo, &params, SidebandFrequency::from_hz(f)).unwrap();
            assert!((t.determinant().norm() - 1.0).abs() < 1e-10, "{f}");
        }
    }
}

#[test]
fn tsr_signal_purity_without_back_action() {
    let params = InterferometerParams::canonical();
    for f in grid() {
        let t = io_relation_with(
            &tsr(0.963),
            &params,
            SidebandFrequency::from_hz(f),
            BackAction::Disabled,
        )
        .unwrap();
        assert!(t.signal[0].norm() < 1e-10 * t.signal[1].norm());
    }
}

#[test]
fn tsr_sidebands_respond_identically() {
    let params = InterferometerParams::canonical();
    for f in grid() {
        let [up, down] = sideband_signal_moduli(
            &tsr(0.963),
            &params,
            SidebandFrequency::from_hz(f),
            BackAction::Enabled,
        )
        .unwrap();
        assert!((up - down).abs() < 1e-10 * up);
    }
}

#[test]
fn transparent_recycling_without_back_action_is_a_delay() {
    let topo = Topology::Tsr {
        l1: 300.0,
        l2: 900.0,
        srm: MirrorSpec::transparent(),
        tsrm: MirrorSpec::transparent(),
    };
    let t = io_relation_with(
        &topo,
        &lossless(),
        SidebandFrequency::from_hz(123.0),
        BackAction::Disabled,
    )
    .unwrap();
    let phase = t.matrix[(0, 0)];
    assert!((phase.norm() - 1.0).abs() < 1e-14);
    assert!((t.matrix / phase - Quad::identity()).norm() < 1e-14);
}

#[test]
fn tsr_sensitivity_peaks_near_the_optical_resonance() {
    let params = InterferometerParams::canonical();
    let s = noise_spectral_density(
        &tsr(0.963),
        &params,
        &SqueezedInput::vacuum(),
        &HomodyneReadout::phase(),
        &grid(),
    )
    .unwrap();
    let (i, _) = s.minimum();
    assert!(
        (s.frequencies[i] - 1000.0).abs() < 60.0,
        "{}",
        s.frequencies[i]
    );
}

#[test]
fn squeezing_reaches_full_factor_on_resonance() {
    let params = InterferometerParams::canonical();
    let (f_pk, _) =
        peak_sensitivity(&tsr(0.963), &params, &HomodyneReadout::phase(), 1000.0).unwrap();
    let readout = HomodyneReadout::phase();
    let t = io_relation(&tsr(0.963), &params, SidebandFrequency::from_hz(f_pk)).unwrap();
    let angle = optimal_squeeze_angle(&t, &readout);
    let g = [f_pk];
    let vac = noise_spectral_density(&tsr(0.963), &params, &SqueezedInput::vacuum(), &readout, &g)
        .unwrap();
    let sq = noise_spectral_density(
        &tsr(0.963),
        &params,
        &SqueezedInput::new(1.0, angle).unwrap(),
        &readout,
        &g,
    )
    .unwrap();
    let ratio = sq.nsd[0] / vac.nsd[0];
    assert!((ratio / (-1f64).exp() - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn more_squeezing_is_better_in_the_shot_noise_band() {
    let params = InterferometerParams::canonical();
    let readout = HomodyneReadout::phase();
    let topo = tsr(0.963);
    let band: Vec<f64> = grid().into_iter().filter(|&f| f >= 100.0).collect();
    let at = |r: f64, f: f64| {
        let omega = SidebandFrequency::from_hz(f);
        let t = io_relation(&topo, &params, omega).unwrap();
        let sq = SqueezedInput::new(r, optimal_squeeze_angle(&t, &readout)).unwrap();
        nsd_of(&t, &input_covariance(&sq, omega), &readout)
    };
    let rs = [0.0, 0.25, 0.5, 1.0, 1.5];
    for &f in &band {
        for w in rs.windows(2) {
            assert!(at(w[1], f) < at(w[0], f), "{f} {w:?}");
        }
    }
}

#[test]
fn disabled_and_zero_squeezing_are_bit_identical() {
    let params = InterferometerParams::canonical();
    for topo in [tsr(0.963), sr(Sideband::Lower)] {
        let off = noise_spectral_density(
            &topo,
            &params,
            &SqueezedInput::vacuum(),
            &HomodyneReadout::phase(),
            &grid(),
        )
        .unwrap();
        let zero = SqueezedInput {
            r: 0.0,
            angle: 0.7,
            enabled: true,
        };
        let on = noise_spectral_density(&topo, &params, &zero, &HomodyneReadout::phase(), &grid())
            .unwrap();
        assert_eq!(off.nsd, on.nsd);
    }
}

#[test]
fn back_action_vanishes_at_low_power() {
    let params = InterferometerParams {
        power_at_bs: 1e-3,
        ..InterferometerParams::canonical()
    };
    for topo in [tsr(0.963), sr(Sideband::Lower), sr(Sideband::Upper)] {
        let readout = default_readout(&topo);
        let g = [10.0];
        let sq = SqueezedInput::vacuum();
        let with = noise_spectral_density(&topo, &params, &sq, &readout, &g).unwrap();
        let without =
            noise_spectral_density_with(&topo, &params, &sq, &readout, &g, BackAction::Disabled)
                .unwrap();
        assert!(((with.nsd[0] - without.nsd[0]) / without.nsd[0]).abs() < 1e-6);
    }
}

#[test]
fn sr_sidebands_agree_without_back_action() {
    let params = InterferometerParams::canonical();
    let readout = HomodyneReadout::amplitude();
    let sq = SqueezedInput::vacuum();
    let up = noise_spectral_density_with(
        &sr(Sideband::Upper),
        &params,
        &sq,
        &readout,
        &grid(),
        BackAction::Disabled,
    )
    .unwrap();
    let lo = noise_spectral_density_with(
        &sr(Sideband::Lower),
        &params,
        &sq,
        &readout,
        &grid(),
        BackAction::Disabled,
    )
    .unwrap();
    for (a, b) in up.nsd.iter().zip(&lo.nsd) {
        assert!(((a - b) / b).abs() < 1e-10);
    }
}

#[test]
fn transparent_tsrm_reduces_to_tuned_sr() {
    let params = InterferometerParams::canonical();
    let twin = Topology::Tsr {
        l1: 1200.0,
        l2: 1200.0,
        srm: MirrorSpec::lossless(0.9).unwrap(),
        tsrm: MirrorSpec::transparent(),
    };
    let single = Topology::DetunedSr {
        detuning: 0.0,
        recycling_mirror: MirrorSpec::lossless(0.9).unwrap(),
        length: 1200.0,
    };
    let readout = HomodyneReadout::phase();
    let sq = SqueezedInput::new(0.5, 1.2).unwrap();
    let a = noise_spectral_density(&twin, &params, &sq, &readout, &grid()).unwrap();
    let b = noise_spectral_density(&single, &params, &sq, &readout, &grid()).unwrap();
    for (x, y) in a.nsd.iter().zip(&b.nsd) {
        assert!(((x - y) / y).abs() < 1e-9);
    }
}

fn local_minima(f: &[f64], v: &[f64]) -> Vec<f64> {
    (1..v.len() - 1)
        .filter(|&i| v[i] < v[i - 1] && v[i] < v[i + 1])
        .map(|i| f[i])
        .collect()
}

#[test]
fn optical_spring_only_in_lower_sideband_sr() {
    let params = InterferometerParams::canonical();
    let low = FrequencyGrid::log(1.0, 100.0, 600).values().unwrap();
    let sq = SqueezedInput::vacuum();
    let lower = noise_spectral_density(
        &sr(Sideband::Lower),
        &params,
        &sq,
        &HomodyneReadout::amplitude(),
        &low,
    )
    .unwrap();
    let twin =
        noise_spectral_density(&tsr(0.963), &params, &sq, &HomodyneReadout::phase(), &low).unwrap();
    let dips = local_minima(&low, &lower.nsd);
    assert!(dips.iter().any(|&f| f < 50.0), "{dips:?}");
    assert!(local_minima(&low, &twin.nsd).is_empty());
}

#[test]
fn zero_in_grid_is_degenerate() {
    let err = noise_spectral_density(
        &tsr(0.963),
        &InterferometerParams::canonical(),
        &SqueezedInput::vacuum(),
        &HomodyneReadout::phase(),
        &[0.0, 1.0],
    )
    .unwrap_err();
    assert_eq!(err, tsr_core::Error::DegenerateFrequency);
}

#[test]
fn matched_comparison_structure() {
    let params = InterferometerParams::canonical();
    let setup = CompareSetup {
        l1: 1200.0,
        l2: 1200.0,
        srm: srm(),
        sr_mirror: MirrorSpec::lossless(0.991).unwrap(),
        sr_length: 1200.0,
        resonance_hz: 1000.0,
    };
    let r = compare_topologies(&params, &setup, &SqueezedInput::vacuum(), &grid()).unwrap();
    assert!(r.match_residual.abs() < 1e-9);
    assert!((r.matched_tsrm.reflectivity() - 0.963).abs() < 1e-3);
    let c = r.crossover_hz.unwrap();
    assert!((10.0..=100.0).contains(&c), "{c}");
    let m = r.max_improvement.unwrap();
    assert!(m > 1.0 && m <= 2.5, "{m}");

    let squeezed = compare_topologies(
        &params,
        &setup,
        &SqueezedInput::new(1.0, 0.0).unwrap(),
        &grid(),
    )
    .unwrap();
    assert!(squeezed.crossover_hz.unwrap() <= 100.0);
}
