use std::f64::consts::PI;

use serde_json::Value;
use tsr_core::cavity::{
    chain_power_response, coupling_transmission_equal_lengths, coupling_transmission_ideal,
    doublet_response, find_doublet_peaks, solve_coupling_transmission,
};
use tsr_core::noise::{compare_topologies, noise_spectral_density, CompareSetup, Topology};
use tsr_core::optics::MirrorSpec;

use crate::config::{RunConfig, TopologyConfig, Units};
use crate::error::CliError;
use crate::output::{parameter_hash, Report};

fn base_report(command: &str, cfg: &RunConfig, topology: &Topology) -> Report {
    let mut r = Report::new(command);
    r.meta("topology", topology.describe());
    r.meta("parameter_hash", parameter_hash(cfg));
    r
}

fn opt(v: Option<f64>) -> Value {
    v.map(Value::from).unwrap_or(Value::Null)
}

/// Power response around the carrier and the located resonance doublet.
pub fn run_doublet(cfg: &RunConfig) -> Result<Report, CliError> {
    let topology = cfg.resolve_topology()?;
    let chain = topology.chain(&cfg.interferometer.michelson_reflectivity)?;
    let grid = cfg.grid.values()?;
    let observable = cfg.doublet.observable;
    let response = if chain.len() >= 3 {
        doublet_response(&chain, &grid, observable)?
    } else {
        chain_power_response(&chain, &grid, observable)
    };
    let peaks = find_doublet_peaks(&grid, &response)?;

    let mut r = base_report("doublet", cfg, &topology);
    r.meta("observable", format!("{observable:?}"));
    if let Topology::Tsr { srm, .. } = topology {
        r.summarize("srm_transmissivity", srm.transmissivity());
    }
    r.summarize("f_minus_hz", peaks.f_minus);
    r.summarize("f_plus_hz", peaks.f_plus);
    r.summarize("splitting_hz", peaks.splitting());
    r.summarize("peak_minus", peaks.peak_magnitudes[0]);
    r.summarize("peak_plus", peaks.peak_magnitudes[1]);
    r.summarize("bandwidth_minus_hz", opt(peaks.bandwidths[0]));
    r.summarize("bandwidth_plus_hz", opt(peaks.bandwidths[1]));
    r.columns = vec!["frequency_hz".into(), "response".into()];
    r.rows = grid
        .iter()
        .zip(&response)
        .map(|(f, y)| vec![*f, *y])
        .collect();
    Ok(r)
}

/// Inputs of the design command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignInput {
    pub f_sp_hz: f64,
    pub l1: f64,
    pub l2: f64,
    /// Amplitude reflectivity of the effective end mirror.
    pub rho_end: f64,
}

impl DesignInput {
    /// Fills missing values from a TSR config with a designed coupling mirror.
    pub fn from_parts(
        cfg: Option<&RunConfig>,
        f_sp_hz: Option<f64>,
        l1: Option<f64>,
        l2: Option<f64>,
        rho_end: Option<f64>,
    ) -> Result<Self, CliError> {
        let (cl1, cl2) = match cfg.map(|c| c.topology) {
            Some(TopologyConfig::Tsr { l1, l2, .. }) => (Some(l1), Some(l2)),
            _ => (None, None),
        };
        let from_cfg_f = cfg.and_then(|c| c.topology.splitting_hz());
        let from_cfg_rho = cfg.map(|c| c.interferometer.michelson_reflectivity.rho());
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| {
                CliError::Config(format!(
                    "design needs {flag} (or a TSR config providing it)"
                ))
            })
        };
        Ok(Self {
            f_sp_hz: need(f_sp_hz.or(from_cfg_f), "--fsp")?,
            l1: need(l1.or(cl1), "--l1")?,
            l2: need(l2.or(cl2), "--l2")?,
            rho_end: need(rho_end.or(from_cfg_rho), "--rho-end")?,
        })
    }
}

/// Coupling transmission for a requested splitting, with closed forms for comparison.
pub fn run_design(input: &DesignInput) -> Result<Report, CliError> {
    let DesignInput {
        f_sp_hz,
        l1,
        l2,
        rho_end,
    } = *input;
    for (name, v) in [("--l1", l1), ("--l2", l2)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::config(name, format!("must be positive, got {v}")));
        }
    }
    if !f_sp_hz.is_finite() {
        return Err(CliError::config("--fsp", "must be finite"));
    }
    let end = MirrorSpec::from_amplitude(rho_end).map_err(|e| CliError::config("--rho-end", e))?;
    let w = 2.0 * PI * f_sp_hz;

    let mut r = Report::new("design");
    r.meta("l1_m", l1);
    r.meta("l2_m", l2);
    r.meta("rho_end", rho_end);
    if f_sp_hz == 0.0 {
        r.warnings
            .push("zero splitting is degenerate: the two cavities decouple and T_c = 0".into());
    }
    let general = solve_coupling_transmission(w, l1, l2, &end)?;
    r.summarize("f_sp_hz", f_sp_hz);
    r.summarize("t_c", general);
    let mut row = vec![f_sp_hz, general];
    r.columns = vec!["f_sp_hz".into(), "t_c".into()];
    if l1 == l2 {
        let equal = coupling_transmission_equal_lengths(w, l1, &end);
        let ideal = coupling_transmission_ideal(w, l1);
        let agreement = if equal > 0.0 {
            ((general - equal) / equal).abs()
        } else {
            (general - equal).abs()
        };
        r.summarize("t_c_equal_lengths", equal);
        r.summarize("t_c_perfect_end", ideal);
        r.summarize("relative_agreement", agreement);
        r.columns
            .extend(["t_c_equal_lengths".into(), "t_c_perfect_end".into()]);
        row.extend([equal, ideal]);
    }
    r.summarize("srm_reflectivity", 1.0 - general);
    r.summarize("srm_transmissivity", general);
    r.rows = vec![row];
    Ok(r)
}

/// Noise spectral density of the configured topology.
pub fn run_nsd(cfg: &RunConfig) -> Result<Report, CliError> {
    let topology = cfg.resolve_topology()?;
    let readout = cfg.readout_for(&topology);
    let grid = cfg.grid.values()?;
    let params = &cfg.interferometer;
    let mut spectrum = noise_spectral_density(&topology, params, &cfg.squeezing, &readout, &grid)?;
    if cfg.output.units == Units::Strain {
        spectrum = spectrum.to_strain(params);
    }

    let mut r = base_report("nsd", cfg, &topology);
    describe_noise_run(&mut r, cfg);
    r.meta("readout_angle_rad", readout.angle());
    let (i, v) = spectrum.minimum();
    r.summarize("min_nsd", v);
    r.summarize("min_nsd_frequency_hz", spectrum.frequencies[i]);
    r.columns = vec!["frequency_hz".into(), "nsd".into()];
    r.rows = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.nsd)
        .map(|(f, n)| vec![*f, *n])
        .collect();
    Ok(r)
}

fn describe_noise_run(r: &mut Report, cfg: &RunConfig) {
    let sq = &cfg.squeezing;
    r.meta("squeezing_enabled", sq.enabled);
    r.meta("squeezing_r", sq.r);
    r.meta("squeezing_angle_rad", sq.angle);
    r.meta(
        "units",
        match cfg.output.units {
            Units::Phase => "rad/sqrt(Hz) of differential phase",
            Units::Strain => "1/sqrt(Hz) strain",
        },
    );
}

/// TSR against detuned SR of either sideband at matched peak sensitivity.
pub fn run_compare(cfg: &RunConfig) -> Result<Report, CliError> {
    let topology = cfg.resolve_topology()?;
    let Topology::Tsr { l1, l2, srm, .. } = topology else {
        return Err(CliError::config(
            "topology.kind",
            "compare needs a \"tsr\" topology",
        ));
    };
    let cmp = cfg.compare.ok_or_else(|| {
        CliError::config("compare", "section is required for the compare command")
    })?;
    let resonance_hz = cmp
        .resonance_hz
        .or(cfg.topology.splitting_hz())
        .ok_or_else(|| {
            CliError::config(
                "compare.resonance_hz",
                "required when the coupling mirror is not designed from a splitting",
            )
        })?;
    let setup = CompareSetup {
        l1,
        l2,
        srm,
        sr_mirror: cmp.sr_mirror,
        sr_length: cmp.sr_length.unwrap_or(l2),
        resonance_hz,
    };
    let grid = cfg.grid.values()?;
    let params = &cfg.interferometer;
    let result = compare_topologies(params, &setup, &cfg.squeezing, &grid)?;
    let scale = match cfg.output.units {
        Units::Phase => 1.0,
        Units::Strain => params.strain_factor(),
    };

    let mut r = base_report("compare", cfg, &result.tsr_topology);
    r.meta("sr_upper", result.sr_upper_topology.describe());
    r.meta("sr_lower", result.sr_lower_topology.describe());
    describe_noise_run(&mut r, cfg);
    r.meta(
        "readout",
        "phase quadrature for TSR, amplitude quadrature for SR",
    );
    r.summarize(
        "matched_tsrm_reflectivity",
        result.matched_tsrm.reflectivity(),
    );
    r.summarize("match_residual", result.match_residual);
    r.summarize("peak_hz", result.peak_hz);
    r.summarize("crossover_hz", opt(result.crossover_hz));
    r.summarize("max_improvement", opt(result.max_improvement));
    r.columns = ["frequency_hz", "tsr", "sr_upper", "sr_lower", "improvement"]
        .map(String::from)
        .to_vec();
    let improvement = result.improvement();
    r.rows = (0..grid.len())
        .map(|i| {
            vec![
                grid[i],
                result.tsr.nsd[i] * scale,
                result.sr_upper.nsd[i] * scale,
                result.sr_lower.nsd[i] * scale,
                improvement[i],
            ]
        })
        .collect();
    Ok(r)
}
