use serde::{Deserialize, Serialize};

use super::chain::CavityChain;
use crate::error::{Error, Result};
use crate::optics::SidebandFrequency;

/// Power observable used to display the resonance doublet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubletObservable {
    /// Circulating power in the cavity behind the input mirror.
    #[default]
    InputCavity,
    /// Power leaving through the far mirror of the chain.
    EndTransmission,
}

/// Locations, heights and widths of the two doublet peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubletResult {
    pub f_minus: f64,
    pub f_plus: f64,
    pub peak_magnitudes: [f64; 2],
    /// Full width at half maximum, Hz. `None` if neither half-maximum
    /// crossing of a peak lies inside the sampled range.
    pub bandwidths: [Option<f64>; 2],
}

impl DoubletResult {
    pub fn splitting(&self) -> f64 {
        self.f_plus - self.f_minus
    }
}

/// Power response of a carrier-tuned chain of at least three mirrors on a
/// grid of sideband offsets in Hz, for unit input power.
pub fn doublet_response(
    chain: &CavityChain,
    grid_hz: &[f64],
    observable: DoubletObservable,
) -> Result<Vec<f64>> {
    if chain.len() < 3 {
        return Err(Error::InvalidChain(format!(
            "a resonance doublet needs three mirrors, got {}",
            chain.len()
        )));
    }
    if !chain.is_carrier_tuned() {
        return Err(Error::InvalidChain(
            "doublet response expects a carrier-tuned chain (all tunings zero)".into(),
        ));
    }
    Ok(chain_power_response(chain, grid_hz, observable))
}

/// Same observable for any chain, without the doublet preconditions.
pub fn chain_power_response(
    chain: &CavityChain,
    grid_hz: &[f64],
    observable: DoubletObservable,
) -> Vec<f64> {
    grid_hz
        .iter()
        .map(|&f| {
            let fields = chain.fields(SidebandFrequency::from_hz(f));
            match observable {
                DoubletObservable::InputCavity => fields.forward[0].norm_sqr(),
                DoubletObservable::EndTransmission => fields.transmission.norm_sqr(),
            }
        })
        .collect()
}

/// Finds the two strongest local maxima of a sampled response, refines them
/// by a parabola through the log-magnitude of the three nearest samples and
/// measures their full widths at half maximum.
pub fn find_doublet_peaks(frequencies: &[f64], response: &[f64]) -> Result<DoubletResult> {
    if frequencies.len() != response.len() {
        return Err(Error::InvalidGrid(format!(
            "{} frequencies but {} response values",
            frequencies.len(),
            response.len()
        )));
    }
    if frequencies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(
            "frequencies must be strictly increasing".into(),
        ));
    }
    let n = response.len();
    let mut maxima: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&i| response[i] > response[i - 1] && response[i] >= response[i + 1])
        .collect();
    if maxima.len() < 2 {
        return Err(Error::PeaksNotFound {
            found: maxima.len(),
        });
    }
    maxima.sort_by(|&a, &b| response[b].total_cmp(&response[a]));
    let mut pair = [maxima[0], maxima[1]];
    pair.sort_unstable();

    let refined = pair.map(|i| refine_peak(frequencies, response, i));
    let bandwidths = [0, 1].map(|k| half_max_width(frequencies, response, pair[k], refined[k].1));
    Ok(DoubletResult {
        f_minus: refined[0].0,
        f_plus: refined[1].0,
        peak_magnitudes: [refined[0].1, refined[1].1],
        bandwidths,
    })
}

fn refine_peak(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1].ln(), y[i].ln(), y[i + 1].ln());
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 || !den.is_finite() || !num.is_finite() {
        return (x1, y[i]);
    }
    let xv = x1 - 0.5 * num / den;
    if !(x0..=x2).contains(&xv) {
        return (x1, y[i]);
    }
    // Lagrange form of the same parabola evaluated at the vertex
    let l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    (xv, (l0 * y0 + l1 * y1 + l2 * y2).exp())
}

fn half_max_width(x: &[f64], y: &[f64], i: usize, peak: f64) -> Option<f64> {
    let half = 0.5 * peak;
    let left = (0..i)
        .rev()
        .find(|&j| y[j] < half)
        .map(|j| x[j] + (half - y[j]) * (x[j + 1] - x[j]) / (y[j + 1] - y[j]));
    let right = (i + 1..y.len())
        .find(|&j| y[j] < half)
        .map(|j| x[j - 1] + (half - y[j - 1]) * (x[j] - x[j - 1]) / (y[j] - y[j - 1]));
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (x[i] - l)),
        (None, Some(r)) => Some(2.0 * (r - x[i])),
        (None, None) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentzian(f: f64, f0: f64, hwhm: f64) -> f64 {
        1.0 / (1.0 + ((f - f0) / hwhm).powi(2))
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn two_lorentzians_are_located() {
        let f = grid(-3000.0, 3000.0, 3001);
        let y: Vec<f64> = f
            .iter()
            .map(|&x| lorentzian(x, -1003.3, 150.0) + lorentzian(x, 1003.3, 150.0))
            .collect();
        let d = find_doublet_peaks(&f, &y).unwrap();
        assert!((d.f_plus - 1003.3).abs() < 0.5, "{d:?}");
        assert!((d.f_minus + 1003.3).abs() < 0.5);
        let bw = d.bandwidths[1].unwrap();
        assert!((bw - 300.0).abs() / 300.0 < 0.02, "{bw}");
    }

    #[test]
    fn single_resonance_has_no_doublet() {
        let f = grid(-3000.0, 3000.0, 601);
        let y: Vec<f64> = f.iter().map(|&x| lorentzian(x, 0.0, 200.0)).collect();
        assert_eq!(
            find_doublet_peaks(&f, &y).unwrap_err(),
            Error::PeaksNotFound { found: 1 }
        );
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        assert!(find_doublet_peaks(&[0.0, 1.0], &[1.0]).is_err());
        assert!(find_doublet_peaks(&[0.0, 0.0, 1.0], &[1.0, 2.0, 1.0]).is_err());
    }
}
