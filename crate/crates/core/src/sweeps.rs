//! Experiment orchestration: flux-probe anticrossing maps, resonant
//! temperature series, Stark-shift spectroscopy and the power-to-phonon
//! calibration.

use num_complex::Complex;

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};
use crate::steady::{self, SpectrumResult};

/// 2D transmission map over (flux, probe).
#[derive(Clone, Debug)]
pub struct AnticrossingMap<T: Scalar> {
    pub flux_grid: Vec<T>,
    pub probe_grid: Vec<T>,
    /// Row i holds the spectrum at flux_grid[i].
    pub t_grid: Vec<Vec<Complex<T>>>,
    pub temperature: T,
    pub truncation_certified: bool,
}

/// Stark-shift spectroscopy result.
#[derive(Clone, Debug)]
pub struct StarkScan<T: Scalar> {
    pub power_grid: Vec<T>,
    pub drive_grid: Vec<T>,
    /// Row i holds |r|(omega_d) at power_grid[i].
    pub qubit_response: Vec<Vec<T>>,
    pub phonon_numbers: Vec<T>,
    pub dip_centers: Vec<T>,
}

/// Decade rule anchored at -134 dBm <-> one phonon.
pub fn phonon_from_power<T: Scalar>(power_dbm: T) -> T {
    real::<T>(10.0).powf((power_dbm + real::<T>(134.0)) / real::<T>(10.0))
}

/// Lorentzian reflection dip |r|(omega_d) with extinction `a`.
fn reflection_dip<T: Scalar>(drive: T, center: T, gamma: T, a: T) -> T {
    let lorentz = Complex::new(gamma / real::<T>(2.0), T::zero())
        / Complex::new(gamma / real::<T>(2.0), drive - center);
    (Complex::new(T::one(), T::zero()) - Complex::new(a, T::zero()) * lorentz).norm()
}

/// Per-power reflection traces with dip centers at the Stark + Lamb shifted
/// qubit frequency omega_a + (2<n> + 1) g^2 / Delta.
pub fn stark_scan<T: Scalar>(
    params: &DeviceParams<T>,
    qubit_freq: T,
    power_grid: &[T],
) -> Result<StarkScan<T>> {
    let delta = qubit_freq - params.omega_r;
    if delta == T::zero() {
        return Err(Error::ZeroDetuning);
    }
    if !params.is_dispersive(delta) {
        eprintln!(
            "warning: |omega_a - omega_r| = {} MHz is below 10 g = {} MHz; \
             dispersive Stark formulas degrade",
            delta.abs(),
            real::<T>(10.0) * params.g
        );
    }
    let phonon_numbers: Vec<T> = power_grid.iter().map(|&p| phonon_from_power(p)).collect();
    let dip_centers: Vec<T> = phonon_numbers
        .iter()
        .map(|&n| Ok(qubit_freq + params.stark_lamb_shift(n, delta)?))
        .collect::<Result<_>>()?;

    let lo = dip_centers.iter().cloned().fold(T::infinity(), T::min) - real::<T>(5.0) * params.gamma_q;
    let hi = dip_centers.iter().cloned().fold(T::neg_infinity(), T::max)
        + real::<T>(5.0) * params.gamma_q;
    let drive_grid = steady::linspace(lo, hi, 401);

    let extinction = T::one();
    let qubit_response = dip_centers
        .iter()
        .map(|&c| {
            drive_grid
                .iter()
                .map(|&w| reflection_dip(w, c, params.gamma_q, extinction))
                .collect()
        })
        .collect();

    Ok(StarkScan {
        power_grid: power_grid.to_vec(),
        drive_grid,
        qubit_response,
        phonon_numbers,
        dip_centers,
    })
}

/// One full steady-state spectrum per flux point.
pub fn anticrossing_map<T: Scalar>(
    params: &DeviceParams<T>,
    flux_grid: &[T],
    probe_grid: &[T],
    temperature: T,
) -> Result<AnticrossingMap<T>> {
    if flux_grid.is_empty() || probe_grid.is_empty() {
        return Err(Error::InvalidDimension("anticrossing grids are empty".into()));
    }
    let mut p = params.clone();
    p.temperature = temperature;
    let mut t_grid = Vec::with_capacity(flux_grid.len());
    let mut certified = true;
    for &flux in flux_grid {
        let flux_f64 = flux.to_f64().unwrap_or(f64::NAN);
        let wa = p
            .qubit_frequency(flux)
            .map_err(|e| e.at_map(flux_f64, f64::NAN))?;
        let spec = steady::spectrum(&p, wa, probe_grid)
            .map_err(|e| e.at_map(flux_f64, f64::NAN))?;
        certified &= spec.truncation_certified;
        t_grid.push(spec.t_values);
    }
    Ok(AnticrossingMap {
        flux_grid: flux_grid.to_vec(),
        probe_grid: probe_grid.to_vec(),
        t_grid,
        temperature,
        truncation_certified: certified,
    })
}

/// Resonant spectra, one per temperature, each at its own certified cutoff.
pub fn temperature_series<T: Scalar>(
    params: &DeviceParams<T>,
    temps: &[T],
    probe_grid: &[T],
) -> Result<Vec<SpectrumResult<T>>> {
    temps
        .iter()
        .map(|&temp| {
            let mut p = params.clone();
            p.temperature = temp;
            p.fock_cutoff = p.fock_cutoff.max(steady::auto_fock_cutoff(&p));
            steady::spectrum(&p, p.omega_r, probe_grid)
        })
        .collect()
}

/// Flux in (0, 0.5) where the qubit crosses the resonator, by bisection.
pub fn resonance_flux<T: Scalar>(params: &DeviceParams<T>) -> Result<T> {
    let tol = real::<T>(1e-6);
    let f = |flux: T| -> Result<T> { Ok(params.qubit_frequency(flux)? - params.omega_r) };
    let mut lo = real::<T>(1e-9);
    let mut hi = real::<T>(0.5) - real::<T>(1e-9);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo * fhi > T::zero() {
        return Err(Error::InvalidDimension(
            "qubit never crosses the resonator on flux in (0, 0.5)".into(),
        ));
    }
    let descending = flo > T::zero();
    while hi - lo > tol {
        let mid = (lo + hi) / real::<T>(2.0);
        let fm = f(mid)?;
        if (fm > T::zero()) == descending {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / real::<T>(2.0))
}

/// Default flux grid: `points` values spanning the window where
/// |omega_a(flux) - omega_r| <= 120 MHz around the resonance flux.
pub fn default_flux_grid<T: Scalar>(params: &DeviceParams<T>, points: usize) -> Result<Vec<T>> {
    let center = resonance_flux(params)?;
    let window = real::<T>(120.0);
    let edge = |sign: T| -> Result<T> {
        let mut lo = if sign > T::zero() { center } else { real::<T>(1e-9) };
        let mut hi = if sign > T::zero() {
            real::<T>(0.5) - real::<T>(1e-9)
        } else {
            center
        };
        // |omega_a - omega_r| grows monotonically away from the resonance
        for _ in 0..80 {
            let mid = (lo + hi) / real::<T>(2.0);
            let dev = (params.qubit_frequency(mid)? - params.omega_r).abs();
            let inside = dev <= window;
            if sign > T::zero() {
                if inside {
                    lo = mid;
                } else {
                    hi = mid;
                }
            } else if inside {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo + hi) / real::<T>(2.0))
    };
    let lo = edge(-T::one())?;
    let hi = edge(T::one())?;
    Ok(steady::linspace(lo, hi, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::find_peaks;

    #[test]
    fn decade_rule_anchors() {
        assert!((phonon_from_power(-134.0f64) - 1.0).abs() < 1e-12);
        assert!((phonon_from_power(-104.0f64) - 1000.0).abs() < 1e-9);
        assert!((phonon_from_power(-143.0f64) - 0.126).abs() < 1e-3);
        assert!((phonon_from_power(-124.0f64) - 10.0).abs() < 1e-12);
    }

    fn dispersive_params() -> (DeviceParams<f64>, f64) {
        let p = DeviceParams::<f64>::paper_defaults();
        let qubit_freq = p.omega_r + 1282.0;
        (p, qubit_freq)
    }

    #[test]
    fn stark_dip_centers_affine_in_phonons() {
        let (p, wa) = dispersive_params();
        let powers: Vec<f64> = (0..11).map(|i| -143.0 + 4.0 * i as f64).collect();
        let scan = stark_scan(&p, wa, &powers).unwrap();
        let delta = wa - p.omega_r;
        let slope = 2.0 * p.g * p.g / delta;
        for (i, (&n, &c)) in scan.phonon_numbers.iter().zip(&scan.dip_centers).enumerate() {
            let expect = wa + slope * n + p.g * p.g / delta;
            assert!((c - expect).abs() < 1e-12, "power index {i}");
        }
        for w in scan.phonon_numbers.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn stark_slope_value() {
        let (p, wa) = dispersive_params();
        let delta = wa - p.omega_r;
        let slope = 2.0 * p.g * p.g / delta;
        assert!((slope - 0.534).abs() < 1e-3);
        // n = 21 shift exceeds both linewidths
        assert!(21.0 * slope > p.gamma_q);
        assert!(21.0 * slope > p.kappa);
    }

    #[test]
    fn stark_trace_dips_at_center() {
        let (p, wa) = dispersive_params();
        let scan = stark_scan(&p, wa, &[-134.0]).unwrap();
        let trace = &scan.qubit_response[0];
        let min_idx = trace
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((scan.drive_grid[min_idx] - scan.dip_centers[0]).abs() < 0.5);
        // full extinction on resonance
        assert!(reflection_dip(scan.dip_centers[0], scan.dip_centers[0], p.gamma_q, 1.0) < 1e-12);
    }

    #[test]
    fn stark_rejects_zero_detuning() {
        let (p, _) = dispersive_params();
        assert!(matches!(
            stark_scan(&p, p.omega_r, &[-134.0]),
            Err(Error::ZeroDetuning)
        ));
    }

    #[test]
    fn resonance_flux_crosses_omega_r() {
        let p = DeviceParams::<f64>::paper_defaults();
        let flux = resonance_flux(&p).unwrap();
        let wa = p.qubit_frequency(flux).unwrap();
        assert!((wa - p.omega_r).abs() < 0.1, "wa = {wa}");
    }

    #[test]
    fn default_flux_grid_spans_window() {
        let p = DeviceParams::<f64>::paper_defaults();
        let grid = default_flux_grid(&p, 21).unwrap();
        assert_eq!(grid.len(), 21);
        for &f in &grid {
            let dev = (p.qubit_frequency(f).unwrap() - p.omega_r).abs();
            assert!(dev <= 120.0 + 0.5, "deviation {dev}");
        }
        let first = (p.qubit_frequency(grid[0]).unwrap() - p.omega_r).abs();
        let last = (p.qubit_frequency(*grid.last().unwrap()).unwrap() - p.omega_r).abs();
        assert!(first > 110.0 && last > 110.0);
    }

    #[test]
    fn small_anticrossing_map_shape_and_splitting() {
        let mut p = DeviceParams::<f64>::paper_defaults();
        p.gamma_q = 7.90;
        p.fock_cutoff = 6;
        let flux = resonance_flux(&p).unwrap();
        let flux_grid = [flux];
        let probe_grid: Vec<f64> = (0..161)
            .map(|i| p.omega_r - 40.0 + 0.5 * i as f64)
            .collect();
        let map = anticrossing_map(&p, &flux_grid, &probe_grid, 16.5).unwrap();
        assert_eq!(map.t_grid.len(), 1);
        assert_eq!(map.t_grid[0].len(), probe_grid.len());
        let heights: Vec<f64> = map.t_grid[0].iter().map(|t| t.norm()).collect();
        let peaks = find_peaks(&probe_grid, &heights, 0.05);
        assert_eq!(peaks.len(), 2);
        assert!((peaks[1].0 - peaks[0].0 - 37.0).abs() < 1.0);
    }

    #[test]
    fn temperature_series_peak_merge() {
        let mut p = DeviceParams::<f64>::paper_defaults();
        p.gamma_q = 7.90;
        p.transmon_levels = 2;
        let probe_grid: Vec<f64> = (0..161)
            .map(|i| p.omega_r - 40.0 + 0.5 * i as f64)
            .collect();
        let series = temperature_series(&p, &[16.5, 349.0], &probe_grid).unwrap();
        let peaks_per: Vec<usize> = series
            .iter()
            .map(|s| {
                let h: Vec<f64> = s.t_values.iter().map(|t| t.norm()).collect();
                find_peaks(&probe_grid, &h, 0.05).len()
            })
            .collect();
        assert_eq!(peaks_per, vec![2, 1]);
    }
}
