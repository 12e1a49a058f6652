//! Acceptance gate: one pass/fail line per criterion, all evaluated before
//! the final assert so a single regression never hides the others.

use std::time::Instant;

use num_complex::Complex;

use cqad::config::emit_spectrum_csv;
use cqad::device::{bose_einstein, crossover_temperature, DeviceParams};
use cqad::lindblad::build_liouvillian;
use cqad::secular::secular_spectrum;
use cqad::steady::{
    auto_fock_cutoff, certify_truncation, find_peaks, linspace, solve_steady_state, spectrum,
    SpectrumResult,
};
use cqad::sweeps::{anticrossing_map, phonon_from_power, resonance_flux, temperature_series};

const PROMINENCE: f64 = 0.05;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new() }
    }

    fn report(&mut self, idx: usize, name: &str, result: Result<(), String>) {
        match result {
            Ok(()) => println!("criterion {idx:2} PASS  {name}"),
            Err(why) => {
                println!("criterion {idx:2} FAIL  {name}: {why}");
                self.failures.push(format!("{idx}: {name}: {why}"));
            }
        }
    }
}

fn fig5g_params() -> DeviceParams<f64> {
    let mut p = DeviceParams::paper_defaults();
    p.gamma_q = 7.90;
    p
}

fn heights(result: &SpectrumResult<f64>) -> Vec<f64> {
    result.t_values.iter().map(|t| t.norm()).collect()
}

fn check(cond: bool, why: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why)
    }
}

/// Criterion 1: vacuum Rabi splitting, 5 levels, 401 points, < 60 s.
fn criterion_1(out: &mut Option<SpectrumResult<f64>>) -> Result<(), String> {
    let mut p = fig5g_params();
    p.fock_cutoff = auto_fock_cutoff(&p);
    let grid = linspace(p.omega_r - 60.0, p.omega_r + 60.0, 401);
    let start = Instant::now();
    let result = spectrum(&p, p.omega_r, &grid).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let peaks = find_peaks(&grid, &heights(&result), PROMINENCE);
    check(peaks.len() == 2, format!("expected 2 peaks, found {}", peaks.len()))?;
    check(
        (peaks[0].0 - (p.omega_r - 18.5)).abs() < 1.0,
        format!("lower peak at {:.3}", peaks[0].0),
    )?;
    check(
        (peaks[1].0 - (p.omega_r + 18.5)).abs() < 1.0,
        format!("upper peak at {:.3}", peaks[1].0),
    )?;
    check(result.truncation_certified, "truncation not certified".into())?;
    check(elapsed < 60.0, format!("took {elapsed:.1} s"))?;
    *out = Some(result);
    Ok(())
}

/// Criterion 2: bare-cavity closed form to 1e-6 everywhere.
fn criterion_2(certs: &mut Vec<bool>) -> Result<(), String> {
    let mut p = DeviceParams::paper_defaults();
    p.g = 0.0;
    p.temperature = 0.0;
    p.transmon_levels = 2;
    p.fock_cutoff = 10;
    let grid = linspace(p.omega_r - 20.0, p.omega_r + 20.0, 101);
    let result = spectrum(&p, p.omega_r, &grid).map_err(|e| e.to_string())?;
    certs.push(result.truncation_certified);
    for (&w, t) in grid.iter().zip(&result.t_values) {
        let oracle = Complex::new(p.kappa / 2.0, 0.0) / Complex::new(p.kappa / 2.0, p.omega_r - w);
        let diff = (t - oracle).norm();
        check(diff < 1e-6, format!("|dt| = {diff:.2e} at {w} MHz"))?;
    }
    Ok(())
}

/// Criterion 3: undriven decoupled cavity thermalizes to Gibbs weights.
fn criterion_3() -> Result<(), String> {
    for temp in [50.5, 98.5, 349.0] {
        let mut p = DeviceParams::paper_defaults();
        p.g = 0.0;
        p.epsilon = 0.0;
        p.transmon_levels = 2;
        p.temperature = temp;
        let n_th: f64 = bose_einstein(p.omega_r, temp);
        let x = n_th / (n_th + 1.0);
        // the truncated normalization differs from (1-x) by x^N
        let mut cutoff = 10usize;
        while x.powi(cutoff as i32) > 1e-9 {
            cutoff += 1;
        }
        p.fock_cutoff = cutoff;
        let l = build_liouvillian(&p, p.omega_r, p.omega_r).map_err(|e| e.to_string())?;
        let rho = solve_steady_state(&l).map_err(|e| e.to_string())?;
        for (n, pop) in rho.fock_populations().iter().enumerate() {
            let gibbs = (1.0 - x) * x.powi(n as i32);
            let diff = (pop - gibbs).abs();
            check(
                diff < 1e-8,
                format!("T = {temp} mK, n = {n}: |dp| = {diff:.2e}"),
            )?;
        }
    }
    Ok(())
}

/// Criterion 4: secular oracle vs numerics at 16.5 mK, two levels.
fn criterion_4(certs: &mut Vec<bool>) -> Result<(), String> {
    let mut p = fig5g_params();
    p.transmon_levels = 2;
    p.fock_cutoff = auto_fock_cutoff(&p);
    let grid = linspace(p.omega_r - 60.0, p.omega_r + 60.0, 481);
    let numeric = spectrum(&p, p.omega_r, &grid).map_err(|e| e.to_string())?;
    certs.push(numeric.truncation_certified);
    let (_, analytic) = secular_spectrum(&p, p.omega_r, &grid).map_err(|e| e.to_string())?;
    let h_num = heights(&numeric);
    let h_ana: Vec<f64> = analytic.iter().map(|t| t.norm()).collect();
    let peaks_num = find_peaks(&grid, &h_num, PROMINENCE);
    let peaks_ana = find_peaks(&grid, &h_ana, PROMINENCE);
    check(
        peaks_num.len() == peaks_ana.len(),
        format!("{} numeric vs {} secular peaks", peaks_num.len(), peaks_ana.len()),
    )?;
    let beta = (p.gamma_q + p.kappa) / 4.0;
    for (pn, pa) in peaks_num.iter().zip(&peaks_ana) {
        check(
            (pn.0 - pa.0).abs() < beta,
            format!("positions {:.3} vs {:.3} differ beyond beta = {beta:.3}", pn.0, pa.0),
        )?;
        let rel = (pn.1 - pa.1).abs() / pn.1;
        check(rel < 0.2, format!("height mismatch {:.1}%", 100.0 * rel))?;
    }
    Ok(())
}

/// Criterion 5: four-peak regime of Fig. 5(h).
fn criterion_5(certs: &mut Vec<bool>) -> Result<(), String> {
    let mut p = DeviceParams::paper_defaults();
    p.transmon_levels = 2;
    p.kappa = 0.4;
    p.gamma_q = 6.0;
    p.epsilon = p.kappa / 20.0;
    p.temperature = 98.5;
    p.fock_cutoff = auto_fock_cutoff(&p);
    let grid = linspace(p.omega_r - 60.0, p.omega_r + 60.0, 481);
    let result = spectrum(&p, p.omega_r, &grid).map_err(|e| e.to_string())?;
    certs.push(result.truncation_certified);
    let peaks = find_peaks(&grid, &heights(&result), PROMINENCE);
    check(peaks.len() == 4, format!("expected 4 peaks, found {}", peaks.len()))?;
    let inner_target = p.g * (2f64.sqrt() - 1.0);
    check(
        (peaks[1].0 - (p.omega_r - inner_target)).abs() < 1.5,
        format!("inner lower peak at {:.3}", peaks[1].0),
    )?;
    check(
        (peaks[2].0 - (p.omega_r + inner_target)).abs() < 1.5,
        format!("inner upper peak at {:.3}", peaks[2].0),
    )?;
    Ok(())
}

/// Criterion 6: quantum-to-classical crossover temperature series.
fn criterion_6(certs: &mut Vec<bool>) -> Result<(), String> {
    let mut p = DeviceParams::paper_defaults();
    p.transmon_levels = 2;
    let temps = [16.5, 50.5, 98.5, 149.0, 200.0, 254.0, 349.0];
    let grid = linspace(p.omega_r - 30.0, p.omega_r + 30.0, 121);
    p.fock_cutoff = 2;
    let series = temperature_series(&p, &temps, &grid).map_err(|e| e.to_string())?;
    let mut separations = Vec::new();
    let mut counts = Vec::new();
    for s in &series {
        certs.push(s.truncation_certified);
        let peaks = find_peaks(&grid, &heights(s), PROMINENCE);
        counts.push(peaks.len());
        if peaks.len() >= 2 {
            separations.push(peaks.last().unwrap().0 - peaks[0].0);
        }
    }
    check(counts[0] == 2, format!("16.5 mK has {} peaks", counts[0]))?;
    check(
        *counts.last().unwrap() == 1,
        format!("349 mK has {} peaks", counts.last().unwrap()),
    )?;
    let hot = &series[series.len() - 1];
    let hot_peaks = find_peaks(&grid, &heights(hot), PROMINENCE);
    check(
        (hot_peaks[0].0 - p.omega_r).abs() < p.kappa,
        format!("349 mK peak at {:.3}", hot_peaks[0].0),
    )?;
    for (i, w) in separations.windows(2).enumerate() {
        check(
            w[1] <= w[0] + 1e-9,
            format!("separation grew from {:.3} to {:.3} at step {i}", w[0], w[1]),
        )?;
    }
    Ok(())
}

/// Criterion 7: anticrossing map splitting, location and flux symmetry.
fn criterion_7(certs: &mut Vec<bool>) -> Result<(), String> {
    let mut p = DeviceParams::paper_defaults();
    p.gamma_q = 7.90;
    p.transmon_levels = 2;
    p.temperature = 16.5;
    p.fock_cutoff = auto_fock_cutoff(&p);

    let center = resonance_flux(&p).map_err(|e| e.to_string())?;
    let flux_grid = linspace(center - 0.004, center + 0.004, 21);
    let probe_grid = linspace(p.omega_r - 60.0, p.omega_r + 60.0, 241);
    let map =
        anticrossing_map(&p, &flux_grid, &probe_grid, p.temperature).map_err(|e| e.to_string())?;
    certs.push(map.truncation_certified);

    let mut best: Option<(f64, f64)> = None;
    for (&flux, row) in flux_grid.iter().zip(&map.t_grid) {
        let h: Vec<f64> = row.iter().map(|t| t.norm()).collect();
        let peaks = find_peaks(&probe_grid, &h, PROMINENCE);
        if peaks.len() == 2 {
            let split = peaks[1].0 - peaks[0].0;
            if best.is_none() || split < best.unwrap().1 {
                best = Some((flux, split));
            }
        }
    }
    let (best_flux, min_split) = best.ok_or("no flux row produced two peaks")?;
    check(
        (min_split - 37.0).abs() / 37.0 < 0.05,
        format!("minimum splitting {min_split:.3} MHz"),
    )?;
    let detuning_at_best = (p.qubit_frequency(best_flux).unwrap() - p.omega_r).abs();
    let min_detuning = flux_grid
        .iter()
        .map(|&f| (p.qubit_frequency(f).unwrap() - p.omega_r).abs())
        .fold(f64::INFINITY, f64::min);
    let flux_step_mhz = (p.qubit_frequency(flux_grid[1]).unwrap()
        - p.qubit_frequency(flux_grid[0]).unwrap())
    .abs();
    check(
        detuning_at_best <= min_detuning + flux_step_mhz,
        format!("minimum at detuning {detuning_at_best:.3} MHz"),
    )?;

    // flux -> -flux symmetry on a small map straddling zero
    let mut q = p.clone();
    q.fock_cutoff = 6;
    let sym_flux = linspace(-0.2, 0.2, 5);
    let sym_probe = linspace(q.omega_r - 10.0, q.omega_r + 10.0, 11);
    let sym = anticrossing_map(&q, &sym_flux, &sym_probe, q.temperature)
        .map_err(|e| e.to_string())?;
    let rows = sym.t_grid.len();
    for i in 0..rows / 2 {
        for (a, b) in sym.t_grid[i].iter().zip(&sym.t_grid[rows - 1 - i]) {
            let diff = (a - b).norm();
            check(diff <= 1e-12, format!("flux asymmetry {diff:.2e}"))?;
        }
    }
    Ok(())
}

/// Criterion 8: Stark calibration chain.
fn criterion_8() -> Result<(), String> {
    let p = DeviceParams::<f64>::paper_defaults();
    let delta = 1282.0;
    let slope = p.stark_lamb_shift(1.0, delta).unwrap() - p.stark_lamb_shift(0.0, delta).unwrap();
    check((slope - 0.534).abs() < 1e-3, format!("slope {slope:.4} MHz"))?;
    check(
        (slope - 0.510).abs() / 0.510 < 0.10,
        format!("slope {slope:.4} vs extracted 0.510"),
    )?;
    let shift_21 = 21.0 * slope;
    check(shift_21 > 10.48, format!("21-phonon shift {shift_21:.2} vs Gamma"))?;
    check(shift_21 > 1.56, format!("21-phonon shift {shift_21:.2} vs kappa"))?;
    check(
        (phonon_from_power(-143.0f64) - 0.126).abs() < 1e-3,
        "phonons at -143 dBm".into(),
    )?;
    check((phonon_from_power(-134.0f64) - 1.0).abs() < 1e-12, "phonons at -134 dBm".into())?;
    check(
        (phonon_from_power(-104.0f64) - 1000.0).abs() < 1e-9,
        "phonons at -104 dBm".into(),
    )?;
    Ok(())
}

/// Criterion 9: crossover temperature.
fn criterion_9() -> Result<(), String> {
    let tc = crossover_temperature(3162.0f64);
    check((tc - 151.8).abs() <= 0.1, format!("T_c = {tc:.3} mK"))?;
    check((tc - 149.0).abs() / 149.0 < 0.03, format!("T_c = {tc:.3} vs 149 mK"))?;
    Ok(())
}

/// Criterion 10: invariants and certification across criteria 1-7.
///
/// solve_steady_state already validates Hermiticity (1e-10), trace (1e-10)
/// and PSD (-1e-8) on every state, so any violation would have failed the
/// producing criterion; here the certification flags are checked and one
/// state per regime is re-validated explicitly.
fn criterion_10(certs: &[bool]) -> Result<(), String> {
    check(!certs.is_empty(), "no spectra were collected".into())?;
    let uncertified = certs.iter().filter(|c| !**c).count();
    check(
        uncertified == 0,
        format!("{uncertified} of {} spectra uncertified", certs.len()),
    )?;
    for temp in [16.5, 349.0] {
        let mut p = DeviceParams::paper_defaults();
        p.transmon_levels = 2;
        p.temperature = temp;
        p.fock_cutoff = auto_fock_cutoff(&p);
        let l = build_liouvillian(&p, p.omega_r, p.omega_r + p.g).map_err(|e| e.to_string())?;
        let rho = solve_steady_state(&l).map_err(|e| e.to_string())?;
        rho.validate().map_err(|e| format!("T = {temp} mK: {e}"))?;
        check(
            certify_truncation(&p, p.omega_r, p.omega_r + p.g),
            format!("T = {temp} mK not certified"),
        )?;
    }
    Ok(())
}

/// Criterion 11: byte-identical CSV on re-emission of criterion 1's result.
fn criterion_11(c1: &Option<SpectrumResult<f64>>) -> Result<(), String> {
    let result = c1.as_ref().ok_or("criterion 1 result unavailable")?;
    let mut first = Vec::new();
    emit_spectrum_csv(&mut first, result).map_err(|e| e.to_string())?;
    // recompute the same spectrum and emit again
    let p = &result.params_snapshot;
    let rerun = spectrum(p, result.qubit_freq, &result.probe_frequencies)
        .map_err(|e| e.to_string())?;
    let mut second = Vec::new();
    emit_spectrum_csv(&mut second, &rerun).map_err(|e| e.to_string())?;
    check(first == second, "re-emitted CSV differs".into())?;
    check(!first.is_empty(), "empty CSV".into())?;
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let mut gate = Gate::new();
    let mut c1_result = None;
    let mut certs: Vec<bool> = Vec::new();

    let r1 = criterion_1(&mut c1_result);
    if let Some(res) = &c1_result {
        certs.push(res.truncation_certified);
    }
    gate.report(1, "vacuum Rabi splitting", r1);
    gate.report(2, "bare-cavity oracle", criterion_2(&mut certs));
    gate.report(3, "thermal detailed balance", criterion_3());
    gate.report(4, "secular-oracle equivalence", criterion_4(&mut certs));
    gate.report(5, "four-peak intermediate regime", criterion_5(&mut certs));
    gate.report(6, "quantum-to-classical crossover", criterion_6(&mut certs));
    gate.report(7, "anticrossing map", criterion_7(&mut certs));
    gate.report(8, "Stark calibration chain", criterion_8());
    gate.report(9, "crossover temperature", criterion_9());
    gate.report(10, "state validity suite", criterion_10(&certs));
    gate.report(11, "determinism", criterion_11(&c1_result));

    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}
