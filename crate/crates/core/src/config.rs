//! Flat key-value run configuration and deterministic CSV emission.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex;

use crate::device::DeviceParams;
use crate::dressed::TransitionLine;
use crate::error::{Error, Result};
use crate::steady::SpectrumResult;
use crate::sweeps::{AnticrossingMap, StarkScan};

/// Experiment selected by a config or subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Dressed,
    Spectrum,
    Secular,
    Anticrossing,
    Tempsweep,
    Stark,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Dressed => "dressed",
            Experiment::Spectrum => "spectrum",
            Experiment::Secular => "secular",
            Experiment::Anticrossing => "anticrossing",
            Experiment::Tempsweep => "tempsweep",
            Experiment::Stark => "stark",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "dressed" => Experiment::Dressed,
            "spectrum" => Experiment::Spectrum,
            "secular" => Experiment::Secular,
            "anticrossing" => Experiment::Anticrossing,
            "tempsweep" => Experiment::Tempsweep,
            "stark" => Experiment::Stark,
            _ => return None,
        })
    }
}

/// Parsed and validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub device: DeviceParams<f64>,
    /// `fock_cutoff` appeared explicitly; otherwise auto-sized per run.
    pub explicit_cutoff: bool,
    pub probe_start: f64,
    pub probe_stop: f64,
    pub probe_points: usize,
    pub flux_points: usize,
    pub temperatures: Vec<f64>,
    pub power_start: f64,
    pub power_stop: f64,
    pub power_points: usize,
    pub detuning: f64,
    pub n_max: usize,
    pub output_path: Option<String>,
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "omega_r",
    "g",
    "kappa",
    "gamma",
    "e_c",
    "e_j_max",
    "transmon_levels",
    "fock_cutoff",
    "epsilon",
    "temperature",
    "probe_start",
    "probe_stop",
    "probe_points",
    "flux_points",
    "temperatures",
    "power_start",
    "power_stop",
    "power_points",
    "detuning",
    "n_max",
    "output_path",
];

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value.parse::<f64>().map_err(|_| Error::Config {
        line,
        msg: format!("key `{key}`: `{value}` is not a number"),
    })
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize> {
    value.parse::<usize>().map_err(|_| Error::Config {
        line,
        msg: format!("key `{key}`: `{value}` is not a non-negative integer"),
    })
}

fn range_err(key: &str, line: usize, requirement: &str) -> Error {
    Error::Config {
        line,
        msg: format!("key `{key}` out of range: must be {requirement}"),
    }
}

/// Parses a flat `key = value` document (with `#` comments) for the given
/// experiment; unknown keys and out-of-range values are rejected with the
/// offending line number.
pub fn parse_config(text: &str, experiment: Experiment) -> Result<RunConfig> {
    let mut seen: HashMap<String, (String, usize)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Config {
                line: line_no,
                msg: format!("unknown key `{key}`"),
            });
        }
        if seen.insert(key.clone(), (value, line_no)).is_some() {
            return Err(Error::Config {
                line: line_no,
                msg: format!("duplicate key `{key}`"),
            });
        }
    }

    if let Some((value, line)) = seen.remove("experiment") {
        let named = Experiment::from_name(&value).ok_or_else(|| Error::Config {
            line,
            msg: format!("unknown experiment `{value}`"),
        })?;
        if named != experiment {
            return Err(Error::Config {
                line,
                msg: format!(
                    "config experiment `{value}` does not match subcommand `{}`",
                    experiment.name()
                ),
            });
        }
    }

    let mut device = DeviceParams::<f64>::paper_defaults();
    let mut explicit_cutoff = false;

    let mut take_f64 = |key: &str| -> Result<Option<(f64, usize)>> {
        match seen.remove(key) {
            Some((v, line)) => Ok(Some((parse_f64(key, &v, line)?, line))),
            None => Ok(None),
        }
    };
    if let Some((v, line)) = take_f64("omega_r")? {
        if v <= 0.0 {
            return Err(range_err("omega_r", line, "> 0"));
        }
        device.omega_r = v;
    }
    if let Some((v, line)) = take_f64("g")? {
        if v < 0.0 {
            return Err(range_err("g", line, ">= 0"));
        }
        device.g = v;
    }
    if let Some((v, line)) = take_f64("kappa")? {
        if v <= 0.0 {
            return Err(range_err("kappa", line, "> 0"));
        }
        device.kappa = v;
    }
    if let Some((v, line)) = take_f64("gamma")? {
        if v <= 0.0 {
            return Err(range_err("gamma", line, "> 0"));
        }
        device.gamma_q = v;
    }
    if let Some((v, line)) = take_f64("e_c")? {
        if v <= 0.0 {
            return Err(range_err("e_c", line, "> 0"));
        }
        device.e_c = v;
    }
    if let Some((v, line)) = take_f64("e_j_max")? {
        if v <= 0.0 {
            return Err(range_err("e_j_max", line, "> 0"));
        }
        device.e_j_max = v;
    }
    if let Some((v, line)) = take_f64("epsilon")? {
        if v <= 0.0 {
            return Err(range_err("epsilon", line, "> 0"));
        }
        device.epsilon = v;
    }
    if let Some((v, line)) = take_f64("temperature")? {
        if v < 0.0 {
            return Err(range_err("temperature", line, ">= 0"));
        }
        device.temperature = v;
    }
    if let Some((v, line)) = seen.remove("transmon_levels") {
        let n = parse_usize("transmon_levels", &v, line)?;
        if !(2..=10).contains(&n) {
            return Err(range_err("transmon_levels", line, "between 2 and 10"));
        }
        device.transmon_levels = n;
    }
    if let Some((v, line)) = seen.remove("fock_cutoff") {
        let n = parse_usize("fock_cutoff", &v, line)?;
        if n < 2 {
            return Err(range_err("fock_cutoff", line, ">= 2"));
        }
        device.fock_cutoff = n;
        explicit_cutoff = true;
    }

    let mut cfg = RunConfig {
        experiment,
        probe_start: device.omega_r - 60.0,
        probe_stop: device.omega_r + 60.0,
        probe_points: 401,
        flux_points: 81,
        temperatures: Vec::new(),
        power_start: -143.0,
        power_stop: -104.0,
        power_points: 40,
        detuning: 1282.0,
        n_max: 5,
        output_path: None,
        explicit_cutoff,
        device,
    };

    let mut take_f64 = |key: &str| -> Result<Option<(f64, usize)>> {
        match seen.remove(key) {
            Some((v, line)) => Ok(Some((parse_f64(key, &v, line)?, line))),
            None => Ok(None),
        }
    };
    if let Some((v, _)) = take_f64("probe_start")? {
        cfg.probe_start = v;
    }
    if let Some((v, _)) = take_f64("probe_stop")? {
        cfg.probe_stop = v;
    }
    if let Some((v, line)) = take_f64("power_start")? {
        let _ = line;
        cfg.power_start = v;
    }
    if let Some((v, _)) = take_f64("power_stop")? {
        cfg.power_stop = v;
    }
    if let Some((v, line)) = take_f64("detuning")? {
        if v == 0.0 {
            return Err(range_err("detuning", line, "nonzero"));
        }
        cfg.detuning = v;
    }
    if let Some((v, line)) = seen.remove("probe_points") {
        let n = parse_usize("probe_points", &v, line)?;
        if n < 2 {
            return Err(range_err("probe_points", line, ">= 2"));
        }
        cfg.probe_points = n;
    }
    if let Some((v, line)) = seen.remove("flux_points") {
        let n = parse_usize("flux_points", &v, line)?;
        if n < 1 {
            return Err(range_err("flux_points", line, ">= 1"));
        }
        cfg.flux_points = n;
    }
    if let Some((v, line)) = seen.remove("power_points") {
        let n = parse_usize("power_points", &v, line)?;
        if n < 1 {
            return Err(range_err("power_points", line, ">= 1"));
        }
        cfg.power_points = n;
    }
    if let Some((v, line)) = seen.remove("n_max") {
        let n = parse_usize("n_max", &v, line)?;
        if n < 1 {
            return Err(range_err("n_max", line, ">= 1"));
        }
        cfg.n_max = n;
    }
    if let Some((v, line)) = seen.remove("temperatures") {
        let temps: Result<Vec<f64>> = v
            .split(',')
            .map(|s| {
                let t = parse_f64("temperatures", s.trim(), line)?;
                if t < 0.0 {
                    return Err(range_err("temperatures", line, ">= 0 each"));
                }
                Ok(t)
            })
            .collect();
        cfg.temperatures = temps?;
    }
    if let Some((v, _)) = seen.remove("output_path") {
        cfg.output_path = Some(v);
    }

    if let Some((key, (_, line))) = seen.into_iter().next() {
        return Err(Error::Config {
            line,
            msg: format!("key `{key}` is not used by experiment `{}`", experiment.name()),
        });
    }

    if cfg.probe_start >= cfg.probe_stop {
        return Err(Error::Config {
            line: 0,
            msg: "probe_start must be below probe_stop".into(),
        });
    }
    if experiment == Experiment::Tempsweep && cfg.temperatures.is_empty() {
        return Err(Error::Config {
            line: 0,
            msg: "missing key `temperatures` (required for tempsweep)".into(),
        });
    }
    cfg.device.validate().map_err(|e| Error::Config {
        line: 0,
        msg: format!("invalid device parameters: {e}"),
    })?;
    Ok(cfg)
}

/// Serializes a RunConfig back to the flat key-value format; feeding the
/// output to `parse_config` reproduces the identical config.
pub fn serialize(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let d = &cfg.device;
    out.push_str(&format!("experiment = {}\n", cfg.experiment.name()));
    out.push_str(&format!("omega_r = {}\n", d.omega_r));
    out.push_str(&format!("g = {}\n", d.g));
    out.push_str(&format!("kappa = {}\n", d.kappa));
    out.push_str(&format!("gamma = {}\n", d.gamma_q));
    out.push_str(&format!("e_c = {}\n", d.e_c));
    out.push_str(&format!("e_j_max = {}\n", d.e_j_max));
    out.push_str(&format!("transmon_levels = {}\n", d.transmon_levels));
    if cfg.explicit_cutoff {
        out.push_str(&format!("fock_cutoff = {}\n", d.fock_cutoff));
    }
    out.push_str(&format!("epsilon = {}\n", d.epsilon));
    out.push_str(&format!("temperature = {}\n", d.temperature));
    out.push_str(&format!("probe_start = {}\n", cfg.probe_start));
    out.push_str(&format!("probe_stop = {}\n", cfg.probe_stop));
    out.push_str(&format!("probe_points = {}\n", cfg.probe_points));
    out.push_str(&format!("flux_points = {}\n", cfg.flux_points));
    if !cfg.temperatures.is_empty() {
        let list: Vec<String> = cfg.temperatures.iter().map(|t| t.to_string()).collect();
        out.push_str(&format!("temperatures = {}\n", list.join(", ")));
    }
    out.push_str(&format!("power_start = {}\n", cfg.power_start));
    out.push_str(&format!("power_stop = {}\n", cfg.power_stop));
    out.push_str(&format!("power_points = {}\n", cfg.power_points));
    out.push_str(&format!("detuning = {}\n", cfg.detuning));
    out.push_str(&format!("n_max = {}\n", cfg.n_max));
    if let Some(path) = &cfg.output_path {
        out.push_str(&format!("output_path = {path}\n"));
    }
    out
}

/// 12 significant digits, locale-independent.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn footer(w: &mut impl Write, certified: bool) -> Result<()> {
    if !certified {
        writeln!(w, "# warning: truncation not certified")?;
    }
    Ok(())
}

pub fn emit_spectrum_csv(w: &mut impl Write, result: &SpectrumResult<f64>) -> Result<()> {
    writeln!(w, "probe_mhz,re_t,im_t,abs_t,arg_t")?;
    for (&p, t) in result.probe_frequencies.iter().zip(&result.t_values) {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_sig(p),
            fmt_sig(t.re),
            fmt_sig(t.im),
            fmt_sig(t.norm()),
            fmt_sig(t.arg())
        )?;
    }
    footer(w, result.truncation_certified)
}

/// Secular results share the spectrum schema; no truncation footer because
/// the analytic tail is summed to convergence.
pub fn emit_secular_csv(
    w: &mut impl Write,
    probe_grid: &[f64],
    t_values: &[Complex<f64>],
) -> Result<()> {
    writeln!(w, "probe_mhz,re_t,im_t,abs_t,arg_t")?;
    for (&p, t) in probe_grid.iter().zip(t_values) {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_sig(p),
            fmt_sig(t.re),
            fmt_sig(t.im),
            fmt_sig(t.norm()),
            fmt_sig(t.arg())
        )?;
    }
    Ok(())
}

pub fn emit_anticrossing_csv(w: &mut impl Write, map: &AnticrossingMap<f64>) -> Result<()> {
    writeln!(w, "flux_phi0,probe_mhz,abs_t,arg_t")?;
    for (&flux, row) in map.flux_grid.iter().zip(&map.t_grid) {
        for (&probe, t) in map.probe_grid.iter().zip(row) {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_sig(flux),
                fmt_sig(probe),
                fmt_sig(t.norm()),
                fmt_sig(t.arg())
            )?;
        }
    }
    footer(w, map.truncation_certified)
}

pub fn emit_dressed_csv(w: &mut impl Write, lines: &[TransitionLine<f64>]) -> Result<()> {
    writeln!(w, "n,kind,freq_mhz,amplitude")?;
    for l in lines {
        writeln!(
            w,
            "{},{},{},{}",
            l.n,
            l.kind.label(),
            fmt_sig(l.frequency),
            fmt_sig(l.relative_amplitude)
        )?;
    }
    Ok(())
}

pub fn emit_tempsweep_csv(w: &mut impl Write, series: &[(f64, SpectrumResult<f64>)]) -> Result<()> {
    writeln!(w, "temperature_mk,probe_mhz,re_t,im_t,abs_t,arg_t")?;
    let mut all_certified = true;
    for (temp, result) in series {
        all_certified &= result.truncation_certified;
        for (&p, t) in result.probe_frequencies.iter().zip(&result.t_values) {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_sig(*temp),
                fmt_sig(p),
                fmt_sig(t.re),
                fmt_sig(t.im),
                fmt_sig(t.norm()),
                fmt_sig(t.arg())
            )?;
        }
    }
    footer(w, all_certified)
}

pub fn emit_stark_csv(w: &mut impl Write, scan: &StarkScan<f64>) -> Result<()> {
    writeln!(w, "power_dbm,phonon,drive_mhz,abs_r")?;
    for ((&power, &phonon), trace) in scan
        .power_grid
        .iter()
        .zip(&scan.phonon_numbers)
        .zip(&scan.qubit_response)
    {
        for (&drive, &r) in scan.drive_grid.iter().zip(trace) {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_sig(power),
                fmt_sig(phonon),
                fmt_sig(drive),
                fmt_sig(r)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn minimal_spectrum_config_uses_defaults() {
        let cfg = parse_config("", Experiment::Spectrum).unwrap();
        assert_eq!(cfg.device.omega_r, 3162.0);
        assert_eq!(cfg.probe_points, 401);
        assert!((cfg.probe_start - 3102.0).abs() < 1e-12);
        assert!(!cfg.explicit_cutoff);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# a comment\n\nkappa = 2.0 # inline\n";
        let cfg = parse_config(text, Experiment::Spectrum).unwrap();
        assert_eq!(cfg.device.kappa, 2.0);
    }

    #[test]
    fn negative_kappa_names_key() {
        let err = parse_config("kappa = -1", Experiment::Spectrum).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("kappa"), "{msg}");
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config("kapa = 1.0", Experiment::Spectrum).unwrap_err();
        assert!(err.to_string().contains("unknown key `kapa`"));
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = parse_config("g = 1\ng = 2", Experiment::Spectrum).unwrap_err();
        assert!(err.to_string().contains("duplicate key `g`"));
    }

    #[test]
    fn non_numeric_value_rejected() {
        let err = parse_config("g = fast", Experiment::Spectrum).unwrap_err();
        assert!(err.to_string().contains("not a number"));
    }

    #[test]
    fn tempsweep_requires_temperatures() {
        let err = parse_config("", Experiment::Tempsweep).unwrap_err();
        assert!(err.to_string().contains("temperatures"));
        let cfg = parse_config("temperatures = 16.5, 349", Experiment::Tempsweep).unwrap();
        assert_eq!(cfg.temperatures, vec![16.5, 349.0]);
    }

    #[test]
    fn experiment_mismatch_rejected() {
        let err = parse_config("experiment = stark", Experiment::Spectrum).unwrap_err();
        assert!(err.to_string().contains("does not match"));
        assert!(parse_config("experiment = spectrum", Experiment::Spectrum).is_ok());
    }

    #[test]
    fn round_trip_identity() {
        let text = "g = 20.0\nkappa = 0.4\ntemperatures = 16.5, 98.5\nfock_cutoff = 12\noutput_path = out.csv\n";
        let cfg = parse_config(text, Experiment::Tempsweep).unwrap();
        let cfg2 = parse_config(&serialize(&cfg), Experiment::Tempsweep).unwrap();
        assert_eq!(cfg, cfg2);
    }

    #[test]
    fn sig_digit_formatting() {
        assert_eq!(fmt_sig(1.0), "1.00000000000e0");
        assert_eq!(fmt_sig(-0.5), "-5.00000000000e-1");
        // 12 significant digits survive a parse round trip at this magnitude
        let x = 3162.123456789012;
        let parsed: f64 = fmt_sig(x).parse().unwrap();
        assert!((parsed - x).abs() < 1e-8);
    }

    #[test]
    fn spectrum_csv_shape_and_determinism() {
        let result = SpectrumResult {
            probe_frequencies: vec![3161.0, 3162.0],
            t_values: vec![Complex::new(0.5, -0.1), Complex::new(1.0, 0.0)],
            params_snapshot: DeviceParams::paper_defaults(),
            qubit_freq: 3162.0,
            truncation_certified: true,
        };
        let mut buf1 = Vec::new();
        emit_spectrum_csv(&mut buf1, &result).unwrap();
        let mut buf2 = Vec::new();
        emit_spectrum_csv(&mut buf2, &result).unwrap();
        assert_eq!(buf1, buf2);
        let text = String::from_utf8(buf1).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "probe_mhz,re_t,im_t,abs_t,arg_t");
        assert!(!text.contains("not certified"));
    }

    #[test]
    fn uncertified_spectrum_gets_footer() {
        let result = SpectrumResult {
            probe_frequencies: vec![3162.0],
            t_values: vec![Complex::new(1.0, 0.0)],
            params_snapshot: DeviceParams::paper_defaults(),
            qubit_freq: 3162.0,
            truncation_certified: false,
        };
        let mut buf = Vec::new();
        emit_spectrum_csv(&mut buf, &result).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("# warning: truncation not certified\n"));
    }

    #[test]
    fn empty_spectrum_header_only() {
        let result = SpectrumResult {
            probe_frequencies: vec![],
            t_values: vec![],
            params_snapshot: DeviceParams::<f64>::paper_defaults(),
            qubit_freq: 3162.0,
            truncation_certified: true,
        };
        let mut buf = Vec::new();
        emit_spectrum_csv(&mut buf, &result).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "probe_mhz,re_t,im_t,abs_t,arg_t\n");
    }
}
