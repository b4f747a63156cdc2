//! Experiment harness behind the `thz-isac` binary: configuration files,
//! presets, parallel Monte-Carlo execution and CSV output.
//!
//! # Configuration grammar
//!
//! One `key = value` pair per line. `#` starts a comment, blank lines are
//! ignored, keys are case-sensitive and every key may appear once. Unknown
//! keys, and keys that do not apply to the chosen experiment, are errors.
//!
//! ```text
//! experiment         = papr | sense | ber | psd         (required)
//! waveforms          = all | OFDM, DFT-s-OFDM, OTFS, DFT-s-OTFS
//! m                  = 64, 128        subcarriers
//! n                  = 16, 32         symbols; paired with m element-wise
//! trials             = 1000           frames (papr, ber, psd) or trials (sense)
//! seed               = 7
//! output             = results/papr.csv
//! carrier            = 0.3 THz        Hz, kHz, MHz, GHz, THz
//! subcarrier_spacing = 1.92 MHz
//! modulation         = 4              QAM order, 4 or 16
//! cp_len             = 16             samples; default m/4
//! oversample         = 4              papr only
//! snr_db             = 0, 10, 20      sense and ber
//! range              = 10 m           sense only
//! velocity           = 20 km/h        sense only; m/s or km/h
//! delay              = 10 ns          ber only; s, ms, us, ns
//! doppler            = 11.1 kHz       ber only
//! equalizer          = default | onetap | ls            ber only
//! segments           = 16             psd only
//! ```
//!
//! A single `m` or `n` value is broadcast against a longer list of the
//! other.
//!
//! # CSV schema
//!
//! `experiment,waveform,M,N,snr_db,seed,metric,value` with LF line endings.
//! Reals use C `%.9e` formatting; `snr_db` is `nan` where it does not apply.
//! Rows are sorted by waveform, M, N, SNR and metric name.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{PathSpec, SensingScenario};
use crate::metrics::{ccdf_axis, frame_papr, psd, CcdfCurve};
use crate::numerics::{ModOrder, SimRng};
use crate::rxcomm::{ber_trial, Equalizer, LsOptions};
use crate::sensing::{run_rmse_trials, MIN_RMSE_TRIALS};
use crate::waveform::{random_frame, PilotPattern, WaveformConfig, WaveformKind};
use crate::{Error, Result, C64};

pub const CSV_HEADER: &str = "experiment,waveform,M,N,snr_db,seed,metric,value";
pub const OUT_DIR_ENV: &str = "THZ_ISAC_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    Papr,
    Sense,
    Ber,
    Psd,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Papr => "papr",
            ExperimentKind::Sense => "sense",
            ExperimentKind::Ber => "ber",
            ExperimentKind::Psd => "psd",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "papr" => Ok(ExperimentKind::Papr),
            "sense" => Ok(ExperimentKind::Sense),
            "ber" => Ok(ExperimentKind::Ber),
            "psd" => Ok(ExperimentKind::Psd),
            other => Err(Error::Config(format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualizerChoice {
    /// One-tap for the OFDM family, iterative LS for the OTFS family.
    Default,
    OneTap,
    Ls,
}

impl EqualizerChoice {
    pub fn resolve(self, kind: WaveformKind) -> Equalizer {
        match self {
            EqualizerChoice::Default => Equalizer::default_for(kind),
            EqualizerChoice::OneTap => Equalizer::OneTap,
            EqualizerChoice::Ls => Equalizer::IterativeLs(LsOptions::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub waveforms: Vec<WaveformKind>,
    /// `(M, N)` pairs.
    pub grids: Vec<(usize, usize)>,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub carrier_hz: f64,
    pub subcarrier_spacing_hz: f64,
    pub mod_order: ModOrder,
    pub cp_len: Option<usize>,
    pub oversample: usize,
    pub range_m: f64,
    pub velocity_mps: f64,
    pub delay_s: f64,
    pub doppler_hz: f64,
    pub equalizer: EqualizerChoice,
    pub psd_segments: usize,
}

const KEYS: &[(&str, Option<&[ExperimentKind]>)] = {
    use ExperimentKind::*;
    &[
        ("experiment", None),
        ("waveforms", None),
        ("m", None),
        ("n", None),
        ("trials", None),
        ("seed", None),
        ("output", None),
        ("carrier", None),
        ("subcarrier_spacing", None),
        ("modulation", None),
        ("cp_len", None),
        ("oversample", Some(&[Papr])),
        ("snr_db", Some(&[Sense, Ber])),
        ("range", Some(&[Sense])),
        ("velocity", Some(&[Sense])),
        ("delay", Some(&[Ber])),
        ("doppler", Some(&[Ber])),
        ("equalizer", Some(&[Ber])),
        ("segments", Some(&[Psd])),
    ]
};

fn config_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn split_list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).collect()
}

fn parse_usize(v: &str) -> std::result::Result<usize, String> {
    v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

/// Number with an optional unit suffix, scaled to SI.
fn parse_quantity(v: &str, units: &[(&str, f64)]) -> std::result::Result<f64, String> {
    let v = v.trim();
    let split = v
        .char_indices()
        .find(|&(i, c)| c.is_ascii_alphabetic() && !(c == 'e' || c == 'E') || (i > 0 && c == ' '))
        .map(|(i, _)| i)
        .unwrap_or(v.len());
    let (num, unit) = (v[..split].trim(), v[split..].trim());
    let x: f64 = num.parse().map_err(|_| format!("`{v}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("`{v}` is not finite"));
    }
    if unit.is_empty() {
        return Ok(x);
    }
    units
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, s)| x * s)
        .ok_or_else(|| {
            let names: Vec<&str> = units.iter().map(|(u, _)| *u).collect();
            format!("unit `{unit}` not one of {}", names.join(", "))
        })
}

const FREQ_UNITS: &[(&str, f64)] = &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9), ("THz", 1e12)];
const TIME_UNITS: &[(&str, f64)] = &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("ns", 1e-9)];
const LENGTH_UNITS: &[(&str, f64)] = &[("m", 1.0), ("km", 1e3)];
const SPEED_UNITS: &[(&str, f64)] = &[("m/s", 1.0), ("km/h", 1.0 / 3.6)];
const DB_UNITS: &[(&str, f64)] = &[("dB", 1.0)];

impl ExperimentConfig {
    fn defaults(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            waveforms: WaveformKind::ALL.to_vec(),
            grids: vec![(64, 16)],
            snr_db: match experiment {
                ExperimentKind::Ber => vec![20.0],
                _ => vec![30.0],
            },
            trials: match experiment {
                ExperimentKind::Papr => 10_000,
                ExperimentKind::Sense => 200,
                ExperimentKind::Ber => 500,
                ExperimentKind::Psd => 100,
            },
            seed: 7,
            output: None,
            carrier_hz: 0.3e12,
            subcarrier_spacing_hz: 1.92e6,
            mod_order: ModOrder::Qam4,
            cp_len: None,
            oversample: 4,
            range_m: 10.0,
            velocity_mps: 20.0 / 3.6,
            delay_s: 0.0,
            doppler_hz: 0.0,
            equalizer: EqualizerChoice::Default,
            psd_segments: 16,
        }
    }

    /// Parses and validates a configuration file body.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(line_no, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.iter().any(|(k, _)| *k == key) {
                return Err(config_err(line_no, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(config_err(line_no, format!("`{key}` has no value")));
            }
            if entries.insert(key, (line_no, value)).is_some() {
                return Err(config_err(line_no, format!("duplicate key `{key}`")));
            }
        }
        let (_, exp) = entries
            .get("experiment")
            .ok_or_else(|| Error::Config("missing required key `experiment`".into()))?;
        let experiment: ExperimentKind = exp.parse()?;
        let mut cfg = Self::defaults(experiment);
        let mut ms = vec![64];
        let mut ns = vec![16];

        for (&key, &(line, value)) in &entries {
            let allowed = KEYS.iter().find(|(k, _)| *k == key).and_then(|(_, a)| *a);
            if let Some(kinds) = allowed {
                if !kinds.contains(&experiment) {
                    return Err(config_err(line, format!("`{key}` does not apply to the {experiment} experiment")));
                }
            }
            let bad = |msg: String| config_err(line, format!("{key}: {msg}"));
            match key {
                "experiment" => {}
                "waveforms" => {
                    cfg.waveforms = if value == "all" {
                        WaveformKind::ALL.to_vec()
                    } else {
                        split_list(value)
                            .into_iter()
                            .map(|w| w.parse::<WaveformKind>().map_err(|e| bad(e.to_string())))
                            .collect::<Result<_>>()?
                    }
                }
                "m" => ms = split_list(value).into_iter().map(parse_usize).collect::<std::result::Result<_, _>>().map_err(bad)?,
                "n" => ns = split_list(value).into_iter().map(parse_usize).collect::<std::result::Result<_, _>>().map_err(bad)?,
                "trials" => cfg.trials = parse_usize(value).map_err(bad)?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad(format!("`{value}` is not a u64")))?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                "carrier" => cfg.carrier_hz = parse_quantity(value, FREQ_UNITS).map_err(bad)?,
                "subcarrier_spacing" => cfg.subcarrier_spacing_hz = parse_quantity(value, FREQ_UNITS).map_err(bad)?,
                "modulation" => {
                    cfg.mod_order = ModOrder::from_order(value.parse().map_err(|_| bad(format!("`{value}` is not a QAM order")))?).map_err(|e| bad(e.to_string()))?
                }
                "cp_len" => cfg.cp_len = Some(parse_usize(value).map_err(bad)?),
                "oversample" => cfg.oversample = parse_usize(value).map_err(bad)?,
                "snr_db" => {
                    cfg.snr_db = split_list(value)
                        .into_iter()
                        .map(|v| parse_quantity(v, DB_UNITS))
                        .collect::<std::result::Result<_, _>>()
                        .map_err(bad)?
                }
                "range" => cfg.range_m = parse_quantity(value, LENGTH_UNITS).map_err(bad)?,
                "velocity" => cfg.velocity_mps = parse_quantity(value, SPEED_UNITS).map_err(bad)?,
                "delay" => cfg.delay_s = parse_quantity(value, TIME_UNITS).map_err(bad)?,
                "doppler" => cfg.doppler_hz = parse_quantity(value, FREQ_UNITS).map_err(bad)?,
                "equalizer" => {
                    cfg.equalizer = match value {
                        "default" => EqualizerChoice::Default,
                        "onetap" => EqualizerChoice::OneTap,
                        "ls" => EqualizerChoice::Ls,
                        other => return Err(bad(format!("unknown equalizer `{other}`"))),
                    }
                }
                "segments" => cfg.psd_segments = parse_usize(value).map_err(bad)?,
                _ => unreachable!("key table and match out of sync"),
            }
        }
        cfg.grids = pair_grids(&ms, &ns)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// PAPR CCDF of all four waveforms on both grid sizes.
    pub fn fig3() -> Self {
        let mut cfg = Self::defaults(ExperimentKind::Papr);
        cfg.grids = vec![(64, 16), (128, 32)];
        cfg
    }

    /// Range RMSE of all four waveforms for a 10 m, 20 km/h target.
    pub fn fig4() -> Self {
        let mut cfg = Self::defaults(ExperimentKind::Sense);
        cfg.grids = vec![(64, 16), (128, 32)];
        cfg
    }

    pub fn waveform_config(&self, kind: WaveformKind, m: usize, n: usize) -> WaveformConfig {
        let mut w = WaveformConfig::new(kind, m, n);
        w.carrier_hz = self.carrier_hz;
        w.subcarrier_spacing_hz = self.subcarrier_spacing_hz;
        w.mod_order = self.mod_order;
        if let Some(cp) = self.cp_len {
            w.cp_len = cp;
        }
        w
    }

    /// Checks every combination the run will touch before any work starts.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |msg: String| Err(Error::Config(msg));
        if self.waveforms.is_empty() {
            return cfg_err("no waveforms selected".into());
        }
        if self.grids.is_empty() {
            return cfg_err("no grid sizes selected".into());
        }
        if self.trials == 0 {
            return cfg_err("trials must be positive".into());
        }
        for &kind in &self.waveforms {
            for &(m, n) in &self.grids {
                self.waveform_config(kind, m, n)
                    .validate()
                    .map_err(|e| Error::Config(format!("{kind} {m}x{n}: {e}")))?;
            }
        }
        match self.experiment {
            ExperimentKind::Papr if self.oversample == 0 => cfg_err("oversample must be at least 1".into()),
            ExperimentKind::Sense | ExperimentKind::Ber if self.snr_db.is_empty() => {
                cfg_err("snr_db list is empty".into())
            }
            ExperimentKind::Sense if self.trials < MIN_RMSE_TRIALS => {
                cfg_err(format!("sense needs at least {MIN_RMSE_TRIALS} trials"))
            }
            ExperimentKind::Sense => SensingScenario::new(self.range_m, self.velocity_mps)
                .map(|_| ())
                .map_err(|e| Error::Config(e.to_string())),
            ExperimentKind::Ber => PathSpec::new(C64::new(1.0, 0.0), self.delay_s, self.doppler_hz)
                .map(|_| ())
                .map_err(|e| Error::Config(e.to_string())),
            ExperimentKind::Psd => {
                for &(m, n) in &self.grids {
                    let len = self.waveform_config(WaveformKind::Ofdm, m, n).frame_len();
                    if self.psd_segments == 0 || len / self.psd_segments < 2 {
                        return cfg_err(format!("{} segments do not fit a {m}x{n} frame", self.psd_segments));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Output file: explicit `output`, else `<dir>/<default_name>` where
    /// `dir` comes from [`OUT_DIR_ENV`] or the working directory.
    pub fn output_path(&self, default_name: &str) -> PathBuf {
        self.output.clone().unwrap_or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."))
                .join(default_name)
        })
    }
}

fn pair_grids(ms: &[usize], ns: &[usize]) -> Result<Vec<(usize, usize)>> {
    match (ms.len(), ns.len()) {
        (a, b) if a == b => Ok(ms.iter().copied().zip(ns.iter().copied()).collect()),
        (1, _) => Ok(ns.iter().map(|&n| (ms[0], n)).collect()),
        (_, 1) => Ok(ms.iter().map(|&m| (m, ns[0])).collect()),
        (a, b) => Err(Error::Config(format!("m has {a} values and n has {b}; they are paired element-wise"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment: ExperimentKind,
    pub waveform: WaveformKind,
    pub m: usize,
    pub n: usize,
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
}

impl TrialRecord {
    fn sort_key(&self) -> (usize, usize, usize) {
        let w = WaveformKind::ALL.iter().position(|k| *k == self.waveform).unwrap_or(usize::MAX);
        (w, self.m, self.n)
    }
}

/// C `printf("%.9e")`.
pub fn format_sci(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.9e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn to_csv(records: &[TrialRecord]) -> String {
    let mut rows: Vec<&TrialRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        a.sort_key()
            .cmp(&b.sort_key())
            .then(a.snr_db.unwrap_or(f64::NAN).total_cmp(&b.snr_db.unwrap_or(f64::NAN)))
            .then_with(|| a.metric.cmp(&b.metric))
    });
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.experiment,
            r.waveform,
            r.m,
            r.n,
            r.snr_db.map_or_else(|| "nan".to_string(), format_sci),
            r.seed,
            r.metric,
            format_sci(r.value)
        ));
    }
    out
}

/// Writes through a temporary file in the target directory so readers
/// never see a partial CSV.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    /// Human-readable lines, one per waveform/grid/SNR group.
    pub summary: Vec<String>,
}

/// Runs the experiment on the current rayon pool. Trial `i` always draws
/// from `SimRng::for_trial(seed, i)` and results are reduced in index
/// order, so output does not depend on the pool size.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for &kind in &cfg.waveforms {
        for &(m, n) in &cfg.grids {
            let wf = cfg.waveform_config(kind, m, n);
            let mut push = |snr: Option<f64>, metric: String, value: f64| {
                records.push(TrialRecord {
                    experiment: cfg.experiment,
                    waveform: kind,
                    m,
                    n,
                    snr_db: snr,
                    seed: cfg.seed,
                    metric,
                    value,
                })
            };
            match cfg.experiment {
                ExperimentKind::Papr => {
                    let samples = (0..cfg.trials as u64)
                        .into_par_iter()
                        .map(|i| frame_papr(&wf, cfg.oversample, &mut SimRng::for_trial(cfg.seed, i)))
                        .collect::<Result<Vec<_>>>()?;
                    let curve = CcdfCurve::from_samples(samples)?;
                    for (g, p) in ccdf_axis().iter().zip(&curve.probability) {
                        push(None, format!("ccdf@{g:05.2}dB"), *p);
                    }
                    summary.push(format!(
                        "papr  {kind:<10} {m:>4}x{n:<3} PAPR at CCDF 1e-3: {:.2} dB",
                        curve.papr_at(1e-3)
                    ));
                }
                ExperimentKind::Sense => {
                    let mut scenario = SensingScenario::new(cfg.range_m, cfg.velocity_mps)?;
                    scenario.rcs_gain = C64::new(1.0, 0.0);
                    for &snr in &cfg.snr_db {
                        let row = run_rmse_trials(&wf, &scenario, Some(snr), cfg.trials, cfg.seed)?;
                        push(Some(snr), "range_rmse_m".into(), row.range_rmse_m);
                        push(Some(snr), "range_mean_m".into(), row.range_mean_m);
                        push(Some(snr), "outliers".into(), row.outliers as f64);
                        push(Some(snr), "velocity_rmse_mps".into(), row.velocity_rmse_mps);
                        summary.push(format!(
                            "sense {kind:<10} {m:>4}x{n:<3} {snr:>5.1} dB  range RMSE {:.3} mm, {} outliers",
                            row.range_rmse_m * 1e3,
                            row.outliers
                        ));
                    }
                }
                ExperimentKind::Ber => {
                    let paths = [PathSpec::new(C64::new(1.0, 0.0), cfg.delay_s, cfg.doppler_hz)?];
                    let eq = cfg.equalizer.resolve(kind);
                    for &snr in &cfg.snr_db {
                        let counts = (0..cfg.trials as u64)
                            .into_par_iter()
                            .map(|i| {
                                ber_trial(&wf, &paths, Some(snr), eq, &mut SimRng::for_trial(cfg.seed, i))
                                    .map(|d| (d.errors, d.bits.len()))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        let errors: usize = counts.iter().map(|c| c.0).sum();
                        let bits: usize = counts.iter().map(|c| c.1).sum();
                        let ber = errors as f64 / bits as f64;
                        push(Some(snr), "ber".into(), ber);
                        push(Some(snr), "bit_errors".into(), errors as f64);
                        push(Some(snr), "bits".into(), bits as f64);
                        summary.push(format!(
                            "ber   {kind:<10} {m:>4}x{n:<3} {snr:>5.1} dB  BER {ber:.3e} ({errors}/{bits})"
                        ));
                    }
                }
                ExperimentKind::Psd => {
                    let pilots = PilotPattern::none(&wf);
                    let spectra = (0..cfg.trials as u64)
                        .into_par_iter()
                        .map(|i| {
                            let frame = random_frame(&wf, &pilots, &mut SimRng::for_trial(cfg.seed, i))?;
                            psd(&frame.samples, cfg.psd_segments)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let bins = spectra[0].len();
                    let mut avg = vec![0.0; bins];
                    for s in &spectra {
                        for (a, v) in avg.iter_mut().zip(s) {
                            *a += v;
                        }
                    }
                    for (i, a) in avg.iter().enumerate() {
                        push(None, format!("psd@{i:05}"), a / spectra.len() as f64);
                    }
                    summary.push(format!("psd   {kind:<10} {m:>4}x{n:<3} {bins} bins"));
                }
            }
        }
    }
    if records.iter().any(|r| r.value.is_nan()) {
        return Err(Error::NonFinite("experiment produced a NaN metric".into()));
    }
    Ok(ExperimentResult { records, summary })
}

/// [`run_experiment`] on a dedicated pool of `workers` threads.
pub fn run_with_workers(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| run_experiment(cfg))
}
