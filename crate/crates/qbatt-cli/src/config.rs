//! Flat key–value run configuration.
//!
//! A config file is a sequence of `key = value` lines; `#` starts a comment.
//! Unknown and duplicate keys are rejected by name. A run is either based on
//! a bundled preset (`preset = fig3-nmu`, with any other keys acting as
//! overrides) or fully specified from an explicit `model`. `sweep.<key>`
//! lines declare Cartesian sweep grids over scalar parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use qbatt_core::dynamics::ReservoirParams;
use qbatt_core::models::presets::{preset, AnalysisToggles, Job, SystemSpec};
use qbatt_core::models::{ChargerBatteryParams, InitialKet, XXChainParams};
use qbatt_core::thermo::Temperature;
use qbatt_core::Complex64;

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    /// Line without a `key = value` shape.
    Malformed { line_no: usize, line: String },
    UnknownKey(String),
    DuplicateKey(String),
    BadValue { key: String, value: String, expected: &'static str },
    /// Key present but meaningless for the selected model.
    Inapplicable { key: String, model: &'static str },
    MissingKey(&'static str),
    UnknownPreset(String),
    BadSweep(String),
    /// Model construction rejected the parameters.
    Model(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(path, e) => write!(f, "cannot read {}: {e}", path.display()),
            ConfigError::Malformed { line_no, line } => {
                write!(f, "line {line_no} is not `key = value`: {line:?}")
            }
            ConfigError::UnknownKey(k) => write!(f, "unknown configuration key `{k}`"),
            ConfigError::DuplicateKey(k) => write!(f, "duplicate configuration key `{k}`"),
            ConfigError::BadValue { key, value, expected } => {
                write!(f, "key `{key}`: cannot parse {value:?} as {expected}")
            }
            ConfigError::Inapplicable { key, model } => {
                write!(f, "key `{key}` does not apply to the {model} model")
            }
            ConfigError::MissingKey(k) => write!(f, "missing required key `{k}`"),
            ConfigError::UnknownPreset(p) => write!(f, "unknown preset `{p}`"),
            ConfigError::BadSweep(msg) => write!(f, "invalid `sweep`: {msg}"),
            ConfigError::Model(msg) => write!(f, "invalid model parameters: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parsed but not yet resolved configuration.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
    /// `sweep.<key>` grids in declaration order.
    sweeps: Vec<(String, Vec<String>)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RawConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Malformed {
                line_no: idx + 1,
                line: raw_line.to_string(),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if let Some(swept) = key.strip_prefix("sweep.") {
                if cfg.sweeps.iter().any(|(k, _)| k == swept) {
                    return Err(ConfigError::DuplicateKey(key));
                }
                let values: Vec<String> =
                    value.split(',').map(|v| v.trim().to_string()).collect();
                if values.is_empty() || values.iter().any(|v| v.is_empty()) {
                    return Err(ConfigError::BadSweep(format!(
                        "key `{key}` needs a comma-separated value list"
                    )));
                }
                cfg.sweeps.push((swept.to_string(), values));
                continue;
            }
            if cfg.entries.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey(key));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), value);
    }

    pub fn sweeps(&self) -> &[(String, Vec<String>)] {
        &self.sweeps
    }
}

/// Execution options that sit outside the physics.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub workers: usize,
    pub seed: u64,
    /// Emit a per-point trajectory CSV for every sweep point.
    pub sweep_csv: bool,
}

/// A fully resolved run: the jobs to execute plus execution options.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub jobs: Vec<Job>,
    pub options: RunOptions,
    pub sweeps: Vec<(String, Vec<String>)>,
}

struct KeyReader<'a> {
    entries: &'a BTreeMap<String, String>,
    consumed: Vec<String>,
}

impl<'a> KeyReader<'a> {
    fn new(entries: &'a BTreeMap<String, String>) -> Self {
        KeyReader {
            entries,
            consumed: Vec::new(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a str> {
        let v = self.entries.get(key).map(String::as_str);
        if v.is_some() {
            self.consumed.push(key.to_string());
        }
        v
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| ConfigError::BadValue {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a real number",
                }),
        }
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| ConfigError::BadValue {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a nonnegative integer",
                }),
        }
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|_| ConfigError::BadValue {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a nonnegative integer",
                }),
        }
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => Err(ConfigError::BadValue {
                key: key.to_string(),
                value: v.to_string(),
                expected: "true or false",
            }),
        }
    }

    fn reject_unconsumed(&self) -> Result<(), ConfigError> {
        for key in self.entries.keys() {
            if !self.consumed.contains(key) {
                return Err(ConfigError::UnknownKey(key.clone()));
            }
        }
        Ok(())
    }
}

/// Keys that override a charger–battery model (also the sweepable set,
/// plus `dt` and `t_max`).
const CB_KEYS: [&str; 7] = [
    "omega0", "eta", "kappa", "gamma0", "lambda", "delta", "n_photon",
];

fn parse_initial_state(v: &str) -> Result<InitialKet, ConfigError> {
    let err = || ConfigError::BadValue {
        key: "initial_state".to_string(),
        value: v.to_string(),
        expected: "two symbols from {0, 1, +} (charger then battery), e.g. `10`, `+0`, `1+`, `++`",
    };
    let chars: Vec<char> = v.chars().collect();
    if chars.len() != 2 {
        return Err(err());
    }
    let ket_of = |c: char| -> Result<[Complex64; 2], ConfigError> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok(match c {
            '0' => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            '1' => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            '+' => [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            _ => return Err(err()),
        })
    };
    Ok(InitialKet::Product {
        charger: ket_of(chars[0])?,
        battery: ket_of(chars[1])?,
    })
}

fn apply_cb_key(p: &mut ChargerBatteryParams, key: &str, value: f64) {
    match key {
        "omega0" => p.omega0 = value,
        "eta" => p.eta = value,
        "kappa" => p.kappa = value,
        "gamma0" => p.reservoir.gamma0 = value,
        "lambda" => p.reservoir.lambda = value,
        "delta" => p.reservoir.delta = value,
        "n_photon" => p.reservoir.n_photon = value,
        _ => unreachable!("apply_cb_key called with unvetted key"),
    }
}

/// Apply a scalar override to a job; errors if the key does not apply to
/// the job's model.
pub fn apply_override(job: &mut Job, key: &str, value: f64) -> Result<(), ConfigError> {
    match key {
        "dt" => {
            job.grid.dt = value;
            return Ok(());
        }
        "t_max" => {
            job.grid.t_max = value;
            return Ok(());
        }
        "record_every" => {
            job.grid.record_every = value as usize;
            return Ok(());
        }
        _ => {}
    }
    match &mut job.system {
        SystemSpec::ChargerBattery(p) => {
            if key == "beta" {
                p.temperature = Temperature::Finite { beta: value };
                return Ok(());
            }
            if CB_KEYS.contains(&key) {
                apply_cb_key(p, key, value);
                return Ok(());
            }
            Err(ConfigError::Inapplicable {
                key: key.to_string(),
                model: "charger_battery",
            })
        }
        SystemSpec::XxChain(p) => match key {
            "omega0" => {
                p.omega0 = value;
                Ok(())
            }
            "j" => {
                p.j = value;
                Ok(())
            }
            "b_field" => {
                p.b_field = value;
                Ok(())
            }
            _ => Err(ConfigError::Inapplicable {
                key: key.to_string(),
                model: "xx_chain",
            }),
        },
    }
}

/// Resolve a raw config into jobs and options.
pub fn resolve(cfg: &RawConfig) -> Result<ResolvedConfig, ConfigError> {
    let mut r = KeyReader::new(&cfg.entries);

    let options = RunOptions {
        out_dir: PathBuf::from(r.raw("out").unwrap_or("out")),
        workers: r.usize("workers")?.unwrap_or(1).max(1),
        seed: r.u64("seed")?.unwrap_or(0),
        sweep_csv: r.bool("sweep_csv")?.unwrap_or(false),
    };

    let preset_name = r.raw("preset").map(str::to_string);
    let model_name = r.raw("model").map(str::to_string);

    let mut jobs: Vec<Job> = match (&preset_name, &model_name) {
        (Some(name), _) => preset(name)
            .ok_or_else(|| ConfigError::UnknownPreset(name.clone()))?
            .jobs,
        (None, Some(model)) => vec![build_explicit_job(model, &mut r)?],
        (None, None) => return Err(ConfigError::MissingKey("preset (or model)")),
    };

    // grid and physics overrides apply uniformly to every job of the preset
    for key in ["dt", "t_max"] {
        if let Some(v) = r.f64(key)? {
            for job in &mut jobs {
                apply_override(job, key, v)?;
            }
        }
    }
    if let Some(v) = r.f64("positivity_floor")? {
        if v > 0.0 {
            return Err(ConfigError::BadValue {
                key: "positivity_floor".to_string(),
                value: v.to_string(),
                expected: "a nonpositive eigenvalue floor, e.g. -1e-3",
            });
        }
        for job in &mut jobs {
            job.grid.positivity_floor = v;
        }
    }
    if let Some(v) = r.usize("record_every")? {
        for job in &mut jobs {
            job.grid.record_every = v.max(1);
        }
    }
    if preset_name.is_some() {
        for key in CB_KEYS.iter().chain(["beta", "j", "b_field"].iter()) {
            if let Some(v) = r.f64(key)? {
                for job in &mut jobs {
                    apply_override(job, key, v)?;
                }
            }
        }
        if let Some(v) = r.raw("initial_state") {
            let ket = parse_initial_state(v)?;
            for job in &mut jobs {
                match &mut job.system {
                    SystemSpec::ChargerBattery(p) => p.initial = ket.clone(),
                    SystemSpec::XxChain(_) => {
                        return Err(ConfigError::Inapplicable {
                            key: "initial_state".to_string(),
                            model: "xx_chain",
                        })
                    }
                }
            }
        }
        if r.bool("zero_t")?.unwrap_or(false) {
            for job in &mut jobs {
                if let SystemSpec::ChargerBattery(p) = &mut job.system {
                    p.temperature = Temperature::Zero;
                }
            }
        }
    }

    // analysis toggles
    type ToggleAccessor = fn(&mut AnalysisToggles) -> &mut bool;
    let toggle_keys: [(&str, ToggleAccessor); 5] = [
        ("geo", |t| &mut t.geo),
        ("ext", |t| &mut t.ext),
        ("thermo_bound", |t| &mut t.thermo_bound),
        ("ref_bound", |t| &mut t.ref_bound),
        ("spectral_qfi", |t| &mut t.spectral_qfi),
    ];
    for (key, accessor) in toggle_keys {
        if let Some(v) = r.bool(key)? {
            for job in &mut jobs {
                *accessor(&mut job.toggles) = v;
            }
        }
    }
    if let Some(v) = r.raw("ref_f_state") {
        let on_battery = match v {
            "battery" => true,
            "full" => false,
            other => {
                return Err(ConfigError::BadValue {
                    key: "ref_f_state".to_string(),
                    value: other.to_string(),
                    expected: "battery or full",
                })
            }
        };
        for job in &mut jobs {
            job.ref_f_on_battery = on_battery;
        }
    }

    // sweep validation
    let sweepable: Vec<&str> = CB_KEYS
        .iter()
        .copied()
        .chain(["beta", "j", "b_field", "dt", "t_max"])
        .collect();
    let mut grid_points = 1usize;
    for (key, values) in cfg.sweeps() {
        if !sweepable.contains(&key.as_str()) {
            return Err(ConfigError::BadSweep(format!(
                "`{key}` is not a sweepable parameter"
            )));
        }
        for v in values {
            v.parse::<f64>().map_err(|_| ConfigError::BadValue {
                key: format!("sweep.{key}"),
                value: v.clone(),
                expected: "a real number",
            })?;
        }
        grid_points = grid_points.saturating_mul(values.len());
    }
    if grid_points > 10_000 {
        return Err(ConfigError::BadSweep(format!(
            "grid has {grid_points} points, limit is 10000"
        )));
    }

    r.reject_unconsumed()?;

    Ok(ResolvedConfig {
        jobs,
        options,
        sweeps: cfg.sweeps().to_vec(),
    })
}

fn build_explicit_job(model: &str, r: &mut KeyReader<'_>) -> Result<Job, ConfigError> {
    use qbatt_core::dynamics::GridSpec;

    let label = r.raw("label").unwrap_or("custom").to_string();
    let dt = r.f64("dt")?.ok_or(ConfigError::MissingKey("dt"))?;
    let t_max = r.f64("t_max")?.ok_or(ConfigError::MissingKey("t_max"))?;
    let record_every = r.usize("record_every")?.unwrap_or(1).max(1);
    let grid = GridSpec::new(dt, t_max, record_every)
        .map_err(|e| ConfigError::Model(e.to_string()))?;

    match model {
        "charger_battery" => {
            let temperature = if r.bool("zero_t")?.unwrap_or(false) {
                Temperature::Zero
            } else {
                match r.f64("beta")? {
                    Some(beta) => Temperature::Finite { beta },
                    None => return Err(ConfigError::MissingKey("beta (or zero_t = true)")),
                }
            };
            let initial = match r.raw("initial_state") {
                Some(v) => parse_initial_state(v)?,
                None => InitialKet::ExcitedGround,
            };
            let params = ChargerBatteryParams {
                omega0: r.f64("omega0")?.unwrap_or(1.0),
                eta: r.f64("eta")?.ok_or(ConfigError::MissingKey("eta"))?,
                kappa: r.f64("kappa")?.ok_or(ConfigError::MissingKey("kappa"))?,
                reservoir: ReservoirParams::new(
                    r.f64("gamma0")?.ok_or(ConfigError::MissingKey("gamma0"))?,
                    r.f64("lambda")?.ok_or(ConfigError::MissingKey("lambda"))?,
                    r.f64("delta")?.unwrap_or(3.0),
                    r.f64("n_photon")?.unwrap_or(0.0),
                ),
                temperature,
                initial,
            };
            Ok(Job {
                label,
                system: SystemSpec::ChargerBattery(params),
                grid,
                toggles: AnalysisToggles {
                    geo: true,
                    ext: true,
                    thermo_bound: true,
                    ref_bound: false,
                    spectral_qfi: true,
                },
                ref_f_on_battery: true,
            })
        }
        "xx_chain" => {
            let amp = |re_key: &str, im_key: &str, r: &mut KeyReader<'_>| {
                Ok::<Complex64, ConfigError>(Complex64::new(
                    r.f64(re_key)?.unwrap_or(0.0),
                    r.f64(im_key)?.unwrap_or(0.0),
                ))
            };
            let alpha = amp("alpha_re", "alpha_im", r)?;
            let beta_c = amp("beta_re", "beta_im", r)?;
            let gamma_c = amp("gamma_re", "gamma_im", r)?;
            let params = XXChainParams::new(
                r.f64("omega0")?.unwrap_or(1.0),
                r.f64("j")?.unwrap_or(1.0),
                r.f64("b_field")?.unwrap_or(0.0),
                alpha,
                beta_c,
                gamma_c,
            )
            .map_err(|e| ConfigError::Model(e.to_string()))?;
            Ok(Job {
                label,
                system: SystemSpec::XxChain(params),
                grid,
                toggles: AnalysisToggles {
                    geo: true,
                    ext: true,
                    thermo_bound: false,
                    ref_bound: true,
                    spectral_qfi: true,
                },
                ref_f_on_battery: true,
            })
        }
        other => Err(ConfigError::BadValue {
            key: "model".to_string(),
            value: other.to_string(),
            expected: "charger_battery or xx_chain",
        }),
    }
}
