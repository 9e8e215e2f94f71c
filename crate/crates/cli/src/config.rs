//! `key=value` run configuration.
//!
//! One assignment per line, `#` starts a comment, later assignments win.
//! Command-line flags are appended after the file so they override it.

use std::collections::HashMap;
use std::fmt;

use plate_semigroup::regularity::DEFAULT_FIT_WINDOW;
use plate_semigroup::witness::{Normalization, WitnessCase, DEFAULT_WITNESS_WINDOW};
use plate_semigroup::{Error as CoreError, Spacing, SystemParams};

/// Every accepted key, in the order `--help` lists them.
pub const KEYS: &[&str] = &[
    "alpha",
    "gamma",
    "delta",
    "kappa",
    "theta",
    "beta",
    "spectrum",
    "length",
    "modes",
    "sigmas",
    "sigma_min",
    "sigma_max",
    "abscissa_modes",
    "lambda_min",
    "lambda_max",
    "lambda_points",
    "spacing",
    "fit_window",
    "output",
    "truncation",
    "theta_min",
    "theta_max",
    "theta_points",
    "beta_min",
    "beta_max",
    "beta_points",
    "case",
    "normalization",
    "t_max",
    "t_points",
    "seed",
    "phi",
];

/// Where an assignment came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => f.write_str("command line"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: Origin,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, key `{}`: {}", self.origin, self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

/// Splits a document into entries. Unknown keys and lines without `=`
/// are rejected here; values are checked later.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = Origin::Line(i + 1);
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError {
                origin,
                key: line.to_string(),
                message: "expected key=value".into(),
            });
        };
        out.push(entry(k.trim(), v.trim(), origin)?);
    }
    Ok(out)
}

pub fn entry(key: &str, value: &str, origin: Origin) -> Result<Entry, ConfigError> {
    if !KEYS.contains(&key) {
        return Err(ConfigError {
            origin,
            key: key.to_string(),
            message: "unknown key".into(),
        });
    }
    Ok(Entry {
        key: key.to_string(),
        value: value.to_string(),
        origin,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumChoice {
    /// Command-dependent default.
    Auto,
    Dirichlet {
        length: f64,
        modes: usize,
    },
    List(Vec<f64>),
    Geometric {
        min: f64,
        max: f64,
        modes: usize,
    },
    Envelope {
        sigma_min: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruncationMode {
    #[default]
    Warn,
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub spectrum: SpectrumChoice,
    /// Number of modes for sampled spectra; `Auto` uses it too.
    pub modes: Option<usize>,
    pub length: f64,
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub abscissa_modes: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub spacing: Spacing,
    /// Unset means the command's default window.
    pub fit_window: Option<f64>,
    /// `None` writes to standard output.
    pub output: Option<String>,
    pub truncation: TruncationMode,
    pub theta_axis: GridAxis,
    pub beta_axis: GridAxis,
    pub case: Option<WitnessCase>,
    pub normalization: Normalization,
    pub t_max: f64,
    pub t_points: usize,
    pub seed: u64,
    pub phi: Option<f64>,
    /// Origin of each key that was set, for error reporting after parsing.
    pub origins: HashMap<String, Origin>,
}

impl RunConfig {
    pub fn fit_window_or(&self, default: f64) -> f64 {
        self.fit_window.unwrap_or(default)
    }

    pub fn classify_window(&self) -> f64 {
        self.fit_window_or(DEFAULT_FIT_WINDOW)
    }

    pub fn witness_window(&self) -> f64 {
        self.fit_window_or(DEFAULT_WITNESS_WINDOW)
    }

    pub fn origin_of(&self, key: &str) -> Origin {
        self.origins.get(key).cloned().unwrap_or(Origin::Default)
    }

    /// Config error attributed to wherever `key` was set.
    pub fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            origin: self.origin_of(key),
            key: key.to_string(),
            message: message.into(),
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    build_config(&parse_entries(text)?)
}

struct Lookup<'a> {
    last: HashMap<&'a str, &'a Entry>,
}

impl<'a> Lookup<'a> {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            origin: self
                .last
                .get(key)
                .map(|e| e.origin.clone())
                .unwrap_or(Origin::Default),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.last.get(key).map(|e| e.value.as_str())
    }

    fn parsed<T: std::str::FromStr>(
        &self,
        key: &str,
        what: &str,
    ) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| self.err(key, format!("malformed {what} `{v}`"))),
        }
    }

    fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.parsed::<f64>(key, "number")? {
            Some(x) if !x.is_finite() => Err(self.err(key, format!("must be finite, got {x}"))),
            other => Ok(other),
        }
    }

    fn real_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.real(key)?.unwrap_or(default))
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.parsed::<usize>(key, "integer")? {
            Some(0) => Err(self.err(key, "must be at least 1")),
            other => Ok(other),
        }
    }

    fn count_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.count(key)?.unwrap_or(default))
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.real(key)? {
            Some(x) if x <= 0.0 => Err(self.err(key, format!("must be positive, got {x}"))),
            other => Ok(other),
        }
    }
}

pub fn build_config(entries: &[Entry]) -> Result<RunConfig, ConfigError> {
    let mut last = HashMap::new();
    for e in entries {
        last.insert(e.key.as_str(), e);
    }
    let l = Lookup { last };

    let params = SystemParams::new(
        l.real_or("alpha", 1.0)?,
        l.real_or("gamma", 1.0)?,
        l.real_or("delta", 1.0)?,
        l.real_or("kappa", 1.0)?,
        l.real_or("theta", 1.0)?,
        l.real_or("beta", 1.0)?,
    )
    .map_err(|e| match e {
        CoreError::InvalidParameter { name, reason } => l.err(name, reason),
        other => l.err("params", other.to_string()),
    })?;

    let length = l.positive("length")?.unwrap_or(std::f64::consts::PI);
    let modes = l.count("modes")?;
    let sigma_min = l.positive("sigma_min")?;
    let sigma_max = l.positive("sigma_max")?;
    let spectrum = match l.raw("spectrum").unwrap_or("auto") {
        "auto" => SpectrumChoice::Auto,
        "dirichlet" => SpectrumChoice::Dirichlet {
            length,
            modes: modes.unwrap_or(50),
        },
        "list" => {
            let Some(text) = l.raw("sigmas") else {
                return Err(l.err("sigmas", "spectrum=list needs sigmas=s1,s2,..."));
            };
            let values = text
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| l.err("sigmas", format!("malformed number list `{text}`")))?;
            SpectrumChoice::List(values)
        }
        "geometric" => SpectrumChoice::Geometric {
            min: sigma_min.unwrap_or(1e2),
            max: sigma_max.unwrap_or(1e8),
            modes: modes.unwrap_or(100),
        },
        "envelope" => SpectrumChoice::Envelope {
            sigma_min: sigma_min.unwrap_or(1.0),
        },
        other => {
            return Err(l.err(
                "spectrum",
                format!("unknown provider `{other}` (expected auto, dirichlet, list, geometric or envelope)"),
            ))
        }
    };

    let spacing = match l.raw("spacing").unwrap_or("log") {
        "log" => Spacing::Log,
        "linear" => Spacing::Linear,
        other => return Err(l.err("spacing", format!("expected log or linear, got `{other}`"))),
    };
    let truncation = match l.raw("truncation").unwrap_or("warn") {
        "warn" => TruncationMode::Warn,
        "strict" => TruncationMode::Strict,
        other => {
            return Err(l.err(
                "truncation",
                format!("expected strict or warn, got `{other}`"),
            ))
        }
    };
    let fit_window = l.real("fit_window")?;
    if let Some(w) = fit_window {
        if !(w > 0.0 && w <= 1.0) {
            return Err(l.err("fit_window", format!("must lie in (0,1], got {w}")));
        }
    }
    let output = match l.raw("output") {
        None | Some("-") => None,
        Some("") => return Err(l.err("output", "path must be nonempty")),
        Some(p) => Some(p.to_string()),
    };

    let lambda_min = l.real_or("lambda_min", 1e3)?;
    let lambda_max = l.real_or("lambda_max", 1e7)?;
    let lambda_points = l.count_or("lambda_points", 64)?;
    if lambda_min < 0.0 {
        return Err(l.err(
            "lambda_min",
            format!("must be nonnegative, got {lambda_min}"),
        ));
    }
    if lambda_points > 1 && lambda_max <= lambda_min {
        return Err(l.err(
            "lambda_max",
            format!("must exceed lambda_min = {lambda_min}"),
        ));
    }

    let axis = |name: &str, min: f64, max: f64| -> Result<GridAxis, ConfigError> {
        let a = GridAxis {
            min: l.real_or(&format!("{name}_min"), min)?,
            max: l.real_or(&format!("{name}_max"), max)?,
            points: l.count_or(&format!("{name}_points"), 9)?,
        };
        if a.points > 1 && a.max < a.min {
            return Err(l.err(&format!("{name}_max"), format!("must be >= {name}_min")));
        }
        Ok(a)
    };
    let theta_axis = axis("theta", 0.0, 1.0)?;
    let beta_axis = axis("beta", 0.1, 1.0)?;

    let case = match l.raw("case") {
        None => None,
        Some(v) => Some(v.parse::<WitnessCase>().map_err(|m| l.err("case", m))?),
    };
    let normalization = match l.raw("normalization") {
        None => Normalization::default(),
        Some(v) => v
            .parse::<Normalization>()
            .map_err(|m| l.err("normalization", m))?,
    };

    let t_max = l.real_or("t_max", 50.0)?;
    if t_max < 0.0 {
        return Err(l.err("t_max", format!("must be nonnegative, got {t_max}")));
    }
    let t_points = l.count_or("t_points", 100)?;
    let seed = l.parsed::<u64>("seed", "integer")?.unwrap_or(0);
    let phi = l.real("phi")?;
    let abscissa_modes = l.count_or("abscissa_modes", 400)?;

    let origins = l
        .last
        .iter()
        .map(|(k, e)| (k.to_string(), e.origin.clone()))
        .collect();

    Ok(RunConfig {
        params,
        spectrum,
        modes,
        length,
        sigma_min,
        sigma_max,
        abscissa_modes,
        lambda_min,
        lambda_max,
        lambda_points,
        spacing,
        fit_window,
        output,
        truncation,
        theta_axis,
        beta_axis,
        case,
        normalization,
        t_max,
        t_points,
        seed,
        phi,
        origins,
    })
}
