//! Subcommands: each turns a [`RunConfig`] into one CSV document.

use std::str::FromStr;

use plate_semigroup::block::{block_spectrum, build_mode_block};
use plate_semigroup::decay::{energy_history, random_initial_data};
use plate_semigroup::regularity::{
    classify_point, gevrey_scaled_curve, predicted_gevrey_exponent, region_sweep, settings_curve,
    ClassifySettings, RegionReport, SpectrumPolicy,
};
use plate_semigroup::witness::{
    case1_alternative_exponent, predicted_witness_exponent, witness_growth_fit, witness_sequence,
    WitnessCase,
};
use plate_semigroup::{Error as CoreError, ModeSpectrum, SigmaBand};

use crate::config::{ConfigError, RunConfig, SpectrumChoice, TruncationMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Resolvent,
    Classify,
    Sweep,
    Witness,
    Decay,
    Gevrey,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Spectrum,
        Command::Resolvent,
        Command::Classify,
        Command::Sweep,
        Command::Witness,
        Command::Decay,
        Command::Gevrey,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Resolvent => "resolvent",
            Command::Classify => "classify",
            Command::Sweep => "sweep",
            Command::Witness => "witness",
            Command::Decay => "decay",
            Command::Gevrey => "gevrey",
        }
    }

    pub fn about(&self) -> &'static str {
        match self {
            Command::Spectrum => "Block eigenvalues for each mode",
            Command::Resolvent => "Resolvent norm along the imaginary axis",
            Command::Classify => "Regularity verdict at one (theta, beta)",
            Command::Sweep => "Regularity verdicts over a (theta, beta) grid",
            Command::Witness => "Lack-of-analyticity witness sequence",
            Command::Decay => "Energy of seeded random initial data over time",
            Command::Gevrey => "Resolvent norm times lambda^phi",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Bad configuration or usage: exit code 1.
    Usage(String),
    /// Numerical failure: exit code 2.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. }
            | CoreError::InvalidSpectrum(_)
            | CoreError::TooFewPoints { .. }
            | CoreError::Inapplicable { .. } => Failure::Usage(e.to_string()),
            CoreError::Singular { .. }
            | CoreError::ZeroDenominator { .. }
            | CoreError::ResidualViolation { .. }
            | CoreError::EigenNonConvergence { .. }
            | CoreError::TruncationInadequate(_) => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// A finished command: CSV text, diagnostics for stderr, exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub notes: Vec<String>,
    pub status: i32,
}

/// In-memory CSV document with a fixed header.
struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new<I: AsRef<[u8]>>(header: impl IntoIterator<Item = I>) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("writing to memory");
        Table { w }
    }

    fn row(&mut self, fields: &[String]) {
        self.w.write_record(fields).expect("writing to memory");
    }

    fn finish(self) -> String {
        let bytes = self.w.into_inner().expect("flushing to memory");
        String::from_utf8(bytes).expect("fields are ASCII")
    }
}

/// 17 significant digits, which round-trips every f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    fmt_f64(x.unwrap_or(f64::NAN))
}

const MIN_FIT_POINTS: usize = 8;

fn discrete_spectrum(cfg: &RunConfig, default: SpectrumChoice) -> Result<ModeSpectrum, Failure> {
    let choice = match &cfg.spectrum {
        SpectrumChoice::Auto => &default,
        c => c,
    };
    let spec = match choice {
        SpectrumChoice::Auto => unreachable!("auto resolved above"),
        SpectrumChoice::Dirichlet { length, modes } => ModeSpectrum::dirichlet_1d(*length, *modes)?,
        SpectrumChoice::List(v) => ModeSpectrum::from_list(v.clone())?,
        SpectrumChoice::Geometric { min, max, modes } => {
            ModeSpectrum::geometric(*min, *max, *modes)?
        }
        SpectrumChoice::Envelope { sigma_min } => {
            let max = cfg.sigma_max.unwrap_or(1e8);
            SigmaBand::new(*sigma_min, max)?.sample(cfg.modes.unwrap_or(400))
        }
    };
    Ok(spec)
}

fn dirichlet_default(cfg: &RunConfig) -> SpectrumChoice {
    SpectrumChoice::Dirichlet {
        length: cfg.length,
        modes: cfg.modes.unwrap_or(50),
    }
}

fn regularity_policy(cfg: &RunConfig) -> Result<SpectrumPolicy, Failure> {
    match &cfg.spectrum {
        SpectrumChoice::Auto => Ok(SpectrumPolicy::Envelope {
            sigma_min: cfg.sigma_min.unwrap_or(1.0),
            abscissa_modes: cfg.abscissa_modes,
        }),
        SpectrumChoice::Envelope { sigma_min } => Ok(SpectrumPolicy::Envelope {
            sigma_min: *sigma_min,
            abscissa_modes: cfg.abscissa_modes,
        }),
        _ => Ok(SpectrumPolicy::Discrete(discrete_spectrum(
            cfg,
            SpectrumChoice::Auto,
        )?)),
    }
}

fn settings(cfg: &RunConfig) -> Result<ClassifySettings, Failure> {
    Ok(ClassifySettings {
        lambda_min: cfg.lambda_min,
        lambda_max: cfg.lambda_max,
        lambda_points: cfg.lambda_points,
        spacing: cfg.spacing,
        fit_window: cfg.classify_window(),
        policy: regularity_policy(cfg)?,
    })
}

fn require_regularity_grid(cfg: &RunConfig) -> Result<(), Failure> {
    if cfg.lambda_min < 1.0 {
        return Err(cfg
            .error(
                "lambda_min",
                format!("must be >= 1 for this command, got {}", cfg.lambda_min),
            )
            .into());
    }
    if cfg.lambda_points < MIN_FIT_POINTS {
        return Err(cfg
            .error(
                "lambda_points",
                format!("a slope fit needs at least {MIN_FIT_POINTS} points"),
            )
            .into());
    }
    Ok(())
}

const TRUNCATION_WARNING: &str = "supremum attained at the truncation edge or truncation rule not met; results may be truncation artifacts";

fn truncation_gate(cfg: &RunConfig, suspect: bool, notes: &mut Vec<String>) -> Result<(), Failure> {
    if !suspect {
        return Ok(());
    }
    match cfg.truncation {
        TruncationMode::Strict => {
            Err(CoreError::TruncationInadequate(TRUNCATION_WARNING.into()).into())
        }
        TruncationMode::Warn => {
            notes.push(format!("warning: {TRUNCATION_WARNING}"));
            Ok(())
        }
    }
}

fn spectrum_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = discrete_spectrum(cfg, dirichlet_default(cfg))?;
    let mut header = vec!["n".to_string(), "sigma".to_string()];
    for k in 1..=4 {
        header.push(format!("re_eig{k}"));
        header.push(format!("im_eig{k}"));
    }
    let mut table = Table::new(header);
    let rows = spec
        .sigmas()
        .iter()
        .map(|&s| block_spectrum(&build_mode_block(&cfg.params, s)?))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, (s, ev)) in spec.sigmas().iter().zip(rows).enumerate() {
        let mut row = vec![(i + 1).to_string(), fmt_f64(*s)];
        for z in ev {
            row.push(fmt_f64(z.re));
            row.push(fmt_f64(z.im));
        }
        table.row(&row);
    }
    Ok(Outcome {
        csv: table.finish(),
        notes: vec![],
        status: 0,
    })
}

fn resolvent_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (curve, suspect, _) = settings_curve(&cfg.params, &settings(cfg)?)?;
    let mut notes = vec![format!("modes: {}", curve.mode_policy)];
    truncation_gate(cfg, suspect, &mut notes)?;
    let mut table = Table::new(["lambda", "norm", "argmax_sigma"]);
    for s in &curve.samples {
        table.row(&[fmt_f64(s.lambda), fmt_f64(s.norm), fmt_f64(s.argmax_sigma)]);
    }
    Ok(Outcome {
        csv: table.finish(),
        notes,
        status: 0,
    })
}

const REPORT_HEADER: [&str; 9] = [
    "theta",
    "beta",
    "in_RL",
    "in_RG1",
    "in_RG2",
    "predicted_phi",
    "measured_slope",
    "spectral_abscissa",
    "verdict",
];

fn report_row(table: &mut Table, r: &RegionReport) {
    table.row(&[
        fmt_f64(r.theta),
        fmt_f64(r.beta),
        r.in_rl.to_string(),
        r.in_rg1.to_string(),
        r.in_rg2.to_string(),
        fmt_opt(r.predicted_phi),
        fmt_f64(r.measured_slope),
        fmt_f64(r.spectral_abscissa),
        r.verdict.to_string(),
    ]);
}

fn classify_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    require_regularity_grid(cfg)?;
    let report = classify_point(&cfg.params, &settings(cfg)?)?;
    let mut notes = vec![];
    truncation_gate(cfg, report.truncation_suspect, &mut notes)?;
    let mut table = Table::new(REPORT_HEADER);
    report_row(&mut table, &report);
    Ok(Outcome {
        csv: table.finish(),
        notes,
        status: 0,
    })
}

fn sweep_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    require_regularity_grid(cfg)?;
    let thetas = cfg.theta_axis.values();
    let betas = cfg.beta_axis.values();
    for &t in &thetas {
        if !(0.0..=1.0).contains(&t) {
            return Err(cfg
                .error("theta_min", format!("grid value theta = {t} outside [0,1]"))
                .into());
        }
    }
    for &b in &betas {
        if !(b > 0.0 && b <= 1.0) {
            return Err(cfg
                .error("beta_min", format!("grid value beta = {b} outside (0,1]"))
                .into());
        }
    }
    let entries = region_sweep(&cfg.params, &thetas, &betas, &settings(cfg)?);

    let mut table = Table::new(REPORT_HEADER);
    let mut notes = vec![];
    let mut status = 0;
    let mut suspect = false;
    for e in &entries {
        match &e.report {
            Ok(r) => {
                suspect |= r.truncation_suspect;
                report_row(&mut table, r);
            }
            Err(err) => {
                let f = Failure::from(err.clone());
                status = status.max(f.exit_code());
                notes.push(format!(
                    "error at (theta, beta) = ({}, {}): {}",
                    e.theta, e.beta, err
                ));
                let nan = fmt_f64(f64::NAN);
                let blank = String::new();
                table.row(&[
                    fmt_f64(e.theta),
                    fmt_f64(e.beta),
                    blank.clone(),
                    blank.clone(),
                    blank,
                    nan.clone(),
                    nan.clone(),
                    nan,
                    "Error".to_string(),
                ]);
            }
        }
    }
    truncation_gate(cfg, suspect, &mut notes)?;
    Ok(Outcome {
        csv: table.finish(),
        notes,
        status,
    })
}

fn witness_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let Some(case) = cfg.case else {
        return Err(cfg
            .error("case", "witness needs case=case1|case2|case3|case4")
            .into());
    };
    let default = SpectrumChoice::Geometric {
        min: cfg.sigma_min.unwrap_or(1e2),
        max: cfg.sigma_max.unwrap_or(1e8),
        modes: cfg.modes.unwrap_or(100),
    };
    let spec = discrete_spectrum(cfg, default)?;
    if spec.len() < MIN_FIT_POINTS {
        return Err(cfg
            .error(
                "modes",
                format!("a growth fit needs at least {MIN_FIT_POINTS} modes"),
            )
            .into());
    }
    let points = witness_sequence(case, &cfg.params, &spec, cfg.normalization)?;

    let mut table = Table::new([
        "sigma", "lambda", "re_mu", "im_mu", "re_nu", "im_nu", "norm_U", "norm_F", "product",
    ]);
    for p in &points {
        table.row(
            &[
                p.sigma, p.lambda, p.mu.re, p.mu.im, p.nu.re, p.nu.im, p.norm_u, p.norm_f,
                p.product,
            ]
            .map(fmt_f64),
        );
    }

    let (theta, beta) = (cfg.params.theta(), cfg.params.beta());
    let mut notes = vec![];
    let predicted = predicted_witness_exponent(case, theta, beta)?;
    match witness_growth_fit(&points, cfg.witness_window()) {
        Ok(slope) => notes.push(format!(
            "{case}: fitted growth slope {slope:.6}, predicted {predicted:.6}"
        )),
        Err(e) => notes.push(format!("{case}: no growth fit ({e})")),
    }
    if case == WitnessCase::Case1 {
        let alt = case1_alternative_exponent(theta, beta)?;
        notes.push(format!("case1: order-count alternative exponent {alt:.6}"));
    }
    Ok(Outcome {
        csv: table.finish(),
        notes,
        status: 0,
    })
}

fn decay_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = discrete_spectrum(cfg, dirichlet_default(cfg))?;
    let n = cfg.t_points;
    let times: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => 0.0,
            _ if i + 1 == n => cfg.t_max,
            _ => cfg.t_max * i as f64 / (n - 1) as f64,
        })
        .collect();
    let initial = random_initial_data(spec.len(), cfg.seed);
    let energies = energy_history(&cfg.params, &spec, &initial, &times)?;
    let mut table = Table::new(["t", "energy"]);
    for (t, e) in times.iter().zip(&energies) {
        table.row(&[fmt_f64(*t), fmt_f64(*e)]);
    }
    Ok(Outcome {
        csv: table.finish(),
        notes: vec![],
        status: 0,
    })
}

fn gevrey_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    require_regularity_grid(cfg)?;
    let phi = match cfg.phi {
        Some(p) => p,
        None => {
            predicted_gevrey_exponent(cfg.params.theta(), cfg.params.beta())?.ok_or_else(|| {
                Failure::from(cfg.error(
                    "phi",
                    "no predicted Gevrey exponent at this (theta, beta); set phi explicitly",
                ))
            })?
        }
    };
    let (curve, suspect, _) = settings_curve(&cfg.params, &settings(cfg)?)?;
    let mut notes = vec![format!("phi = {phi}")];
    truncation_gate(cfg, suspect, &mut notes)?;
    let mut table = Table::new(["lambda", "norm_times_lambda_phi"]);
    for (l, v) in gevrey_scaled_curve(&curve, phi) {
        table.row(&[fmt_f64(l), fmt_f64(v)]);
    }
    Ok(Outcome {
        csv: table.finish(),
        notes,
        status: 0,
    })
}

/// Runs a command without touching the filesystem.
pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Outcome, Failure> {
    match cmd {
        Command::Spectrum => spectrum_cmd(cfg),
        Command::Resolvent => resolvent_cmd(cfg),
        Command::Classify => classify_cmd(cfg),
        Command::Sweep => sweep_cmd(cfg),
        Command::Witness => witness_cmd(cfg),
        Command::Decay => decay_cmd(cfg),
        Command::Gevrey => gevrey_cmd(cfg),
    }
}

/// Runs a command, writes its CSV once, prints diagnostics to stderr and
/// returns the process exit code.
pub fn run_command(cmd: Command, cfg: &RunConfig) -> i32 {
    match execute(cmd, cfg) {
        Ok(out) => {
            for n in &out.notes {
                eprintln!("{n}");
            }
            let written = match &cfg.output {
                Some(path) => {
                    std::fs::write(path, &out.csv).map_err(|e| format!("cannot write {path}: {e}"))
                }
                None => {
                    use std::io::Write;
                    let mut stdout = std::io::stdout().lock();
                    stdout
                        .write_all(out.csv.as_bytes())
                        .and_then(|_| stdout.flush())
                        .map_err(|e| format!("cannot write to stdout: {e}"))
                }
            };
            match written {
                Ok(()) => out.status,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    1
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}
