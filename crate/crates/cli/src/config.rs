//! Flags, config files and their resolution into a validated run description.
//!
//! Every value arrives as text, from a flag or from a `key = value` line in
//! the config file; flags win. Parsing happens after merging so both sources
//! get the same diagnostics, and all malformed entries are reported at once.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fs;
use std::path::{Path, PathBuf};

use cavity_duo::{ModelParams, Sector};
use clap::Args;
use num_complex::Complex64;

use crate::error::CliError;

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Excitation sector n (≥ −1).
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    /// Initial angle of cos α|−+⟩ + sin α|+−⟩; radians or `pi/4`-style.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Explicit initial amplitudes B1,B2,… as complex numbers (normalized on input).
    #[arg(long, allow_hyphen_values = true)]
    pub amplitudes: Option<String>,
    /// Named initial state: `ground` (|n+1,−−⟩) or `excited` (|n−1,++⟩).
    #[arg(long)]
    pub init: Option<String>,
    /// Dipole–dipole coupling κ.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Ising coupling J.
    #[arg(long, allow_hyphen_values = true)]
    pub ising: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Option<String>,
    /// Last time of the grid [default: 20].
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<String>,
    /// Time step of the grid [default: 0.01].
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<String>,
    /// Output file (sweep: output directory). Standard output if omitted.
    #[arg(long)]
    pub out: Option<String>,
    /// `csv` or `json` [default: csv].
    #[arg(long)]
    pub format: Option<String>,
    /// Seed for randomized validation [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Sweep: what to compute at each point, `evolve`, `cpplane` or `spectrum` [default: evolve].
    #[arg(long)]
    pub task: Option<String>,
    /// Sweep: number of worker threads [default: all cores].
    #[arg(long, allow_hyphen_values = true)]
    pub jobs: Option<String>,
    /// Flat `key = value` file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: [&str; 17] = [
    "n", "alpha", "amplitudes", "init", "kappa", "ising", "delta1", "delta2", "g1", "g2", "tmax", "dt",
    "out", "format", "seed", "task", "jobs",
];

impl Flags {
    fn get(&self, key: &str) -> Option<&String> {
        match key {
            "n" => self.n.as_ref(),
            "alpha" => self.alpha.as_ref(),
            "amplitudes" => self.amplitudes.as_ref(),
            "init" => self.init.as_ref(),
            "kappa" => self.kappa.as_ref(),
            "ising" => self.ising.as_ref(),
            "delta1" => self.delta1.as_ref(),
            "delta2" => self.delta2.as_ref(),
            "g1" => self.g1.as_ref(),
            "g2" => self.g2.as_ref(),
            "tmax" => self.tmax.as_ref(),
            "dt" => self.dt.as_ref(),
            "out" => self.out.as_ref(),
            "format" => self.format.as_ref(),
            "seed" => self.seed.as_ref(),
            "task" => self.task.as_ref(),
            "jobs" => self.jobs.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Spectrum,
    Evolve,
    CpPlane,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Spectrum => "spectrum",
            Task::Evolve => "evolve",
            Task::CpPlane => "cpplane",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Alpha(f64),
    Amplitudes(Vec<Complex64>),
    Ground,
    Excited,
}

/// One fully specified computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub params: ModelParams,
    pub sector: Sector,
    pub init: InitSpec,
}

/// Validated settings. Sweep axes hold every listed value; other commands
/// see exactly one value per axis.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub axes: BTreeMap<&'static str, Vec<f64>>,
    pub n_values: Vec<i64>,
    pub init: InitSpec,
    pub tmax: f64,
    pub dt: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub task: Task,
    pub jobs: Option<usize>,
}

impl RunConfig {
    /// Cartesian product of the sweep axes in a fixed order: `n` outermost,
    /// then `alpha, kappa, ising, delta1, delta2, g1, g2`.
    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        let axis = |k: &str| self.axes[k].clone();
        let (alphas, kappas, isings) = (axis("alpha"), axis("kappa"), axis("ising"));
        let (d1s, d2s, g1s, g2s) = (axis("delta1"), axis("delta2"), axis("g1"), axis("g2"));
        for &n in &self.n_values {
            for &alpha in &alphas {
                for &kappa in &kappas {
                    for &ising in &isings {
                        for &d1 in &d1s {
                            for &d2 in &d2s {
                                for &g1 in &g1s {
                                    for &g2 in &g2s {
                                        let init = match &self.init {
                                            InitSpec::Alpha(_) => InitSpec::Alpha(alpha),
                                            other => other.clone(),
                                        };
                                        out.push(Point {
                                            params: ModelParams::new(d1, d2, g1, g2, kappa, ising),
                                            sector: Sector::new(n).expect("validated sector"),
                                            init,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The single point of a non-sweep run.
    pub fn point(&self) -> Point {
        self.points().swap_remove(0)
    }
}

/// Reads `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    parse_config_text(&text, path)
}

fn parse_config_text(text: &str, path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    let mut problems = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let where_ = format!("{}:{}", path.display(), i + 1);
        let Some((key, value)) = line.split_once('=') else {
            problems.push(format!("{where_}: expected `key = value`, got `{line}`"));
            continue;
        };
        let key = key.trim().trim_start_matches("--").to_owned();
        if !KEYS.contains(&key.as_str()) {
            problems.push(format!("{where_}: unknown key `{key}`"));
            continue;
        }
        if map.insert(key.clone(), value.trim().to_owned()).is_some() {
            problems.push(format!("{where_}: key `{key}` given twice"));
        }
    }
    if problems.is_empty() {
        Ok(map)
    } else {
        Err(CliError::Usage(problems))
    }
}

/// Parses an angle: a plain number of radians, or `[c][*]pi[/d]` with an
/// optional sign (`pi/4`, `-pi/20`, `3pi/4`, `2*pi/3`). `π` works as `pi`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s = text.trim().to_lowercase().replace('π', "pi");
    let Some((coeff, rest)) = s.split_once("pi") else {
        return s.parse::<f64>().map_err(|_| format!("`{text}` is not an angle"));
    };
    let bad = || format!("`{text}` is not an angle");
    let coeff = coeff.trim().trim_end_matches('*').trim();
    let c = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = rest.trim();
    let d = if rest.is_empty() {
        1.0
    } else {
        let den = rest.strip_prefix('/').ok_or_else(bad)?;
        den.trim().parse::<f64>().map_err(|_| bad())?
    };
    let v = c * PI / d;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_number(text: &str) -> Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{text}` is not a finite number")),
    }
}

fn parse_amplitudes(text: &str) -> Result<Vec<Complex64>, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() > 4 {
        return Err(format!("at most 4 amplitudes, got {}", parts.len()));
    }
    let mut v = Vec::with_capacity(parts.len());
    for p in parts {
        let z: Complex64 = p.parse().map_err(|_| format!("`{p}` is not a complex number"))?;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(format!("`{p}` is not finite"));
        }
        v.push(z);
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err("amplitudes are all zero".into());
    }
    Ok(v.into_iter().map(|z| z / norm).collect())
}

/// Merges config-file entries under the flags and validates the result.
pub fn resolve(flags: &Flags, sweep: bool) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let raw: BTreeMap<&'static str, String> = KEYS
        .iter()
        .filter_map(|&k| flags.get(k).cloned().or_else(|| file.get(k).cloned()).map(|v| (k, v)))
        .collect();

    let mut problems = Vec::new();
    let mut list = |key: &'static str, default: f64, parse: fn(&str) -> Result<f64, String>| -> Vec<f64> {
        let Some(text) = raw.get(key) else { return vec![default] };
        let items: Vec<&str> = text.split(',').collect();
        if items.len() > 1 && !sweep {
            problems.push(format!("--{key}: lists are only accepted by `sweep`"));
            return vec![default];
        }
        let mut vals = Vec::new();
        for item in items {
            match parse(item) {
                Ok(v) => vals.push(v),
                Err(e) => problems.push(format!("--{key}: {e}")),
            }
        }
        if vals.is_empty() {
            vals.push(default);
        }
        vals
    };

    let mut axes = BTreeMap::new();
    axes.insert("alpha", list("alpha", FRAC_PI_4, parse_angle));
    for (key, default) in [("kappa", 0.0), ("ising", 0.0), ("delta1", 0.0), ("delta2", 0.0), ("g1", 1.0), ("g2", 1.0)] {
        axes.insert(key, list(key, default, parse_number));
    }
    let n_float = list("n", 0.0, |s| {
        let v: i64 = s.trim().parse().map_err(|_| format!("`{s}` is not an integer"))?;
        Sector::new(v).map_err(|e| e.to_string())?;
        Ok(v as f64)
    });
    let tmax = list("tmax", 20.0, parse_number)[0];
    let dt = list("dt", 0.01, parse_number)[0];
    if tmax < 0.0 {
        problems.push(format!("--tmax: must be ≥ 0, got {tmax}"));
    }
    if dt <= 0.0 {
        problems.push(format!("--dt: must be > 0, got {dt}"));
    } else if tmax / dt > 1e8 {
        problems.push(format!("--dt: {dt} gives more than 10^8 time steps"));
    }

    let given: Vec<&str> = ["alpha", "amplitudes", "init"].into_iter().filter(|k| raw.contains_key(k)).collect();
    if given.len() > 1 {
        problems.push(format!("give only one initial state, got --{}", given.join(" and --")));
    }
    let init = if let Some(text) = raw.get("amplitudes") {
        match parse_amplitudes(text) {
            Ok(v) => InitSpec::Amplitudes(v),
            Err(e) => {
                problems.push(format!("--amplitudes: {e}"));
                InitSpec::Ground
            }
        }
    } else if let Some(text) = raw.get("init") {
        match text.trim() {
            "ground" => InitSpec::Ground,
            "excited" => InitSpec::Excited,
            other => {
                problems.push(format!("--init: expected `ground` or `excited`, got `{other}`"));
                InitSpec::Ground
            }
        }
    } else {
        InitSpec::Alpha(axes["alpha"][0])
    };

    let format = match raw.get("format").map(|s| s.trim()) {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => {
            problems.push(format!("--format: expected `csv` or `json`, got `{other}`"));
            Format::Csv
        }
    };
    let task = match raw.get("task").map(|s| s.trim()) {
        None | Some("evolve") => Task::Evolve,
        Some("cpplane") => Task::CpPlane,
        Some("spectrum") => Task::Spectrum,
        Some(other) => {
            problems.push(format!("--task: expected `evolve`, `cpplane` or `spectrum`, got `{other}`"));
            Task::Evolve
        }
    };
    let seed = match raw.get("seed").map(|s| s.trim().parse::<u64>()) {
        None => 0,
        Some(Ok(v)) => v,
        Some(Err(_)) => {
            problems.push(format!("--seed: `{}` is not a non-negative integer", raw["seed"]));
            0
        }
    };
    let jobs = match raw.get("jobs").map(|s| s.trim().parse::<usize>()) {
        None => None,
        Some(Ok(v)) if v > 0 => Some(v),
        Some(_) => {
            problems.push(format!("--jobs: `{}` is not a positive integer", raw["jobs"]));
            None
        }
    };

    if !problems.is_empty() {
        return Err(CliError::Usage(problems));
    }
    Ok(RunConfig {
        axes,
        n_values: n_float.into_iter().map(|v| v as i64).collect(),
        init,
        tmax,
        dt,
        out: raw.get("out").map(PathBuf::from),
        format,
        seed,
        task,
        jobs,
    })
}
