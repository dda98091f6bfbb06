//! The subcommands, each turning a resolved configuration into tables.

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::PathBuf;

use cavity_duo::entanglement::cp_point;
use cavity_duo::model::build_block;
use cavity_duo::symmetric::{cp_curves, CPCurveSet, SymmetricParams};
use cavity_duo::validation::{run_suite, time_grid, CheckResult};
use cavity_duo::{spectral_decompose, InitialState, Propagator};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::config::{InitSpec, Point, RunConfig, Task};
use crate::error::CliError;
use crate::table::{write_atomic, Cell, Table};

/// Samples per reference curve in `cpplane`.
const CURVE_SAMPLES: usize = 1001;

fn initial_state(point: &Point) -> Result<InitialState, CliError> {
    let sector = point.sector;
    let state = match &point.init {
        InitSpec::Alpha(alpha) => InitialState::alpha_family(sector, *alpha)?,
        InitSpec::Ground => InitialState::ground_photon(sector)?,
        InitSpec::Excited => InitialState::excited_pair(sector)?,
        InitSpec::Amplitudes(v) => {
            let mut b = [Complex64::new(0.0, 0.0); 4];
            b[..v.len()].copy_from_slice(v);
            InitialState::new(sector, b)?
        }
    };
    Ok(state)
}

pub fn spectrum(point: &Point) -> Result<Table, CliError> {
    point.params.validate()?;
    let block = build_block(&point.params, point.sector)?;
    let dec = spectral_decompose(&point.params, point.sector)?;
    let mut table = Table::new(&["j", "energy", "v1", "v2", "v3", "v4", "residual", "method"]);
    for j in 0..dec.dim() {
        let v = dec.column(j);
        let hv = block.apply(&v);
        let residual = (0..4).map(|k| (hv[k] - dec.energies[j] * v[k]).powi(2)).sum::<f64>().sqrt();
        let mut row: Vec<Cell> = vec![(j as i64 + 1).into(), dec.energies[j].into()];
        row.extend(v.iter().map(|&x| Cell::Num(x)));
        row.push(residual.into());
        row.push(dec.method.as_str().into());
        table.push(row);
    }
    Ok(table)
}

pub fn evolve(point: &Point, tmax: f64, dt: f64) -> Result<Table, CliError> {
    point.params.validate()?;
    let init = initial_state(point)?;
    let prop = Propagator::new(&point.params, point.sector)?;
    let mut columns = vec!["t".to_owned()];
    for k in 1..=4 {
        columns.push(format!("re_b{k}"));
        columns.push(format!("im_b{k}"));
    }
    columns.extend(["purity".to_owned(), "concurrence".to_owned()]);
    let mut table = Table::new(&columns);
    for t in time_grid(tmax, dt) {
        let s = prop.evolve(&init, t)?;
        let cp = cp_point(&s);
        let mut row = vec![Cell::Num(t)];
        for b in s.b {
            row.push(b.re.into());
            row.push(b.im.into());
        }
        row.push(cp.purity.into());
        row.push(cp.concurrence.into());
        table.push(row);
    }
    Ok(table)
}

fn push_curves(table: &mut Table, set: &CPCurveSet, suffix: &str, include: impl Fn(&str) -> bool) {
    for curve in set.curves().filter(|c| include(&c.name)) {
        let name = format!("{}{suffix}", curve.name);
        for (x, pt) in curve.param.iter().zip(&curve.points) {
            table.push(vec![name.as_str().into(), (*x).into(), pt.purity.into(), pt.concurrence.into()]);
        }
    }
}

/// Trajectory in the CP-plane plus reference curves. With symmetric
/// couplings and an α-family start in `n ≥ 0`, the non-interacting curves
/// for the same `α` and for `α = π/4` are included.
pub fn cpplane(point: &Point, tmax: f64, dt: f64) -> Result<Table, CliError> {
    point.params.validate()?;
    let init = initial_state(point)?;
    let prop = Propagator::new(&point.params, point.sector)?;
    let mut table = Table::new(&["series", "param", "purity", "concurrence"]);
    for t in time_grid(tmax, dt) {
        let cp = cp_point(&prop.evolve(&init, t)?);
        table.push(vec!["trajectory".into(), t.into(), cp.purity.into(), cp.concurrence.into()]);
    }

    let is_branch = |name: &str| name == "c_minus" || name == "c_plus";
    let n = point.sector.n();
    match point.init {
        InitSpec::Alpha(alpha) if point.params.is_symmetric() && n >= 0 => {
            let free = SymmetricParams::new(n as u32, alpha, 0.0, 0.0)?;
            push_curves(&mut table, &cp_curves(&free, CURVE_SAMPLES)?, "_alpha", is_branch);
            let bell = cp_curves(&free.with_alpha(FRAC_PI_4), CURVE_SAMPLES)?;
            push_curves(&mut table, &bell, "_bell", is_branch);
            push_curves(&mut table, &bell, "", |name| !is_branch(name));
        }
        _ => {
            let reference = cp_curves(&SymmetricParams::new(0, FRAC_PI_4, 0.0, 0.0)?, CURVE_SAMPLES)?;
            push_curves(&mut table, &reference, "", |name| !is_branch(name));
        }
    }
    Ok(table)
}

fn run_task(cfg: &RunConfig, point: &Point) -> Result<Table, CliError> {
    match cfg.task {
        Task::Spectrum => spectrum(point),
        Task::Evolve => evolve(point, cfg.tmax, cfg.dt),
        Task::CpPlane => cpplane(point, cfg.tmax, cfg.dt),
    }
}

/// Runs every point of the Cartesian product, then writes one file per
/// point and an index. Nothing is written unless every point succeeded;
/// if a write fails, files already written by this run are removed.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let Some(dir) = cfg.out.as_deref() else {
        return Err(CliError::Usage(vec!["--out: sweep needs an output directory".into()]));
    };
    let points = cfg.points();
    let compute = || -> Result<Vec<String>, CliError> {
        points.par_iter().map(|p| run_task(cfg, p)?.encode(cfg.format)).collect()
    };
    let encoded = match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Usage(vec![format!("--jobs: {e}")]))?
            .install(compute)?,
        None => compute()?,
    };

    let ext = cfg.format.extension();
    let width = points.len().saturating_sub(1).to_string().len().max(4);
    let names: Vec<String> = (0..points.len()).map(|i| format!("point_{i:0width$}.{ext}")).collect();

    let with_alpha = matches!(cfg.init, InitSpec::Alpha(_));
    let mut columns = vec!["point", "file", "task", "n"];
    if with_alpha {
        columns.push("alpha");
    }
    columns.extend(["kappa", "ising", "delta1", "delta2", "g1", "g2"]);
    let mut index = Table::new(&columns);
    for (i, (p, name)) in points.iter().zip(&names).enumerate() {
        let mut row: Vec<Cell> =
            vec![(i as i64).into(), name.as_str().into(), cfg.task.as_str().into(), p.sector.n().into()];
        if let InitSpec::Alpha(alpha) = p.init {
            row.push(alpha.into());
        }
        let q = &p.params;
        row.extend([q.kappa, q.ising, q.delta1, q.delta2, q.g1, q.g2].map(Cell::Num));
        index.push(row);
    }
    let index_text = index.encode(cfg.format)?;

    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
    let mut written = Vec::new();
    let files = names.iter().map(|n| dir.join(n)).zip(encoded.iter().map(String::as_str));
    let index_path = dir.join(format!("index.{ext}"));
    for (path, text) in files.chain([(index_path, index_text.as_str())]) {
        if let Err(e) = write_atomic(&path, text) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(written)
}

pub fn validate(seed: u64) -> Result<Vec<CheckResult>, CliError> {
    let mut rng = StdRng::seed_from_u64(seed);
    Ok(run_suite(&mut rng)?)
}

pub fn validation_table(results: &[CheckResult]) -> Table {
    let mut table = Table::new(&["check", "value", "tolerance", "kind", "passed"]);
    for r in results {
        let kind = if r.lower_bound { "min" } else { "max" };
        table.push(vec![
            r.name.into(),
            r.value.into(),
            r.tolerance.into(),
            kind.into(),
            i64::from(r.passed()).into(),
        ]);
    }
    table
}
