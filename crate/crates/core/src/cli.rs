//! Command-line front end. Exit status 0 means success or pass, 1 a failed
//! check or an unconverged solve, 2 a usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::certify::verify_calibration;
use crate::config::Settings;
use crate::error::{Error, Result};
use crate::grid::{BoundaryFace, DomainGrid, ScalarField, VectorField};
use crate::io::{load_field, load_scalar, read_header, save_field, save_pgm, save_scalar};
use crate::levelset::{continuity_scan, extract_levelsets, save_levelsets_csv, segment_check};
use crate::operators::{dual_objective, primal_objective, Axis, GradientOperator};
use crate::scenarios::{all, get_scenario, Scenario};
use crate::solver::solve;

#[derive(Parser, Debug)]
#[command(name = "lgrad", about = "Anisotropic least gradient solver and certificate checker")]
struct Cli {
    /// `key = value` settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a scenario and write u.csv, z_x.csv, z_y.csv, report.txt, u.pgm.
    Solve(SolveArgs),
    /// Check a (u, z) pair against the calibration conditions.
    Certify(PairArgs),
    /// Extract level curves of u as CSV polylines.
    Levelsets(LevelArgs),
    /// Oscillation, trace error and hotspots of u.
    Scan(FieldArgs),
    /// Primal and dual objectives of a (u, z) pair.
    Gap(PairArgs),
    /// List the built-in scenarios.
    List,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, alias = "gap-tol")]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run the kernels on the calling thread only.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FieldArgs {
    #[arg(long)]
    scenario: String,
    /// Resolution; read from the field file header when omitted.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    u: PathBuf,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    zx: PathBuf,
    #[arg(long)]
    zy: PathBuf,
}

#[derive(Args, Debug)]
struct LevelArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    levels: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

/// Parse `args` (program name first) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::NumericalFailure { .. } => 1,
                _ => 2,
            }
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let mut settings = Settings::default();
    if let Some(p) = &cli.config {
        settings.merge_file(p)?;
    }
    match cli.command {
        Command::Solve(a) => cmd_solve(settings, a, out),
        Command::Certify(a) => cmd_certify(settings, a, out),
        Command::Levelsets(a) => cmd_levelsets(settings, a, out),
        Command::Scan(a) => cmd_scan(settings, a, out),
        Command::Gap(a) => cmd_gap(settings, a, out),
        Command::List => {
            for s in all() {
                writeln!(out, "{:<14} {}", s.name, s.summary)?;
            }
            Ok(0)
        }
    }
}

struct Loaded {
    scenario: Scenario,
    n: usize,
    grid: DomainGrid,
    faces: Vec<BoundaryFace>,
    op: GradientOperator,
    u: ScalarField,
}

fn resolution(explicit: Option<usize>, settings: &Settings, file: &Path) -> Result<usize> {
    if let Some(n) = explicit {
        return Ok(n);
    }
    let h = read_header(file)?.h;
    let n = (1.0 / h).round();
    if !(n >= 1.0) || ((1.0 / n) - h).abs() > 1e-9 * h {
        return Ok(settings.n);
    }
    Ok(n as usize)
}

fn load(settings: &Settings, a: &FieldArgs) -> Result<Loaded> {
    let scenario = get_scenario(&a.scenario)?;
    if !a.u.exists() {
        return Err(Error::InvalidArgument(format!("no such file: {}", a.u.display())));
    }
    let n = resolution(a.n, settings, &a.u)?;
    let (grid, faces, op) = scenario.discretize(n)?;
    let u = load_scalar(&a.u, &grid)?;
    Ok(Loaded { scenario, n, grid, faces, op, u })
}

fn load_z(grid: &DomainGrid, a: &PairArgs) -> Result<VectorField> {
    for p in [&a.zx, &a.zy] {
        if !p.exists() {
            return Err(Error::InvalidArgument(format!("no such file: {}", p.display())));
        }
    }
    Ok(VectorField { x: load_field(&a.zx, grid)?, y: load_field(&a.zy, grid)? })
}

fn cmd_solve(mut settings: Settings, a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let scenario = get_scenario(&a.scenario)?;
    if let Some(n) = a.n {
        settings.n = n;
    }
    if let Some(t) = a.tol {
        settings.tol = t;
    }
    if let Some(k) = a.max_iters {
        settings.max_iters = k;
    }
    if a.seed.is_some() {
        settings.seed = a.seed;
    }
    if a.sequential {
        settings.parallel = false;
    }
    let cfg = settings.solve_config();
    cfg.validate()?;
    let (grid, _, op) = scenario.discretize(settings.n)?;
    let rep = solve(&scenario.anisotropy(), &grid, &op, &cfg)?;
    fs::create_dir_all(&a.out)?;
    save_scalar(&a.out.join("u.csv"), &grid, &rep.u)?;
    save_field(&a.out.join("z_x.csv"), &grid, &rep.z.x, &op.carried(Axis::X))?;
    save_field(&a.out.join("z_y.csv"), &grid, &rep.z.y, &op.carried(Axis::Y))?;
    save_pgm(&a.out.join("u.pgm"), &grid, &rep.u)?;
    let mut report = format!(
        "scenario={}\nn={}\niters={}\nconverged={}\nprimal={:?}\ndual={:?}\ngap={:e}\nrel_gap={:e}\n",
        scenario.name,
        settings.n,
        rep.iters_used,
        rep.converged,
        rep.primal(),
        rep.dual(),
        rep.gap(),
        rep.rel_gap()
    );
    let opt = scenario.optimum();
    report.push_str(&format!("optimum={:?}\noptimum_source={}\n", opt.value, opt.provenance));
    fs::write(a.out.join("report.txt"), &report)?;
    let mut trace = String::from("iter,primal,dual,gap\n");
    for e in &rep.trace {
        trace.push_str(&format!("{},{:?},{:?},{:?}\n", e.iter, e.primal, e.dual, e.gap));
    }
    fs::write(a.out.join("trace.csv"), trace)?;
    write!(out, "{report}")?;
    Ok(if rep.converged { 0 } else { 1 })
}

fn cmd_certify(settings: Settings, a: PairArgs, out: &mut dyn Write) -> Result<i32> {
    let l = load(&settings, &a.field)?;
    let z = load_z(&l.grid, &a)?;
    let tols = settings.tolerances(l.n).excluding(l.scenario.flagged_points());
    let r = verify_calibration(&l.scenario.anisotropy(), &l.grid, &l.faces, &l.u, &z, &tols)?;
    write!(out, "{}", r.to_key_value())?;
    Ok(if r.pass { 0 } else { 1 })
}

fn cmd_gap(settings: Settings, a: PairArgs, out: &mut dyn Write) -> Result<i32> {
    let l = load(&settings, &a.field)?;
    let mut z = load_z(&l.grid, &a)?;
    l.op.canonicalize(&mut z);
    let p = primal_objective(&l.scenario.anisotropy(), &l.op, &l.u)?;
    let d = dual_objective(&l.op, &z)?;
    writeln!(out, "primal={p:?}\ndual={d:?}\ngap={:e}\nrel_gap={:e}", p - d, (p - d) / p.abs().max(1.0))?;
    Ok(0)
}

fn cmd_levelsets(settings: Settings, a: LevelArgs, out: &mut dyn Write) -> Result<i32> {
    let l = load(&settings, &a.field)?;
    let mut curves = extract_levelsets(&l.grid, &l.u, &a.levels)?;
    if settings.skip_jump_levels {
        let (lo, hi) = l.op.datum_range();
        let jump = settings.hotspot_thresh.unwrap_or(crate::levelset::HOTSPOT_FRACTION * (hi - lo));
        curves = curves.iter().map(|c| c.without_jump_bands(jump)).collect();
    }
    fs::create_dir_all(&a.out)?;
    save_levelsets_csv(&a.out.join("levelsets.csv"), &curves)?;
    let m = l.scenario.anisotropy();
    for c in &curves {
        write!(out, "t={:?} polylines={}", c.t, c.polylines.len())?;
        if let Ok(dev) = segment_check(&m, c) {
            write!(out, " max_deviation={:e}", dev.iter().copied().fold(0.0, f64::max))?;
        }
        writeln!(out)?;
    }
    Ok(0)
}

fn cmd_scan(settings: Settings, a: FieldArgs, out: &mut dyn Write) -> Result<i32> {
    let l = load(&settings, &a)?;
    let r = continuity_scan(
        &l.grid,
        &l.faces,
        &l.u,
        &l.scenario.flagged_points(),
        settings.exclusion_cells * l.grid.h,
        settings.hotspot_thresh,
    )?;
    write!(out, "{}", r.to_key_value())?;
    writeln!(out, "clusters={}", crate::levelset::cluster_hotspots(&l.grid, &r).len())?;
    Ok(0)
}
