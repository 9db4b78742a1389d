//! `sdns`: simulations, verifications and stationary searches for the self-dual reduction.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use selfdual_ns::axisym::{confined_profile, make_axisym_grid, run_axisym, AxisymRecord, AxisymScalar, AxisymSolver, TermSet};
use selfdual_ns::config::{parse_config, InitialKind, SimConfig};
use selfdual_ns::diagnostics::{blowup_monitors, compute_record, write_csv, DiagnosticsRecord, Monitor};
use selfdual_ns::helical::build_basis;
use selfdual_ns::initial::{scalar_from_config, velocity_from_config};
use selfdual_ns::kernels::verify_kernels;
use selfdual_ns::ns::{run, selfdual_initial, RunFailure};
use selfdual_ns::scalar::run_scalar;
use selfdual_ns::snapshot::{read_snapshot, write_snapshot, Snapshot, SnapshotKind};
use selfdual_ns::stationary::{bmo_diagnostic, solve_stationary, NewtonParams};
use selfdual_ns::verification::{verify_equivalence, verify_symmetry, TrajectoryCheck};
use selfdual_ns::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "sdns", version, about = "Self-dual Navier–Stokes toolkit")]
struct Cli {
    /// Run configuration (`key = value` file); defaults apply without one.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `output.dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Overrides `initial.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results are reproducible for a fixed count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the velocity with the pseudo-spectral Navier–Stokes solver.
    SimulateNs,
    /// Evolve the scalar profile `v` of a self-dual flow.
    SimulateSelfdual,
    /// Evolve an axisymmetric profile `v(r, z)`.
    SimulateAxisym(AxisymArgs),
    /// Compare the closed-form triad kernels with direct evaluation.
    VerifyKernels {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Velocity run from self-dual data against the reconstructed scalar run.
    VerifyEquivalence(CheckArgs),
    /// Velocity run against the run of its dual image.
    VerifySymmetry(CheckArgs),
    /// Newton–Krylov search for a stationary potential `w`.
    FindStationary(StationaryArgs),
    /// Print the diagnostics of a snapshot.
    Diagnose { snapshot: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Consistent,
    AsPublished,
}

impl From<Table> for TermSet {
    fn from(t: Table) -> Self {
        match t {
            Table::Consistent => TermSet::Consistent,
            Table::AsPublished => TermSet::AsPublished,
        }
    }
}

#[derive(Args)]
struct ProfileArgs {
    /// Radial quadrature nodes; defaults to the first resolution entry.
    #[arg(long)]
    radial_nodes: Option<usize>,
    /// Radial width of the generated profile; defaults to an eighth of the radius.
    #[arg(long)]
    width: Option<f64>,
    /// Axial modes of the generated profile.
    #[arg(long, default_value_t = 2)]
    modes: usize,
    /// Form of the quadratic terms.
    #[arg(long, value_enum, default_value_t = Table::Consistent)]
    table: Table,
}

#[derive(Args)]
struct AxisymArgs {
    #[command(flatten)]
    profile: ProfileArgs,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 32)]
    resolution: usize,
    #[arg(long, default_value_t = 0.5)]
    t_end: f64,
    /// Largest deviation counted as agreement.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct StationaryArgs {
    #[arg(long, default_value_t = 0.05)]
    nu: f64,
    #[arg(long, default_value_t = 30)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Axisymmetric snapshot holding the initial potential.
    #[arg(long)]
    guess: Option<PathBuf>,
    #[command(flatten)]
    profile: ProfileArgs,
}

/// Why a command did not succeed, mapped onto the exit code.
enum Failure {
    Usage(String),
    Verification(String),
    Divergence(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence { .. } => Failure::Divergence(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("I/O: {e}"))
    }
}

impl From<selfdual_ns::snapshot::SnapshotError> for Failure {
    fn from(e: selfdual_ns::snapshot::SnapshotError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Context {
    cfg: SimConfig,
    seed: u64,
}

impl Context {
    fn output(&self, name: &str) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.cfg.output_dir)?;
        Ok(self.cfg.output_dir.join(name))
    }
}

fn load_context(cli: &Cli) -> Result<Context, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => SimConfig::default(),
    };
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(Context { seed: cfg.seed, cfg })
}

fn write_text(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<(), Failure> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON on stdout; a reader closing the pipe early is not an error.
fn emit_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write_diagnostics(ctx: &Context, records: &[DiagnosticsRecord]) -> Result<(), Failure> {
    let path = ctx.output("diagnostics.csv")?;
    write_csv(BufWriter::new(File::create(&path)?), records)?;
    let blowup = blowup_monitors(records);
    if let Some(t) = blowup.resolution_lost_at {
        log::warn!("spectral tail above threshold from t = {t}; later samples are under-resolved");
    }
    println!("wrote {} ({} samples)", path.display(), records.len());
    Ok(())
}

fn finish<S, R>(
    ctx: &Context,
    result: Result<(Vec<DiagnosticsRecord>, S), RunFailure<S, R>>,
    records_of: impl Fn(&RunFailure<S, R>) -> Vec<DiagnosticsRecord>,
    save: impl Fn(&S, &Path) -> Result<(), Failure>,
) -> Outcome {
    match result {
        Ok((records, state)) => {
            write_diagnostics(ctx, &records)?;
            let path = ctx.output("final.sdns")?;
            save(&state, &path)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Err(failure) => {
            write_diagnostics(ctx, &records_of(&failure))?;
            let path = ctx.output("last_good.sdns")?;
            save(&failure.last_good, &path)?;
            println!("wrote {}", path.display());
            Err(Failure::from(failure.error))
        }
    }
}

fn simulate_ns(ctx: &Context) -> Outcome {
    let u0 = velocity_from_config(&ctx.cfg, ctx.seed)?;
    let cfg = &ctx.cfg;
    let result = run(cfg, u0, |_, r| log::info!("t = {:.4} E = {:.6e}", r.t, r.energy)).map(|t| (t.records, t.final_state));
    finish(ctx, result, |f| f.records.clone(), |s, path| {
        Ok(write_snapshot(path, &Snapshot::from_vector(&s.u, s.t, cfg.nu, cfg.scheme))?)
    })
}

fn simulate_selfdual(ctx: &Context) -> Outcome {
    let cfg = &ctx.cfg;
    let grid = selfdual_ns::spectral::make_grid(cfg.resolution, cfg.box_size)?;
    let basis = Arc::new(build_basis(&grid));
    let v0 = scalar_from_config(cfg, &basis, ctx.seed)?;
    let result = run_scalar(cfg, v0, basis, |_, r| log::info!("t = {:.4} E = {:.6e}", r.t, r.energy))
        .map(|t| (t.records, t.final_state));
    finish(ctx, result, |f| f.records.clone(), |s, path| {
        Ok(write_snapshot(path, &Snapshot::from_scalar(&s.v, s.t, cfg.nu, cfg.scheme))?)
    })
}

fn axisym_profile(ctx: &Context, args: &ProfileArgs, path: Option<&Path>) -> Result<AxisymScalar, Failure> {
    let cfg = &ctx.cfg;
    let from_file = path.map(Path::to_path_buf).or_else(|| match cfg.initial.kind {
        InitialKind::File => cfg.initial.path.clone(),
        _ => None,
    });
    if let Some(path) = from_file {
        let snap = read_snapshot(&path)?;
        snap.expect_kind(SnapshotKind::Axisym)?;
        return Ok(snap.to_axisym()?);
    }
    let radius = 0.5 * cfg.box_size;
    let grid = make_axisym_grid(args.radial_nodes.unwrap_or(cfg.resolution[0]), cfg.resolution[2], radius, cfg.box_size)?;
    let width = args.width.unwrap_or(radius / 8.0);
    Ok(confined_profile(&grid, width, args.modes, cfg.initial.amplitude, ctx.seed))
}

fn simulate_axisym(ctx: &Context, args: &AxisymArgs) -> Outcome {
    let cfg = &ctx.cfg;
    let v0 = axisym_profile(ctx, &args.profile, None)?;
    let mut solver = AxisymSolver::new(&v0, cfg.nu, cfg.dt, cfg.scheme, args.profile.table.into())?;
    let result = run_axisym(&mut solver, cfg.steps(), cfg.output_every, |_, r| {
        log::info!("t = {:.4} |v| = {:.6e}", r.t, r.norm)
    });
    let (records, state, error) = match result {
        Ok(t) => (t.records, t.final_state, None),
        Err(f) => (f.records, f.last_good, Some(f.error)),
    };
    let csv = ctx.output("axisym.csv")?;
    write_text(&csv, AxisymRecord::CSV_HEADER, records.iter().map(AxisymRecord::csv_row))?;
    let snap = ctx.output(if error.is_some() { "last_good.sdns" } else { "final.sdns" })?;
    write_snapshot(&snap, &Snapshot::from_axisym(&state.v, state.t, cfg.nu, cfg.scheme))?;
    println!("wrote {} ({} samples) and {}", csv.display(), records.len(), snap.display());
    error.map_or(Ok(()), |e| Err(e.into()))
}

fn verify_kernels_cmd(ctx: &Context, samples: usize, tol: f64) -> Outcome {
    let report = verify_kernels(samples, ctx.seed, tol);
    emit_json(&report)?;
    for v in &report.variants {
        eprintln!(
            "{:>9}: closed vs direct {:.3e}, vs toggled {:.3e}, parity {}/{}",
            v.variant.name(),
            v.max_abs_deviation,
            v.max_abs_deviation_toggled,
            v.parity_confirmed,
            report.samples
        );
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("closed forms deviate beyond {tol:e}")))
    }
}

fn trajectory_check(ctx: &Context, args: &CheckArgs) -> TrajectoryCheck {
    TrajectoryCheck { resolution: args.resolution, t_end: args.t_end, seed: ctx.seed, ..TrajectoryCheck::default() }
}

fn report_check(name: &str, deviation: f64, tol: f64) -> Outcome {
    println!("{name}: max relative trajectory deviation {deviation:.3e} (tolerance {tol:.1e})");
    if deviation <= tol {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{name} deviation {deviation:.3e} exceeds {tol:.1e}")))
    }
}

fn find_stationary(ctx: &Context, args: &StationaryArgs) -> Outcome {
    let w0 = axisym_profile(ctx, &args.profile, args.guess.as_deref())?;
    let params = NewtonParams { max_iter: args.max_iter, tol: args.tol, set: args.profile.table.into(), ..NewtonParams::default() };
    let out = solve_stationary(&w0, args.nu, &params)?;
    let csv = ctx.output("newton.csv")?;
    write_text(
        &csv,
        "iteration,residual_norm,step_length,krylov_iterations,krylov_residual",
        out.history.iter().map(|s| {
            format!("{},{:e},{:e},{},{:e}", s.iteration, s.residual_norm, s.step_length, s.krylov_iterations, s.krylov_residual)
        }),
    )?;
    let snap = ctx.output("stationary.sdns")?;
    write_snapshot(&snap, &Snapshot::from_axisym(&out.w, 0.0, args.nu, ctx.cfg.scheme))?;
    let bmo = bmo_diagnostic(&out.w);
    println!(
        "residual {:.3e} after {} iterations; sup|w_r| {:.3e}, BMO proxy {:.3e}; wrote {} and {}",
        out.residual_norm,
        out.history.len() - 1,
        bmo.sup_wr,
        bmo.bmo_proxy,
        csv.display(),
        snap.display()
    );
    match out.failure {
        None => Ok(()),
        Some(reason) => Err(Failure::Verification(format!("no convergence: {reason}"))),
    }
}

fn diagnose(path: &Path) -> Outcome {
    let snap = read_snapshot(path)?;
    match snap.kind {
        SnapshotKind::Vector3d => {
            let u = snap.to_vector()?;
            let r = compute_record(snap.time, &u, None, &mut Monitor::new(snap.nu));
            emit_json(&r)?;
        }
        SnapshotKind::Scalar3d => {
            let v = snap.to_scalar()?;
            let basis = build_basis(v.grid());
            let r = compute_record(snap.time, &selfdual_initial(&v, &basis), None, &mut Monitor::new(snap.nu));
            emit_json(&r)?;
        }
        SnapshotKind::Axisym => {
            let v = snap.to_axisym()?;
            let bmo = bmo_diagnostic(&v);
            let report = serde_json::json!({
                "t": snap.time,
                "norm": v.norm(),
                "max_abs": v.max_abs(),
                "edge_ratio": v.edge_ratio(),
                "confined": v.is_confined(),
                "sup_wr": bmo.sup_wr,
                "bmo_proxy": bmo.bmo_proxy,
            });
            emit_json(&report)?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Outcome {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    if let Command::Diagnose { snapshot } = &cli.command {
        return diagnose(snapshot);
    }
    let ctx = load_context(cli)?;
    match &cli.command {
        Command::SimulateNs => simulate_ns(&ctx),
        Command::SimulateSelfdual => simulate_selfdual(&ctx),
        Command::SimulateAxisym(args) => simulate_axisym(&ctx, args),
        Command::VerifyKernels { samples, tol } => verify_kernels_cmd(&ctx, *samples, *tol),
        Command::VerifyEquivalence(args) => {
            let r = verify_equivalence(&trajectory_check(&ctx, args))?;
            report_check("equivalence", r.max_deviation, args.tol)
        }
        Command::VerifySymmetry(args) => {
            let r = verify_symmetry(&trajectory_check(&ctx, args))?;
            report_check("symmetry", r.max_deviation, args.tol)
        }
        Command::FindStationary(args) => find_stationary(&ctx, args),
        Command::Diagnose { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFICATION)
        }
        Err(Failure::Divergence(m)) => {
            eprintln!("numerical divergence: {m}");
            ExitCode::from(EXIT_DIVERGENCE)
        }
    }
}
