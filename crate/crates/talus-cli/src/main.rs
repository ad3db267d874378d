//! Command-line driver for the two-layer granular pile models.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 step-control or CFL
//! failure, 3 property-check failure under `--check`. Every invocation is
//! deterministic: identical arguments and config produce byte-identical
//! output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use talus_core::diagnostics::{
    check_max_principle, check_max_principle_2d, check_nonneg_and_monotone,
    check_nonneg_and_monotone_2d, check_slope_bound, check_slope_bound_2d, refinement_study,
    CheckOutcome, Trajectory,
};
use talus_core::reference::{geyser_probe, run_pde, PdeModelKind};
use talus_core::scenario::{parse_scenario_named, Preset, ScenarioSpec, SchemeKind, ALL_PRESETS};
use talus_core::{io, Error};

#[derive(Parser)]
#[command(
    name = "talus",
    version,
    about = "Two-layer granular pile simulations (discrete schemes and PDE references)",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file (key = value schema).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for snapshots, diagnostics and the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the property checkers and gate the exit code on them.
    #[arg(long)]
    check: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Original,
    Modified,
}

impl From<ModelArg> for PdeModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Original => PdeModelKind::OriginalDiffusive,
            ModelArg::Modified => PdeModelKind::ModifiedConvective,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the 1-D discrete scheme on a scenario.
    Run1d(RunArgs),
    /// Run the 2-D discrete scheme on a scenario.
    Run2d(RunArgs),
    /// Run the 1-D scheme and a PDE reference model side by side.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Reference model to compare against.
        #[arg(long, value_enum, default_value = "original")]
        model: ModelArg,
    },
    /// Probe a PDE reference model for a geyser (rise of max(u+v)).
    Geyser {
        /// Scenario config file.
        #[arg(long)]
        config: PathBuf,
        /// Model to probe.
        #[arg(long, value_enum, default_value = "original")]
        model: ModelArg,
        /// Optional directory for the written report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh-refinement convergence study of the 1-D scheme.
    Converge {
        /// Scenario config file (grid.n is overridden by --meshes).
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated ascending mesh sizes, e.g. 50,100,200.
        #[arg(long)]
        meshes: String,
        /// Maximum number of meshes run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory for the report and per-mesh runs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in initial-condition presets, or describe one.
    Presets {
        /// Preset name to describe in detail.
        name: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints --help/--version output on stdout with success.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let outcome = match cli.command {
        Command::Run1d(args) => cmd_run1d(&args),
        Command::Run2d(args) => cmd_run2d(&args),
        Command::Compare { run, model } => cmd_compare(&run, model.into()),
        Command::Geyser { config, model, out } => cmd_geyser(&config, model.into(), out.as_deref()),
        Command::Converge {
            config,
            meshes,
            jobs,
            out,
        } => cmd_converge(&config, &meshes, jobs, out.as_deref()),
        Command::Presets { name } => cmd_presets(name.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::StepFailure { .. } | Error::CflFailure { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_config(path: &Path, expected: SchemeKind) -> Result<ScenarioSpec, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let spec = parse_scenario_named(&text, path)?;
    if spec.kind != expected {
        return Err(Error::Scenario(format!(
            "config {} declares kind = {}, expected {}",
            path.display(),
            kind_name(spec.kind),
            kind_name(expected)
        )));
    }
    Ok(spec)
}

fn kind_name(kind: SchemeKind) -> &'static str {
    match kind {
        SchemeKind::OneD => "1d",
        SchemeKind::TwoD => "2d",
    }
}

/// Prints the machine-readable verdict lines and returns the verdict list.
fn report_checks(checks: Vec<(&'static str, CheckOutcome)>) -> (Vec<(&'static str, bool)>, bool) {
    let mut verdicts = Vec::new();
    let mut all_pass = true;
    for (name, outcome) in checks {
        println!(
            "CHECK: {} {}",
            if outcome.pass { "pass" } else { "fail" },
            name
        );
        if !outcome.pass {
            all_pass = false;
            if let Some(w) = &outcome.worst {
                match w.node {
                    Some(node) => {
                        eprintln!(
                            "  worst violation at t = {}, node {}: {}",
                            w.t, node, w.value
                        )
                    }
                    None => eprintln!("  worst violation at t = {}: {}", w.t, w.value),
                }
            }
        }
        verdicts.push((name, outcome.pass));
    }
    (verdicts, all_pass)
}

fn gate(all_pass: bool) -> ExitCode {
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn write_run_1d(
    dir: &Path,
    spec: &ScenarioSpec,
    traj: &Trajectory,
    verdicts: &[(&str, bool)],
) -> Result<(), Error> {
    for (idx, snap) in traj.snapshots.iter().enumerate() {
        io::write_snapshot_1d(&dir.join(format!("snap{idx:03}.csv")), snap, &traj.grid)?;
    }
    io::write_diagnostics(&dir.join("diagnostics.csv"), &traj.series)?;
    io::write_manifest(&dir.join("manifest.txt"), spec, &traj.series, verdicts)
}

fn cmd_run1d(args: &RunArgs) -> Result<ExitCode, Error> {
    let spec = load_config(&args.config, SchemeKind::OneD)?;
    let traj = talus_core::scheme1d::run1d(&spec)?;
    println!(
        "run1d: n = {}, {} accepted steps, {} snapshots, final t = {}",
        spec.n,
        traj.series.len(),
        traj.snapshots.len(),
        traj.series.last().map_or(0.0, |r| r.t)
    );
    let (verdicts, all_pass) = if args.check {
        report_checks(vec![
            ("max_principle", check_max_principle(&traj)),
            (
                "critical_slope",
                check_slope_bound(&traj, spec.params.alpha),
            ),
            ("nonneg_monotone", check_nonneg_and_monotone(&traj)),
        ])
    } else {
        (Vec::new(), true)
    };
    if let Some(dir) = &args.out {
        write_run_1d(dir, &spec, &traj, &verdicts)?;
    }
    Ok(gate(all_pass))
}

fn cmd_run2d(args: &RunArgs) -> Result<ExitCode, Error> {
    let spec = load_config(&args.config, SchemeKind::TwoD)?;
    let traj = talus_core::scheme2d::run2d(&spec)?;
    println!(
        "run2d: n = {}, {} accepted steps, {} snapshots, final t = {}",
        spec.n,
        traj.series.len(),
        traj.snapshots.len(),
        traj.series.last().map_or(0.0, |r| r.t)
    );
    let (verdicts, all_pass) = if args.check {
        report_checks(vec![
            ("max_principle", check_max_principle_2d(&traj)),
            (
                "critical_slope",
                check_slope_bound_2d(&traj, spec.params.alpha),
            ),
            ("nonneg_monotone", check_nonneg_and_monotone_2d(&traj)),
        ])
    } else {
        (Vec::new(), true)
    };
    if let Some(dir) = &args.out {
        for (idx, snap) in traj.snapshots.iter().enumerate() {
            io::write_snapshot_2d(dir, &format!("snap{idx:03}"), snap, &traj.grid)?;
        }
        io::write_diagnostics(&dir.join("diagnostics.csv"), &traj.series)?;
        io::write_manifest(&dir.join("manifest.txt"), &spec, &traj.series, &verdicts)?;
    }
    Ok(gate(all_pass))
}

fn cmd_compare(args: &RunArgs, model: PdeModelKind) -> Result<ExitCode, Error> {
    let spec = load_config(&args.config, SchemeKind::OneD)?;
    let scheme = talus_core::scheme1d::run1d(&spec)?;
    let pde = run_pde(&spec, model)?;
    let pairs = scheme.snapshots.len().min(pde.snapshots.len());
    println!(
        "compare: scheme vs {} model, {} common snapshots",
        model.name(),
        pairs
    );
    let mut rows = String::from("scheduled_t,u_sup_gap,v_sup_gap\n");
    for idx in 0..pairs {
        let a = &scheme.snapshots[idx].state;
        let b = &pde.snapshots[idx].state;
        let sup = |xs: &[f64], ys: &[f64]| {
            xs.iter()
                .zip(ys)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0_f64, f64::max)
        };
        let (du, dv) = (sup(&a.u, &b.u), sup(&a.v, &b.v));
        println!(
            "  t = {}: sup|u_scheme - u_pde| = {du:.6e}, sup|v_scheme - v_pde| = {dv:.6e}",
            scheme.snapshots[idx].scheduled_t
        );
        rows.push_str(&format!(
            "{},{du},{dv}\n",
            scheme.snapshots[idx].scheduled_t
        ));
    }
    let (verdicts, all_pass) = if args.check {
        report_checks(vec![
            ("max_principle", check_max_principle(&scheme)),
            (
                "critical_slope",
                check_slope_bound(&scheme, spec.params.alpha),
            ),
            ("nonneg_monotone", check_nonneg_and_monotone(&scheme)),
        ])
    } else {
        (Vec::new(), true)
    };
    if let Some(dir) = &args.out {
        write_run_1d(&dir.join("scheme"), &spec, &scheme, &verdicts)?;
        write_run_1d(&dir.join(model.name()), &spec, &pde, &[])?;
        let path = dir.join("compare.csv");
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        fs::write(&path, rows).map_err(|source| Error::Io { path, source })?;
    }
    Ok(gate(all_pass))
}

fn cmd_geyser(config: &Path, model: PdeModelKind, out: Option<&Path>) -> Result<ExitCode, Error> {
    let spec = load_config(config, SchemeKind::OneD)?;
    let report = geyser_probe(&spec, model)?;
    println!("geyser probe: {} model on n = {}", model.name(), spec.n);
    println!("  anchor x0 = {} (node {})", report.x0, report.x0_node);
    println!("  initial max(u+v) = {}", report.initial_max);
    println!("  predicted first-step rate = {}", report.predicted_rate);
    println!("  measured first-step rate  = {}", report.measured_rate);
    match report.exceedance {
        Some((t, mag)) => println!(
            "  geyser: yes — max(u+v) exceeded the initial maximum by {mag} at t = {t} (tolerance {})",
            report.tolerance
        ),
        None => println!(
            "  geyser: none — max(u+v) stayed within tolerance {} of the initial maximum",
            report.tolerance
        ),
    }
    if let Some(dir) = out {
        io::write_geyser_report(&dir.join(format!("geyser_{}.txt", model.name())), &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_converge(
    config: &Path,
    meshes: &str,
    jobs: usize,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let spec = load_config(config, SchemeKind::OneD)?;
    let meshes: Vec<usize> = meshes
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Scenario(format!("invalid mesh size '{tok}' in --meshes")))
        })
        .collect::<Result<_, _>>()?;
    if meshes.len() < 2 || meshes.windows(2).any(|w| w[1] <= w[0]) || meshes[0] < 2 {
        return Err(Error::Scenario(
            "--meshes needs at least two ascending sizes, all >= 2".into(),
        ));
    }
    if jobs == 0 {
        return Err(Error::Scenario("--jobs must be at least 1".into()));
    }
    let report = refinement_study(&spec, &meshes, jobs)?;
    println!("converge: meshes {meshes:?}");
    for (i, pair) in meshes.windows(2).enumerate() {
        println!(
            "  n = {} -> {}: sup-norm u gap = {:.6e}, L2 v gap = {:.6e}",
            pair[0], pair[1], report.u_gaps[i], report.v_gaps_l2[i]
        );
    }
    println!(
        "  u gaps non-increasing: {}",
        if report.non_increasing() { "yes" } else { "no" }
    );
    if let Some(dir) = out {
        io::write_convergence_report(&dir.join("convergence.csv"), &report)?;
        for &n in &meshes {
            let mesh_spec = ScenarioSpec { n, ..spec.clone() };
            let traj = talus_core::scheme1d::run1d(&mesh_spec)?;
            write_run_1d(&dir.join(format!("mesh_{n}")), &mesh_spec, &traj, &[])?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_presets(name: Option<&str>) -> Result<ExitCode, Error> {
    match name {
        None => {
            for preset in ALL_PRESETS {
                println!(
                    "{:<16} [{}] {}",
                    preset.name(),
                    kind_name(preset_kind(preset)),
                    preset.describe()
                );
            }
        }
        Some(name) => {
            let preset = Preset::from_name(name).ok_or_else(|| {
                Error::Scenario(format!("unknown preset '{name}' (see `talus presets`)"))
            })?;
            println!("{}: {}", preset.name(), preset.describe());
            println!();
            println!("# default scenario (n = 200)");
            let spec = ScenarioSpec::preset(preset_kind(preset), preset, 200);
            print!("{}", talus_core::scenario::render_scenario(&spec));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn preset_kind(preset: Preset) -> SchemeKind {
    if preset.is_2d() {
        SchemeKind::TwoD
    } else {
        SchemeKind::OneD
    }
}
