use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gamesmooth::format::save_off;
use gamesmooth::game::DEFAULT_BUDGET;
use gamesmooth::svg::{emit_svg, Layer, Style};
use gamesmooth::{
    run_compare, smooth, GameConfig, MeshSource, Metric, Mode, RunSpec, SmoothingConfig,
    SolveMethod,
};

/// Game-theoretic triangle mesh smoothing.
#[derive(Parser)]
#[command(name = "gamesmooth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smooth a mesh and write the result, a JSON report and an SVG overlay.
    Smooth(SmoothArgs),
    /// Compare Nash, best and uniform profiles over a sweep of k.
    Compare(CompareArgs),
    /// Write a built-in scenario mesh as OFF.
    Scenario(ScenarioArgs),
}

#[derive(Args)]
struct Source {
    /// Input mesh (.off or .obj).
    #[arg(conflicts_with = "scenario", required_unless_present = "scenario")]
    input: Option<PathBuf>,
    /// Built-in scenario instead of an input file.
    #[arg(long)]
    scenario: Option<String>,
    /// Seed for perturbed scenarios.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Source {
    fn mesh_source(&self) -> MeshSource {
        match (&self.input, &self.scenario) {
            (Some(path), _) => MeshSource::File { path: path.clone() },
            (None, Some(name)) => MeshSource::Scenario {
                name: name.clone(),
                seed: self.seed,
            },
            (None, None) => unreachable!("clap requires one of them"),
        }
    }
}

#[derive(Args)]
struct GameArgs {
    /// Quality metric: edge-ratio or mean-ratio.
    #[arg(long, default_value = "edge-ratio")]
    metric: Metric,
    /// Keep mesh-boundary vertices in place.
    #[arg(long)]
    fix_boundary: bool,
    /// Largest number of profiles an exhaustive search may enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl GameArgs {
    fn config(&self, k: u32) -> GameConfig {
        GameConfig {
            max_power: k,
            metric: self.metric,
            fix_boundary: self.fix_boundary,
            budget: self.budget,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct SmoothArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    game: GameArgs,
    /// Largest transform power a player may choose.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Target minimum element quality.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// global or local-worst.
    #[arg(long, default_value = "global")]
    mode: Mode,
    /// exhaustive or best-response.
    #[arg(long, default_value = "exhaustive")]
    solver: SolveMethod,
    #[arg(long, default_value_t = 20)]
    max_iterations: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    game: GameArgs,
    /// Comma-separated sweep of k values.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    k: Vec<u32>,
    /// Iterations recorded in the quality-vs-iteration histories.
    #[arg(long, default_value_t = 5)]
    history: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ScenarioArgs {
    /// fan4, fan5, fan5_perturbed or fan6.
    name: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

enum Status {
    Done,
    BudgetRefused,
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn run_smooth(args: &SmoothArgs) -> Result<Status> {
    let source = args.source.mesh_source();
    let mesh = source
        .load()
        .with_context(|| format!("loading {}", source.label()))?;
    let config = SmoothingConfig {
        game: args.game.config(args.k),
        mode: args.mode,
        target_quality: args.q,
        max_iterations: args.max_iterations,
        solver: args.solver,
        ..Default::default()
    };
    let report = smooth(&mesh, &config).map_err(gamesmooth::Error::from)?;

    let dir = &args.out_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    save_off(&dir.join("smoothed.off"), &mesh, &report.final_coords)?;
    let record = serde_json::json!({
        "source": source,
        "config": config,
        "final": report.final_stats(),
        "report": report,
    });
    write_json(&dir.join("smooth.json"), &record)?;
    if mesh.is_planar() {
        let initial = mesh.positions();
        emit_svg(
            &[
                Layer::new(&mesh, &initial, Style::initial()),
                Layer::new(&mesh, &report.final_coords, Style::nash()),
            ],
            &dir.join("smooth.svg"),
        )?;
    }
    let end = report.final_stats();
    println!(
        "{}: min {:.6} -> {:.6}, mean {:.6} -> {:.6}, {} iteration(s), {:?}",
        source.label(),
        report.initial.min,
        end.min,
        report.initial.mean,
        end.mean,
        report.iterations.len(),
        report.terminated_by
    );
    Ok(Status::Done)
}

fn run_compare_cmd(args: &CompareArgs) -> Result<Status> {
    if args.k.is_empty() {
        bail!("--k needs at least one value");
    }
    let mut spec = RunSpec::new(
        args.source.mesh_source(),
        args.game.config(args.k[0]),
        args.k.clone(),
    );
    spec.history_iterations = args.history;
    spec.out_dir = Some(args.out_dir.clone());
    let record =
        run_compare(&spec).with_context(|| format!("comparing {}", spec.source.label()))?;
    for p in &record.sweep {
        let show = |r: Option<&gamesmooth::compare::FamilyResult>| match r {
            Some(r) => format!("{} {:.6}", r.profile, r.mean_quality),
            None => "omitted".to_string(),
        };
        println!(
            "k={} nash {} | best {} | uniform {:.6}",
            p.k,
            show(p.nash.as_ref()),
            show(p.best.as_ref()),
            p.uniform.mean_quality
        );
        for note in &p.omitted {
            eprintln!("k={}: {note}", p.k);
        }
    }
    Ok(if record.has_budget_omissions() {
        Status::BudgetRefused
    } else {
        Status::Done
    })
}

fn run_scenario(args: &ScenarioArgs) -> Result<Status> {
    let mesh = gamesmooth::generate_scenario(&args.name, args.seed)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join(format!("{}.off", args.name));
    save_off(&path, &mesh, &mesh.positions())?;
    println!("{}", path.display());
    Ok(Status::Done)
}

/// The error chain joined by `: `, dropping causes already quoted by the
/// message above them.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Smooth(a) => run_smooth(a),
        Command::Compare(a) => run_compare_cmd(a),
        Command::Scenario(a) => run_scenario(a),
    };
    match result {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::BudgetRefused) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            let budget = e
                .downcast_ref::<gamesmooth::Error>()
                .is_some_and(gamesmooth::Error::is_budget_refusal);
            ExitCode::from(if budget { 2 } else { 1 })
        }
    }
}
