use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sqca::Config;
use sqca_cli::{commands, problem, CliError, CliResult};
use std::path::PathBuf;
use std::process::ExitCode;

/// Stable-equivalence index of even G-equivariant QCAs on graded quantum chains.
#[derive(Parser)]
#[command(name = "sqca", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Algebra tolerance (membership, closure, kernels).
    #[arg(long, global = true)]
    tol_alg: Option<f64>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index (d, ζ, [ν]) of the QCA in a problem file.
    Index {
        file: String,
        /// Evaluate at every admissible cell, not only the central one.
        #[arg(long)]
        all_cells: bool,
    },
    /// Run a verification suite: group-laws, stacking, overlap, condexp, nearincl or all.
    Verify {
        suite: String,
        /// Restrict group-dependent suites to one group.
        #[arg(long)]
        group: Option<String>,
    },
    /// Classes of H²(G, U(1)) carried by Z_m-valued cocycles.
    Cohomology {
        /// Preset name or inline {"order": n, "table": [...]}.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Depth-2 circuit for a QCA of trivial index.
    Decouple {
        file: String,
        /// Stack auxiliary chains when the overlap algebras need them.
        #[arg(long)]
        auto_stack: bool,
    },
    /// Write example problem files to a directory, or list them.
    Examples {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn config(cli: &Cli) -> CliResult<Config> {
    let mut cfg = Config { seed: cli.seed, ..Config::default() };
    if let Some(t) = cli.tol_alg {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::input("InvalidFlag", format!("--tol-alg must lie in (0, 1), got {t}")));
        }
        cfg.tol_alg = t;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> CliResult<(Value, String)> {
    let cfg = config(cli)?;
    match &cli.command {
        Command::Index { file, all_cells } => {
            let p = problem::load(&problem::read(file)?, &cfg)?;
            let report = commands::index(&p, &cfg, *all_cells)?;
            let text = format!("index {}", report["text"].as_str().unwrap_or_default());
            Ok((report, text))
        }
        Command::Verify { suite, group } => {
            let g = group.as_deref().map(problem::group_arg).transpose()?;
            let report = commands::verify(suite, g.as_ref(), &cfg)?;
            let text = format!("{}: {} checks passed", suite, report["total"]);
            Ok((report, text))
        }
        Command::Cohomology { group, m } => {
            let g = problem::group_arg(group)?;
            let report = commands::cohomology(&g, *m, &cfg)?;
            let text = format!("{} classes", report["count"]);
            Ok((report, text))
        }
        Command::Decouple { file, auto_stack } => {
            let p = problem::load(&problem::read(file)?, &cfg)?;
            let report = commands::decouple(&p, &cfg, *auto_stack)?;
            let text = format!("decoupled, residual {}", report["diagnostics"]["max_residual"]);
            Ok((report, text))
        }
        Command::Examples { dir } => {
            let all = commands::examples();
            if let Some(dir) = dir {
                std::fs::create_dir_all(dir).map_err(|e| CliError::input("IoError", format!("{}: {e}", dir.display())))?;
                for (name, v) in &all {
                    let path = dir.join(name);
                    std::fs::write(&path, pretty(v)).map_err(|e| CliError::input("IoError", format!("{}: {e}", path.display())))?;
                }
            }
            let listing: serde_json::Map<String, Value> = all.into_iter().map(|(n, v)| (n.to_string(), v)).collect();
            let text = match dir {
                Some(d) => format!("{} examples written to {}", listing.len(), d.display()),
                None => format!("{} examples", listing.len()),
            };
            Ok((json!({"examples": listing}), text))
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|(report, summary)| {
        if let Some(path) = &cli.out {
            std::fs::write(path, pretty(&report)).map_err(|e| CliError::input("IoError", format!("{}: {e}", path.display())))?;
        }
        print!("{}", pretty(&report));
        eprintln!("{summary}");
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let (CliError::Failed(_), Some(path)) = (&e, &cli.out) {
                let _ = std::fs::write(path, pretty(&e.to_json()));
            }
            match &e {
                CliError::Failed(report) => print!("{}", pretty(report)),
                _ => eprint!("{}", pretty(&e.to_json())),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
