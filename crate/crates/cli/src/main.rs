use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maxop_core::runner::{kinds, run, Config};

/// Experiments on the multilinear maximal operators S^m_alpha, from the
/// Hardy-Littlewood (alpha = 0) to the spherical (alpha = 1) end.
#[derive(Parser)]
#[command(name = "maxop", version, disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments of a config file and write CSV/JSON artifacts.
    Run {
        config: PathBuf,
        /// Output directory (default: ./out).
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads; overrides the config.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the experiment kinds with their keys and defaults.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print the library version.
    Version,
}

const CHECK_FAILED: u8 = 1;
const BAD_INPUT: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Version => {
            println!("maxop {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
        Command::List { json } => {
            let all = kinds();
            if json {
                let doc: Vec<_> = all
                    .iter()
                    .map(|k| {
                        let defaults: serde_json::Map<String, serde_json::Value> =
                            k.defaults.iter().map(|(key, v)| (key.to_string(), (*v).into())).collect();
                        serde_json::json!({ "name": k.name, "description": k.description, "defaults": defaults })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&doc).expect("listing is plain data"));
            } else {
                for k in &all {
                    println!("{:<11} {}", k.name, k.description);
                    for (key, v) in &k.defaults {
                        println!("    {key} = {v}");
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out, threads } => {
            if threads == Some(0) {
                eprintln!("error: --threads must be positive");
                return ExitCode::from(BAD_INPUT);
            }
            let cfg = match Config::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(BAD_INPUT);
                }
            };
            let summary = match run(&cfg, &out, threads) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(BAD_INPUT);
                }
            };
            for (kind, r) in &summary.reports {
                let mark = if r.pass { "pass" } else { "FAIL" };
                println!("{mark} {kind:<11} {:<26} worst {:.3e} tol {:.3e}", r.relation, r.worst_violation, r.tolerance);
            }
            println!("wrote {} in {:.1} s", summary.out_dir.display(), summary.wall_time);
            if summary.passed() {
                ExitCode::SUCCESS
            } else {
                let checks = summary.out_dir.join("checks.jsonl");
                for (kind, r) in summary.failures() {
                    eprintln!("check failed: {kind}/{} (see {})", r.relation, checks.display());
                }
                ExitCode::from(CHECK_FAILED)
            }
        }
    }
}
