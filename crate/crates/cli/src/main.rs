//! Command-line driver: experiment sweeps, standalone tapering and the
//! exact ground-state solver.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vqe_core::experiment::{run_experiment, RunConfig};
use vqe_core::fermion;
use vqe_core::pauli::PauliSum;
use vqe_core::solver;
use vqe_core::tapering;

#[derive(Parser)]
#[command(
    name = "vqe",
    about = "Variational quantum eigensolver toolkit: qubit tapering, \
             statevector simulation and SPSA energy minimization",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment sweep (geometries x seeds).
    Run(RunArgs),
    /// Map a molecular-integrals file to a qubit Hamiltonian.
    Map(MapArgs),
    /// Find Z2 symmetries of a Hamiltonian and remove qubits.
    Taper(TaperArgs),
    /// Exact ground energy (and optionally the full spectrum).
    Solve(SolveArgs),
}

#[derive(Args)]
struct MapArgs {
    /// Molecular-integrals JSON file.
    #[arg(long)]
    integrals: PathBuf,
    /// Write the PauliSum JSON here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration, JSON or YAML by extension.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct TaperArgs {
    /// Hamiltonian as PauliSum JSON ({"m": .., "terms": [..]}).
    #[arg(long)]
    input: PathBuf,
    /// Sector signs, e.g. "++-"; defaults to the exhaustive
    /// ground-sector search.
    #[arg(long)]
    sector: Option<String>,
    /// Include the dense conjugating unitary in the report.
    #[arg(long)]
    emit_unitary: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Hamiltonian as PauliSum JSON.
    #[arg(long)]
    input: PathBuf,
    /// Print the full spectrum, not just the ground energy.
    #[arg(long)]
    spectrum: bool,
}

fn load_pauli_sum(path: &Path) -> Result<PauliSum> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let sum: PauliSum = serde_json::from_str(&text)
        .with_context(|| format!("parsing {} as PauliSum JSON", path.display()))?;
    Ok(sum)
}

fn parse_sector(s: &str) -> Result<Vec<i8>> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            other => bail!("sector characters are '+' or '-', got {other:?}"),
        })
        .collect()
}

fn sector_string(sector: &[i8]) -> String {
    sector
        .iter()
        .map(|&s| if s > 0 { '+' } else { '-' })
        .collect()
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let is_yaml = matches!(
        args.config.extension().and_then(|e| e.to_str()),
        Some("yaml") | Some("yml")
    );
    let mut cfg: RunConfig = if is_yaml {
        serde_yaml::from_str(&text).context("parsing YAML config")?
    } else {
        serde_json::from_str(&text).context("parsing JSON config")?
    };
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = dir.clone();
    }
    let report = run_experiment(&cfg)?;
    println!(
        "{} runs finished ({} failed); outputs in {}",
        report.runs.len(),
        report.failed_runs,
        cfg.output_dir.display()
    );
    for run in &report.runs {
        match run.status.as_str() {
            "ok" => println!(
                "  {} seed {}: final dE = {:.3e}",
                run.geometry,
                run.seed,
                run.final_delta_e.unwrap_or(f64::NAN)
            ),
            _ => println!(
                "  {} seed {}: FAILED ({})",
                run.geometry,
                run.seed,
                run.error.as_deref().unwrap_or("unknown")
            ),
        }
    }
    Ok(if report.failed_runs > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_map(args: &MapArgs) -> Result<ExitCode> {
    let mi = fermion::load_integrals(&args.integrals)?;
    let h = fermion::build_qubit_hamiltonian(&mi)?;
    let text = serde_json::to_string_pretty(&h)?;
    match &args.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_taper(args: &TaperArgs) -> Result<ExitCode> {
    let h = load_pauli_sum(&args.input)?;
    let Some(group) = tapering::find_symmetries(&h)? else {
        bail!("the Hamiltonian has no Z2 symmetries to taper");
    };
    let triple = tapering::build_taper_triple(&group)?;
    let r = triple.rank();

    let mut sectors = Vec::new();
    for code in 0..(1usize << r) {
        let sector: Vec<i8> = (0..r)
            .map(|i| if (code >> (r - 1 - i)) & 1 == 0 { 1 } else { -1 })
            .collect();
        let tapered = tapering::taper(&h, &triple, &sector)?;
        let energy = if tapered.hamiltonian.is_empty() {
            0.0
        } else {
            solver::ground_energy(&tapered.hamiltonian)?.ground_energy
        };
        sectors.push(serde_json::json!({
            "sector": sector_string(&sector),
            "ground_energy": energy,
        }));
    }

    let (chosen, tapered) = match &args.sector {
        Some(s) => {
            let sector = parse_sector(s)?;
            let tapered = tapering::taper(&h, &triple, &sector)?;
            (sector, tapered)
        }
        None => tapering::select_ground_sector(&h, &triple)?,
    };

    let mut report = serde_json::json!({
        "m": h.qubits(),
        "r": r,
        "generators": group.generators().iter().map(|g| g.axes_string()).collect::<Vec<_>>(),
        "q": triple.q,
        "rho": triple.rho.iter().map(|a| a.as_char().to_string()).collect::<Vec<_>>(),
        "permutation": tapered.permutation,
        "sectors": sectors,
        "selected_sector": sector_string(&chosen),
        "tapered": tapered.hamiltonian,
    });
    if args.emit_unitary {
        let u = tapering::build_unitary(&triple)?;
        let rows: Vec<Vec<[f64; 2]>> = (0..u.nrows())
            .map(|i| (0..u.ncols()).map(|j| [u[(i, j)].re, u[(i, j)].im]).collect())
            .collect();
        report["unitary"] = serde_json::json!(rows);
    }
    let text = serde_json::to_string_pretty(&report)?;
    match &args.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let h = load_pauli_sum(&args.input)?;
    let result = solver::ground_energy(&h)?;
    println!("ground energy: {}", result.ground_energy);
    if args.spectrum {
        println!("spectrum ({} levels):", result.eigenvalues.len());
        for e in &result.eigenvalues {
            println!("  {e}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Map(args) => cmd_map(args),
        Command::Taper(args) => cmd_taper(args),
        Command::Solve(args) => cmd_solve(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
