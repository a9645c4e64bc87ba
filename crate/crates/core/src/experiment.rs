//! Experiment driver: configuration sweeps over geometry files,
//! entangler and depth settings, seed batches, per-run convergence
//! traces and geometric aggregation across geometries.
//!
//! Every (geometry, seed) run is independent and executes in a rayon
//! pool (capped by the `VQE_THREADS` environment variable); outputs are
//! deterministic for a fixed configuration because each run owns its
//! RNG stream and aggregation reduces sequentially over sorted labels.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fermion::{self, FermionError};
use crate::pauli::PauliSum;
use crate::simulator::{
    expectation, param_count, prepare_trial_state, EntanglerKind, ParamVector, SimulatorError,
};
use crate::solver::{self, SolverError};
use crate::spsa::{self, SpsaConfig, SpsaError};
use crate::tapering::{self, TaperError};

/// Floor applied to energy differences before logarithms; exact zeros
/// would otherwise send the geometric statistics to -infinity.
pub const DELTA_E_FLOOR: f64 = 1e-12;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Salt for the theta_0 stream so it does not replay the SPSA stream
/// that is seeded with the same run seed.
const THETA0_STREAM_SALT: u64 = 0x7468_6574_6130;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty value list for {0}")]
    Empty(&'static str),
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} of {1} runs failed")]
    RunsFailed(usize, usize),
    #[error(transparent)]
    Fermion(#[from] FermionError),
    #[error(transparent)]
    Taper(#[from] TaperError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Spsa(#[from] SpsaError),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

/// One experiment: a set of geometry files swept with a common
/// entangler, depth, iteration count and seed batch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Molecular-integrals JSON files, one per geometry point.
    pub integrals: Vec<PathBuf>,
    /// Remove symmetry qubits before optimizing.
    #[serde(default = "default_true")]
    pub taper: bool,
    pub entangler: EntanglerKind,
    /// Entangler layers d; the parameter count is (3d+2)m.
    pub depth: usize,
    /// SPSA iterations per run.
    pub iterations: usize,
    /// One full SPSA run per seed per geometry.
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.integrals.is_empty() {
            return Err(ExperimentError::Empty("integrals"));
        }
        if self.seeds.is_empty() {
            return Err(ExperimentError::Empty("seeds"));
        }
        if self.iterations < 1 {
            return Err(ExperimentError::Config("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-iteration geometric mean and geometric standard deviation of
/// the energy difference from the exact ground energy, taken across
/// geometry points (seeds are collapsed to their median first).
#[derive(Debug, Clone, Serialize)]
pub struct AggregateCurve {
    pub geo_mean: Vec<f64>,
    pub geo_std: Vec<f64>,
}

/// Outcome of one (geometry, seed) run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub geometry: String,
    pub seed: u64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tapered_qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_delta_e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
    #[serde(skip)]
    pub delta_trace: Vec<f64>,
}

/// Everything `run_experiment` reports back, mirrored into
/// `report.json` in the output directory.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub conventions: Conventions,
    pub entangler: String,
    pub depth: usize,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub taper: bool,
    pub param_counts: Vec<usize>,
    pub runs: Vec<RunRecord>,
    pub failed_runs: usize,
}

/// The conventions in force, recorded so outputs stay interpretable.
#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub rotation: &'static str,
    pub qubit_order: &'static str,
    pub spin_order: &'static str,
    pub iswap2_controls: &'static str,
    pub pst_phase: &'static str,
    pub cmnot_control: &'static str,
    pub trace_energy: &'static str,
    pub aggregation: &'static str,
    pub delta_e_floor: f64,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            rotation: "R_axis(phi) = cos(phi/2) I - i sin(phi/2) axis",
            qubit_order: "qubit 1 is the leftmost tensor factor (most significant bit)",
            spin_order: "odd 1-based modes are spin-up, even spin-down",
            iswap2_controls: "first m-2 qubits control at |1>",
            pst_phase: "uniform factor i on the reversed state",
            cmnot_control: "qubit 1 controls X on qubits 2..m",
            trace_energy: "row k records E(theta_k) before the k-th update",
            aggregation: "median over seeds per geometry, then geometric mean/std over geometries",
            delta_e_floor: DELTA_E_FLOOR,
        }
    }
}

/// Geometric mean with the [`DELTA_E_FLOOR`] floor applied first.
pub fn geometric_mean(values: &[f64]) -> Result<f64, ExperimentError> {
    if values.is_empty() {
        return Err(ExperimentError::Empty("geometric_mean values"));
    }
    let mean_log = values
        .iter()
        .map(|&v| v.max(DELTA_E_FLOOR).ln())
        .sum::<f64>()
        / values.len() as f64;
    Ok(mean_log.exp())
}

/// Geometric standard deviation (population form) with the floor.
pub fn geometric_std(values: &[f64]) -> Result<f64, ExperimentError> {
    if values.is_empty() {
        return Err(ExperimentError::Empty("geometric_std values"));
    }
    let logs: Vec<f64> = values.iter().map(|&v| v.max(DELTA_E_FLOOR).ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let var = logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / logs.len() as f64;
    Ok(var.sqrt().exp())
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn geometry_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Uniform theta_0 in [0, 2 pi)^dim from a stream derived from the run
/// seed (salted so the SPSA stream, seeded with the bare seed, differs).
fn draw_theta0(seed: u64, dim: usize) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed ^ THETA0_STREAM_SALT);
    (0..dim).map(|_| rng.gen::<f64>() * TAU).collect()
}

struct PreparedRun {
    record: RunRecord,
    hamiltonian: PauliSum,
    ground: f64,
}

/// Load a geometry file, map it to qubits, optionally taper, and solve
/// for the exact ground energy of the operator the optimizer will see.
fn prepare_geometry(path: &Path, taper: bool) -> Result<PreparedRun, ExperimentError> {
    let mi = fermion::load_integrals(path)?;
    let h_full = fermion::build_qubit_hamiltonian(&mi)?;
    let mut record = RunRecord {
        geometry: geometry_label(path),
        seed: 0,
        status: "ok".into(),
        error: None,
        qubits: Some(h_full.qubits()),
        tapered_qubits: None,
        symmetry_rank: None,
        generators: None,
        sector: None,
        ground_energy: None,
        final_energy: None,
        final_delta_e: None,
        trace_file: None,
        delta_trace: Vec::new(),
    };
    let hamiltonian = if taper {
        match tapering::find_symmetries(&h_full)? {
            Some(group) => {
                let triple = tapering::build_taper_triple(&group)?;
                let (sector, tapered) = tapering::select_ground_sector(&h_full, &triple)?;
                record.symmetry_rank = Some(group.rank());
                record.generators = Some(
                    group
                        .generators()
                        .iter()
                        .map(|g| g.axes_string())
                        .collect(),
                );
                record.sector = Some(sector);
                record.tapered_qubits = Some(tapered.hamiltonian.qubits());
                tapered.hamiltonian
            }
            None => {
                record.symmetry_rank = Some(0);
                h_full
            }
        }
    } else {
        h_full
    };
    let ground = solver::ground_energy(&hamiltonian)?.ground_energy;
    record.ground_energy = Some(ground);
    Ok(PreparedRun {
        record,
        hamiltonian,
        ground,
    })
}

fn execute_run(
    prepared: &PreparedRun,
    seed: u64,
    cfg: &RunConfig,
) -> Result<RunRecord, ExperimentError> {
    let h = &prepared.hamiltonian;
    let m = h.qubits();
    let d = cfg.depth;
    let dim = param_count(m, d);
    let theta0 = draw_theta0(seed, dim);

    let spsa_cfg = SpsaConfig {
        iterations: cfg.iterations,
        seed,
        ..SpsaConfig::default()
    };
    let objective = |theta: &[f64]| -> Result<f64, SpsaError> {
        let params =
            ParamVector::new(theta, m, d).map_err(|e| SpsaError::Objective(e.to_string()))?;
        let state = prepare_trial_state(&params, cfg.entangler, m)
            .map_err(|e| SpsaError::Objective(e.to_string()))?;
        expectation(&state, h).map_err(|e| SpsaError::Objective(e.to_string()))
    };
    let trace = spsa::spsa_run(objective, &theta0, &spsa_cfg)?;

    let mut record = prepared.record.clone();
    record.seed = seed;
    record.final_energy = Some(trace.final_energy);
    record.final_delta_e = Some(trace.final_energy - prepared.ground);
    record.delta_trace = trace
        .iterations
        .iter()
        .map(|it| it.energy - prepared.ground)
        .collect();

    let trace_name = format!("trace_{}_{}.csv", record.geometry, seed);
    let trace_path = cfg.output_dir.join(&trace_name);
    let mut csv = String::with_capacity(trace.iterations.len() * 32);
    csv.push_str("iter,energy,energy_minus_ground\n");
    for it in &trace.iterations {
        csv.push_str(&format!(
            "{},{},{}\n",
            it.k,
            it.energy,
            it.energy - prepared.ground
        ));
    }
    write_file(&trace_path, csv.as_bytes())?;
    record.trace_file = Some(trace_name);
    Ok(record)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    let mut f = fs::File::create(path).map_err(|source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    f.write_all(bytes).map_err(|source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Run the full sweep. Failures are isolated per run: the remaining
/// runs still execute, the report records each failure, and the error
/// return carries the failure count. Trace CSVs, `aggregate.csv` and
/// `report.json` land in the configured output directory.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir).map_err(|source| ExperimentError::Io {
        path: cfg.output_dir.display().to_string(),
        source,
    })?;

    let pool = thread_pool()?;

    // Geometry preparation is shared by all seeds of that geometry.
    let prepared: Vec<Result<PreparedRun, ExperimentError>> = pool.install(|| {
        cfg.integrals
            .par_iter()
            .map(|path| prepare_geometry(path, cfg.taper))
            .collect()
    });

    let mut runs: Vec<RunRecord> = Vec::new();
    let mut param_counts: Vec<usize> = Vec::new();
    for (path, prep) in cfg.integrals.iter().zip(&prepared) {
        match prep {
            Ok(p) => {
                let dim = param_count(p.hamiltonian.qubits(), cfg.depth);
                if !param_counts.contains(&dim) {
                    param_counts.push(dim);
                }
                let seed_runs: Vec<RunRecord> = pool.install(|| {
                    cfg.seeds
                        .par_iter()
                        .map(|&seed| {
                            execute_run(p, seed, cfg).unwrap_or_else(|err| {
                                let mut rec = p.record.clone();
                                rec.seed = seed;
                                rec.status = "failed".into();
                                rec.error = Some(err.to_string());
                                rec
                            })
                        })
                        .collect()
                });
                runs.extend(seed_runs);
            }
            Err(err) => {
                for &seed in &cfg.seeds {
                    runs.push(RunRecord {
                        geometry: geometry_label(path),
                        seed,
                        status: "failed".into(),
                        error: Some(err.to_string()),
                        qubits: None,
                        tapered_qubits: None,
                        symmetry_rank: None,
                        generators: None,
                        sector: None,
                        ground_energy: None,
                        final_energy: None,
                        final_delta_e: None,
                        trace_file: None,
                        delta_trace: Vec::new(),
                    });
                }
            }
        }
    }

    let aggregate = aggregate_runs(&runs, cfg.iterations);
    if let Some(curve) = &aggregate {
        let mut csv = String::new();
        csv.push_str("iter,geo_mean,geo_std\n");
        for k in 0..curve.geo_mean.len() {
            csv.push_str(&format!(
                "{},{},{}\n",
                k + 1,
                curve.geo_mean[k],
                curve.geo_std[k]
            ));
        }
        write_file(&cfg.output_dir.join("aggregate.csv"), csv.as_bytes())?;
    }

    let failed = runs.iter().filter(|r| r.status == "failed").count();
    let report = ExperimentReport {
        conventions: Conventions::default(),
        entangler: cfg.entangler.name().to_string(),
        depth: cfg.depth,
        iterations: cfg.iterations,
        seeds: cfg.seeds.clone(),
        taper: cfg.taper,
        param_counts,
        runs,
        failed_runs: failed,
    };
    let json = serde_json::to_vec_pretty(&report)?;
    write_file(&cfg.output_dir.join("report.json"), &json)?;
    Ok(report)
}

/// Collapse seeds to their per-iteration median within each geometry,
/// then take geometric mean/std across geometries. Geometries are
/// processed in sorted label order; runs that failed are skipped.
fn aggregate_runs(runs: &[RunRecord], iterations: usize) -> Option<AggregateCurve> {
    let mut labels: Vec<&str> = runs
        .iter()
        .filter(|r| r.status == "ok")
        .map(|r| r.geometry.as_str())
        .collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.is_empty() {
        return None;
    }

    let mut geo_mean = Vec::with_capacity(iterations);
    let mut geo_std = Vec::with_capacity(iterations);
    for k in 0..iterations {
        let mut per_geometry = Vec::with_capacity(labels.len());
        for &label in &labels {
            let mut deltas: Vec<f64> = runs
                .iter()
                .filter(|r| r.status == "ok" && r.geometry == label)
                .filter_map(|r| r.delta_trace.get(k).copied())
                .collect();
            if deltas.is_empty() {
                continue;
            }
            deltas.sort_by(f64::total_cmp);
            per_geometry.push(median(&deltas));
        }
        if per_geometry.is_empty() {
            return None;
        }
        geo_mean.push(geometric_mean(&per_geometry).expect("nonempty"));
        geo_std.push(geometric_std(&per_geometry).expect("nonempty"));
    }
    Some(AggregateCurve { geo_mean, geo_std })
}

/// Build the run pool, honoring the `VQE_THREADS` cap.
fn thread_pool() -> Result<rayon::ThreadPool, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("VQE_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| ExperimentError::Config(format!("VQE_THREADS={value} is not a count")))?;
        if n >= 1 {
            builder = builder.num_threads(n);
        }
    }
    builder
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn geometric_mean_examples() {
        assert_abs_diff_eq!(geometric_mean(&[4.0, 1.0]).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(geometric_mean(&[3.7]).unwrap(), 3.7, epsilon = 1e-12);
        assert_abs_diff_eq!(geometric_std(&[3.7]).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn geometric_mean_floors_tiny_values() {
        // 1e-15 floors to 1e-12, so gm(1e-15, 1) = 1e-6
        assert_abs_diff_eq!(
            geometric_mean(&[1e-15, 1.0]).unwrap(),
            1e-6,
            epsilon = 1e-18
        );
    }

    #[test]
    fn geometric_stats_reject_empty_input() {
        assert!(geometric_mean(&[]).is_err());
        assert!(geometric_std(&[]).is_err());
    }

    #[test]
    fn median_of_even_and_odd_lists() {
        assert_abs_diff_eq!(median(&[1.0, 2.0, 3.0]), 2.0);
        assert_abs_diff_eq!(median(&[1.0, 2.0, 3.0, 10.0]), 2.5);
    }

    #[test]
    fn config_validation() {
        let cfg = RunConfig {
            integrals: vec![],
            taper: true,
            entangler: EntanglerKind::CnotChain,
            depth: 1,
            iterations: 10,
            seeds: vec![1],
            output_dir: PathBuf::from("/tmp/x"),
        };
        assert!(matches!(
            cfg.validate(),
            Err(ExperimentError::Empty("integrals"))
        ));
    }
}
