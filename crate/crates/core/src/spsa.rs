//! Simultaneous perturbation stochastic approximation.
//!
//! Each iteration perturbs the parameter vector along a random
//! Rademacher direction, estimates the gradient from the two-sided
//! energy difference and steps against it with decaying gains
//! a_k = a/k^A, c_k = c/k^Gamma. The scale `a` is calibrated from the
//! average slope around the starting point before the first iteration.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;
use thiserror::Error;

const TAU: f64 = 2.0 * std::f64::consts::PI;
const FLAT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpsaError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("initial vector is empty")]
    EmptyTheta,
    #[error("flat landscape: mean slope around the start is below {FLAT_TOLERANCE:.0e}")]
    FlatLandscape,
    #[error("objective returned a non-finite value at iteration {k}")]
    NonFinite { k: usize },
    #[error("objective error: {0}")]
    Objective(String),
}

/// Gain schedule and run-length settings.
///
/// The exponents and the perturbation size default to 0.602, 0.101 and
/// 0.01, the standard smooth-descent choices. `wrap_angles` folds the
/// iterate into [0, 2 pi) after each update; it is meant for objectives
/// that are 2 pi-periodic in every coordinate (any trial-state energy
/// is) and must be disabled for objectives that are not.
#[derive(Debug, Clone)]
pub struct SpsaConfig {
    /// Decay exponent A of the step gains a_k = a / k^A.
    pub a_exponent: f64,
    /// Perturbation size c of c_k = c / k^Gamma.
    pub c: f64,
    /// Decay exponent Gamma of the perturbation sizes.
    pub c_exponent: f64,
    /// Rademacher draws used to estimate the calibration slope.
    pub calibration_samples: usize,
    /// Number of iterations K.
    pub iterations: usize,
    /// RNG seed; identical seeds give bit-identical runs.
    pub seed: u64,
    /// Fold iterates into [0, 2 pi) after each update.
    pub wrap_angles: bool,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig {
            a_exponent: 0.602,
            c: 0.01,
            c_exponent: 0.101,
            calibration_samples: 25,
            iterations: 1000,
            seed: 0,
            wrap_angles: true,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<(), SpsaError> {
        if !(self.c > 0.0) {
            return Err(SpsaError::Config(format!("c must be > 0, got {}", self.c)));
        }
        if self.iterations < 1 {
            return Err(SpsaError::Config("iterations must be >= 1".into()));
        }
        if !(self.a_exponent > 0.0) || !(self.c_exponent > 0.0) {
            return Err(SpsaError::Config("gain exponents must be > 0".into()));
        }
        if self.calibration_samples < 1 {
            return Err(SpsaError::Config("calibration_samples must be >= 1".into()));
        }
        Ok(())
    }
}

/// One row of the optimization record.
#[derive(Debug, Clone)]
pub struct SpsaIteration {
    /// Iteration index k, starting at 1.
    pub k: usize,
    /// Energy at the iterate theta_k (before the update).
    pub energy: f64,
    /// Euclidean norm of the estimated gradient g_k.
    pub grad_norm: f64,
}

/// Full run record. Recording `energy` costs one objective evaluation
/// per iteration on top of the two used by the gradient estimate; the
/// final iterate adds one more.
#[derive(Debug, Clone)]
pub struct SpsaTrace {
    pub iterations: Vec<SpsaIteration>,
    pub final_theta: Vec<f64>,
    pub final_energy: f64,
    /// Calibrated step scale.
    pub a: f64,
}

/// A vector of independent +-1 entries, each with probability 1/2.
pub fn rademacher<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

fn check_finite(value: f64, k: usize) -> Result<f64, SpsaError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SpsaError::NonFinite { k })
    }
}

fn calibrate_with_rng<F>(
    objective: &mut F,
    theta_1: &[f64],
    cfg: &SpsaConfig,
    rng: &mut ChaCha12Rng,
) -> Result<f64, SpsaError>
where
    F: FnMut(&[f64]) -> Result<f64, SpsaError>,
{
    let dim = theta_1.len();
    let mut slope_sum = 0.0;
    for _ in 0..cfg.calibration_samples {
        let delta = rademacher(dim, rng);
        let plus: Vec<f64> = theta_1
            .iter()
            .zip(&delta)
            .map(|(t, d)| t + cfg.c * d)
            .collect();
        let minus: Vec<f64> = theta_1
            .iter()
            .zip(&delta)
            .map(|(t, d)| t - cfg.c * d)
            .collect();
        let e_plus = check_finite(objective(&plus)?, 0)?;
        let e_minus = check_finite(objective(&minus)?, 0)?;
        slope_sum += (e_plus - e_minus).abs();
    }
    let mean_slope = slope_sum / cfg.calibration_samples as f64;
    if mean_slope < FLAT_TOLERANCE {
        return Err(SpsaError::FlatLandscape);
    }
    Ok((TAU / 5.0) * cfg.c / mean_slope)
}

/// Calibrate the step scale from the Monte-Carlo mean slope around
/// `theta_1`: a = (2 pi / 5) c / mean_Delta |E(theta + c Delta) -
/// E(theta - c Delta)|. Uses a fresh RNG stream seeded by `cfg.seed`.
pub fn calibrate_a<F>(mut objective: F, theta_1: &[f64], cfg: &SpsaConfig) -> Result<f64, SpsaError>
where
    F: FnMut(&[f64]) -> Result<f64, SpsaError>,
{
    cfg.validate()?;
    if theta_1.is_empty() {
        return Err(SpsaError::EmptyTheta);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    calibrate_with_rng(&mut objective, theta_1, cfg, &mut rng)
}

/// Run SPSA from `theta_0`: calibrate `a`, then iterate
/// theta_{k+1} = theta_k - a_k g_k for k = 1..K with
/// g_k = [E(theta_k + c_k Delta_k) - E(theta_k - c_k Delta_k)]
/// / (2 c_k) * Delta_k (element-wise; Rademacher entries make the
/// product equal the division form). Deterministic given the seed:
/// calibration consumes the stream first, iterations continue it.
pub fn spsa_run<F>(
    mut objective: F,
    theta_0: &[f64],
    cfg: &SpsaConfig,
) -> Result<SpsaTrace, SpsaError>
where
    F: FnMut(&[f64]) -> Result<f64, SpsaError>,
{
    cfg.validate()?;
    if theta_0.is_empty() {
        return Err(SpsaError::EmptyTheta);
    }
    let dim = theta_0.len();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let a = calibrate_with_rng(&mut objective, theta_0, cfg, &mut rng)?;

    let mut theta = theta_0.to_vec();
    let mut iterations = Vec::with_capacity(cfg.iterations);
    for k in 1..=cfg.iterations {
        let energy = check_finite(objective(&theta)?, k)?;

        let c_k = cfg.c / (k as f64).powf(cfg.c_exponent);
        let a_k = a / (k as f64).powf(cfg.a_exponent);
        let delta = rademacher(dim, &mut rng);
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + c_k * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - c_k * d).collect();
        let e_plus = check_finite(objective(&plus)?, k)?;
        let e_minus = check_finite(objective(&minus)?, k)?;

        let scale = (e_plus - e_minus) / (2.0 * c_k);
        let grad: Vec<f64> = delta.iter().map(|d| scale * d).collect();
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= a_k * g;
            if cfg.wrap_angles {
                *t = t.rem_euclid(TAU);
            }
        }
        iterations.push(SpsaIteration {
            k,
            energy,
            grad_norm,
        });
    }
    let final_energy = check_finite(objective(&theta)?, cfg.iterations)?;
    Ok(SpsaTrace {
        iterations,
        final_theta: theta,
        final_energy,
        a,
    })
}
