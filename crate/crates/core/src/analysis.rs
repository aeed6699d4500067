//! Experiment drivers: dataset preparation, the forecasting pipeline, linear
//! memory capacity, and the diagnostic sweeps (circuit angle, noise channels,
//! feedback strength, readout fraction, delay/horizon grid).
//!
//! Every driver is a pure function of its configuration, so callers may
//! evaluate grid points concurrently and assemble results keyed by grid
//! value.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;
use rand::distributions::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::featuremap::FeatureMapSpec;
use crate::mackey_glass::{
    fit_scaler, generate_mackey_glass, make_windows, MgConfig, WindowedDataset,
};
use crate::matrix::Matrix;
use crate::quantum::NoiseSpec;
use crate::readout::{self, ReadoutKind};
use crate::reservoir::{run_reservoir, ReservoirConfig};
use crate::rng::{derive_seed, rng_from_seed};

/// Reference per-channel strengths combined proportionally by the `Combined`
/// noise axis at strength 1.
pub const COMBINED_P1_REF: f64 = 1e-3;
pub const COMBINED_P2_REF: f64 = 1e-2;
pub const COMBINED_READOUT_REF: f64 = 0.05;
pub const COMBINED_T1_REF_US: f64 = 50.0;

/// Sampling-and-split protocol shared by the forecasting experiments.
///
/// The series is normalized to `[0, 1]` with a scaler fitted only on values
/// visible to the training rows (inputs and targets); encoder angles are the
/// normalized values rescaled to `[0, angle_hi]`. Targets always stay in the
/// `[0, 1]` scale so model errors are comparable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub mg: MgConfig,
    pub window_len: usize,
    pub horizon: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Upper end of the encoder angle range (lower end 0).
    pub angle_hi: f64,
    /// Replicates draw an extra seed-dependent washout offset below this cap,
    /// selecting a different segment of the attractor per seed.
    pub max_seed_offset: usize,
}

impl ProtocolConfig {
    pub fn new(mg: MgConfig, window_len: usize, horizon: usize, n_train: usize, n_test: usize) -> Self {
        Self {
            mg,
            window_len,
            horizon,
            n_train,
            n_test,
            angle_hi: core::f64::consts::PI,
            max_seed_offset: 500,
        }
    }
}

/// Windowed data in both encodings plus the fitted scaler bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedData {
    /// Inputs in `[0, angle_hi]`, targets in `[0, 1]`.
    pub quantum: WindowedDataset,
    /// Inputs and targets in `[0, 1]`.
    pub classical: WindowedDataset,
    pub n_train: usize,
    pub n_test: usize,
}

/// Generates, normalizes, and windows one replicate of the benchmark series.
pub fn prepare_datasets(p: &ProtocolConfig, seed: u64) -> Result<PreparedData> {
    let needed = p.n_train + p.n_test + p.window_len + p.horizon - 1;
    let offset = if p.max_seed_offset == 0 {
        0
    } else {
        (derive_seed(seed, "series-offset") % p.max_seed_offset as u64) as usize
    };
    let mg = MgConfig {
        n_samples: p.mg.washout_steps + offset + needed,
        washout_steps: p.mg.washout_steps + offset,
        ..p.mg.clone()
    };
    let series = generate_mackey_glass(&mg)?;

    // Scaler sees only values reachable from training rows (incl. targets).
    let last_train_value = (p.n_train - 1) + p.window_len - 1 + p.horizon;
    let scaler = fit_scaler(&series.values[..=last_train_value], 0.0, 1.0)?;
    let scaled01 = scaler.transform_all(&series.values);
    let classical = make_windows(&scaled01, p.window_len, p.horizon)?;
    debug_assert_eq!(classical.n_rows(), p.n_train + p.n_test);

    let angles: Vec<f64> = scaled01.iter().map(|v| v * p.angle_hi).collect();
    let mut quantum = make_windows(&angles, p.window_len, p.horizon)?;
    quantum.targets = classical.targets.clone();

    Ok(PreparedData {
        quantum,
        classical,
        n_train: p.n_train,
        n_test: p.n_test,
    })
}

/// End-to-end quantum forecast: reservoir trace, ridge readout, test metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastOutcome {
    pub train_mse: f64,
    pub test_mse: f64,
    pub test_predictions: Vec<f64>,
    pub test_targets: Vec<f64>,
    pub simulations: usize,
    pub mean_entropy: Option<f64>,
}

pub fn qrc_forecast(
    cfg: &ReservoirConfig,
    data: &PreparedData,
    readout_reg: f64,
) -> Result<ForecastOutcome> {
    let trace = run_reservoir(cfg, &data.quantum)?;
    forecast_from_trace(cfg, &trace, data.n_train, readout_reg)
}

/// Readout training and evaluation given an existing trace.
pub fn forecast_from_trace(
    cfg: &ReservoirConfig,
    trace: &crate::reservoir::ReservoirTrace,
    n_train: usize,
    readout_reg: f64,
) -> Result<ForecastOutcome> {
    if cfg.washout >= n_train {
        return Err(CoreError::InvalidConfig(
            "reservoir washout exceeds the training rows".to_string(),
        ));
    }
    let train_rows = n_train - cfg.washout;
    if train_rows >= trace.n_rows() {
        return Err(CoreError::BadSplit {
            n_train: train_rows,
            n_rows: trace.n_rows(),
        });
    }
    let x_train = trace.features.slice_rows(0, train_rows);
    let x_test = trace.features.slice_rows(train_rows, trace.n_rows());
    let y_train = &trace.targets[..train_rows];
    let y_test = &trace.targets[train_rows..];
    let fe = readout::fit_eval(ReadoutKind::Ridge, &x_train, y_train, &x_test, y_test, readout_reg)?;
    let mean_entropy = trace.per_step_entropy.as_ref().map(|es| {
        es.iter().sum::<f64>() / es.len() as f64
    });
    Ok(ForecastOutcome {
        train_mse: fe.train_mse,
        test_mse: fe.test_mse,
        test_predictions: fe.test_predictions,
        test_targets: y_test.to_vec(),
        simulations: trace.simulations,
        mean_entropy,
    })
}

/// Linear memory capacity per delay and its truncated sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryCapacityResult {
    /// `MC_k` for `k = 1..=k_max`, each clamped to `[0, 1]`.
    pub per_delay: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryCapacityOptions {
    /// Length of the i.i.d. uniform(0,1) probe sequence.
    pub seq_len: usize,
    pub k_max: usize,
    /// Leading reservoir rows excluded from the regressions.
    pub washout: usize,
    pub train_frac: f64,
    pub reg: f64,
    pub seed: u64,
    /// Probe values are rescaled to `[0, angle_hi]` for encoding.
    pub angle_hi: f64,
}

impl Default for MemoryCapacityOptions {
    fn default() -> Self {
        Self {
            seq_len: 4000,
            k_max: 20,
            washout: 100,
            train_frac: 0.7,
            reg: 1e-8,
            seed: 7,
            angle_hi: core::f64::consts::PI,
        }
    }
}

/// Squared Pearson correlation, clamped to `[0, 1]`; 0 when either side is
/// (numerically) constant.
fn squared_correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va <= 1e-300 || vb <= 1e-300 {
        return 0.0;
    }
    ((cov * cov) / (va * vb)).clamp(0.0, 1.0)
}

/// Capacity estimate from an existing feature trace over a known probe.
///
/// Row `i` of `features` must correspond to the window ending at probe index
/// `i + window_len − 1`. For each delay the reconstruction is fitted on the
/// leading `train_frac` of the usable rows and scored on the held-out rest.
pub fn memory_capacity_from_features(
    features: &Matrix,
    probe: &[f64],
    window_len: usize,
    opts: &MemoryCapacityOptions,
) -> Result<MemoryCapacityResult> {
    let variance = squared_variance_guard(probe)?;
    let _ = variance;
    let t_rows = features.rows();
    let mut per_delay = Vec::with_capacity(opts.k_max);
    for k in 1..=opts.k_max {
        // Probe index for row i is i + window_len - 1; delayed target needs
        // i + window_len - 1 - k >= 0.
        let i0 = opts.washout.max((k + 1).saturating_sub(window_len));
        if i0 + 8 >= t_rows {
            per_delay.push(0.0);
            continue;
        }
        let targets: Vec<f64> = (i0..t_rows)
            .map(|i| probe[i + window_len - 1 - k])
            .collect();
        let rows = features.slice_rows(i0, t_rows);
        let n_tr = ((rows.rows() as f64) * opts.train_frac).floor() as usize;
        if n_tr < 4 || n_tr >= rows.rows() {
            per_delay.push(0.0);
            continue;
        }
        let x_train = rows.slice_rows(0, n_tr);
        let x_eval = rows.slice_rows(n_tr, rows.rows());
        let model = readout::fit(ReadoutKind::Ridge, &x_train, &targets[..n_tr], opts.reg)?;
        let pred = model.predict(&x_eval)?;
        per_delay.push(squared_correlation(&pred, &targets[n_tr..]));
    }
    let total = per_delay.iter().sum();
    Ok(MemoryCapacityResult { per_delay, total })
}

fn squared_variance_guard(probe: &[f64]) -> Result<f64> {
    let n = probe.len() as f64;
    let mean = probe.iter().sum::<f64>() / n;
    let var = probe.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if var <= 1e-300 {
        return Err(CoreError::DegenerateVariance("memory-capacity probe"));
    }
    Ok(var)
}

/// Drives the reservoir with an i.i.d. uniform probe and estimates how well
/// delayed inputs can be linearly reconstructed from the features.
pub fn memory_capacity(
    cfg: &ReservoirConfig,
    opts: &MemoryCapacityOptions,
) -> Result<MemoryCapacityResult> {
    let w = cfg.window_len;
    if opts.seq_len <= w + opts.k_max + 16 {
        return Err(CoreError::InvalidConfig(
            "probe sequence too short for the requested delays".to_string(),
        ));
    }
    let mut rng = rng_from_seed(opts.seed);
    let unit = Uniform::from(0.0f64..1.0);
    let probe: Vec<f64> = (0..opts.seq_len).map(|_| unit.sample(&mut rng)).collect();
    let angles: Vec<f64> = probe.iter().map(|v| v * opts.angle_hi).collect();
    // Horizon is irrelevant here; windows only feed the reservoir.
    let ds = make_windows(&angles, w, 1)?;
    let mut run_cfg = cfg.clone();
    run_cfg.washout = 0;
    run_cfg.record_entropy = false;
    let trace = run_reservoir(&run_cfg, &ds)?;
    memory_capacity_from_features(&trace.features, &probe, w, opts)
}

/// One sweep curve: MSE (and optional diagnostics) per grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: String,
    pub grid: Vec<f64>,
    pub mse: Vec<f64>,
    pub entropy: Option<Vec<f64>>,
    pub memory_capacity: Option<Vec<f64>>,
}

/// One circuit-angle sweep point: forecast MSE, mean per-step entanglement
/// entropy, and memory capacity at the overridden angle.
pub fn theta_point(
    base: &ReservoirConfig,
    theta_index: usize,
    value: f64,
    data: &PreparedData,
    readout_reg: f64,
    mc_opts: &MemoryCapacityOptions,
) -> Result<(f64, f64, f64)> {
    if theta_index >= 6 {
        return Err(CoreError::InvalidConfig("theta index must be 0..6".to_string()));
    }
    let mut cfg = base.clone();
    cfg.fmap.thetas[theta_index] = value;
    cfg.record_entropy = true;
    let outcome = qrc_forecast(&cfg, data, readout_reg)?;
    cfg.record_entropy = false;
    let mc = memory_capacity(&cfg, mc_opts)?;
    Ok((
        outcome.test_mse,
        outcome.mean_entropy.expect("entropy recorded on pure path"),
        mc.total,
    ))
}

pub fn theta_sweep(
    base: &ReservoirConfig,
    theta_index: usize,
    grid: &[f64],
    data: &PreparedData,
    readout_reg: f64,
    mc_opts: &MemoryCapacityOptions,
) -> Result<SweepResult> {
    let bound = core::f64::consts::FRAC_PI_2 + 1e-12;
    if grid.iter().any(|v| !v.is_finite() || v.abs() > bound) {
        return Err(CoreError::InvalidConfig(
            "theta grid must lie in [-pi/2, pi/2]".to_string(),
        ));
    }
    let mut mse = Vec::with_capacity(grid.len());
    let mut entropy = Vec::with_capacity(grid.len());
    let mut mc = Vec::with_capacity(grid.len());
    for &v in grid {
        let (m, e, c) = theta_point(base, theta_index, v, data, readout_reg, mc_opts)?;
        mse.push(m);
        entropy.push(e);
        mc.push(c);
    }
    Ok(SweepResult {
        axis: alloc::format!("theta[{theta_index}]"),
        grid: grid.to_vec(),
        mse,
        entropy: Some(entropy),
        memory_capacity: Some(mc),
    })
}

/// Noise channel selected by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseChannel {
    OneQubit,
    TwoQubit,
    Readout,
    Relaxation,
    Combined,
}

impl NoiseChannel {
    pub fn axis_name(&self) -> &'static str {
        match self {
            NoiseChannel::OneQubit => "noise-1q",
            NoiseChannel::TwoQubit => "noise-2q",
            NoiseChannel::Readout => "noise-readout",
            NoiseChannel::Relaxation => "noise-t1",
            NoiseChannel::Combined => "noise-combined",
        }
    }
}

/// Noise model for one grid point of a channel sweep. For `Relaxation` the
/// grid value is `T1` in µs; for `Combined` it scales every reference
/// strength proportionally (including the relaxation rate).
pub fn noise_spec_for(channel: NoiseChannel, strength: f64) -> Result<NoiseSpec> {
    let mut spec = NoiseSpec::none();
    match channel {
        NoiseChannel::OneQubit => spec.p_depol_1q = strength,
        NoiseChannel::TwoQubit => spec.p_depol_2q = strength,
        NoiseChannel::Readout => spec.readout_eps = strength,
        NoiseChannel::Relaxation => {
            spec.t1_us = if strength.is_finite() {
                Some(strength)
            } else {
                None
            }
        }
        NoiseChannel::Combined => {
            if strength > 0.0 {
                spec.p_depol_1q = strength * COMBINED_P1_REF;
                spec.p_depol_2q = strength * COMBINED_P2_REF;
                spec.readout_eps = strength * COMBINED_READOUT_REF;
                spec.t1_us = Some(COMBINED_T1_REF_US / strength);
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}

/// Test MSE of the forecasting pipeline under one noise setting.
pub fn noise_point(
    base: &ReservoirConfig,
    data: &PreparedData,
    readout_reg: f64,
    channel: NoiseChannel,
    strength: f64,
) -> Result<f64> {
    let spec = noise_spec_for(channel, strength)?;
    let mut cfg = base.clone();
    cfg.record_entropy = false;
    cfg.noise = if spec.is_trivial() { None } else { Some(spec) };
    Ok(qrc_forecast(&cfg, data, readout_reg)?.test_mse)
}

pub fn noise_sweep(
    base: &ReservoirConfig,
    data: &PreparedData,
    readout_reg: f64,
    channel: NoiseChannel,
    grid: &[f64],
) -> Result<SweepResult> {
    let mut mse = Vec::with_capacity(grid.len());
    for &s in grid {
        mse.push(noise_point(base, data, readout_reg, channel, s)?);
    }
    Ok(SweepResult {
        axis: channel.axis_name().to_string(),
        grid: grid.to_vec(),
        mse,
        entropy: None,
        memory_capacity: None,
    })
}

/// Feedback-strength sweep: one full pipeline run per grid value.
pub fn alpha_sweep(
    base: &ReservoirConfig,
    data: &PreparedData,
    readout_reg: f64,
    grid: &[f64],
) -> Result<SweepResult> {
    let mut mse = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let mut cfg = base.clone();
        cfg.alpha = alpha;
        mse.push(qrc_forecast(&cfg, data, readout_reg)?.test_mse);
    }
    Ok(SweepResult {
        axis: "alpha".to_string(),
        grid: grid.to_vec(),
        mse,
        entropy: None,
        memory_capacity: None,
    })
}

/// Readout-fraction sweep. The reservoir is simulated once at λ = 1; each
/// grid point refits the readout on the prefix of the feature columns
/// (truncation commutes with simulation).
pub fn lambda_sweep(
    base: &ReservoirConfig,
    data: &PreparedData,
    readout_reg: f64,
    grid: &[f64],
) -> Result<SweepResult> {
    if grid.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
        return Err(CoreError::InvalidConfig(
            "lambda grid must lie in (0, 1]".to_string(),
        ));
    }
    let mut full_cfg = base.clone();
    full_cfg.lambda_frac = 1.0;
    let trace = run_reservoir(&full_cfg, &data.quantum)?;
    let dim = trace.features.cols();
    let mut mse = Vec::with_capacity(grid.len());
    for &l in grid {
        let kept = (((l * dim as f64).floor() as usize).max(1)).min(dim);
        let truncated = crate::reservoir::ReservoirTrace {
            features: trace.features.truncate_cols(kept),
            targets: trace.targets.clone(),
            feedback_history: trace.feedback_history.clone(),
            per_step_entropy: None,
            simulations: trace.simulations,
        };
        let outcome = forecast_from_trace(&full_cfg, &truncated, data.n_train, readout_reg)?;
        mse.push(outcome.test_mse);
    }
    Ok(SweepResult {
        axis: "lambda".to_string(),
        grid: grid.to_vec(),
        mse,
        entropy: None,
        memory_capacity: None,
    })
}

/// One cell of the delay × horizon × feature-map comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayHorizonCell {
    pub map_label: String,
    pub delay: f64,
    pub horizon: usize,
    pub per_seed_mse: Vec<f64>,
    pub median_mse: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs one (map, delay, horizon) cell over the given seeds.
#[allow(clippy::too_many_arguments)]
pub fn delay_horizon_cell(
    protocol: &ProtocolConfig,
    fmap: &FeatureMapSpec,
    map_label: &str,
    alpha: f64,
    lambda_frac: f64,
    delay: f64,
    horizon: usize,
    readout_reg: f64,
    seeds: &[u64],
) -> Result<DelayHorizonCell> {
    let mut per_seed = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let p = ProtocolConfig {
            mg: MgConfig {
                delay,
                ..protocol.mg.clone()
            },
            window_len: fmap.n_features,
            horizon,
            ..protocol.clone()
        };
        let data = prepare_datasets(&p, seed)?;
        let mut cfg = ReservoirConfig::new(*fmap, horizon, alpha, lambda_frac);
        cfg.window_len = fmap.n_features;
        per_seed.push(qrc_forecast(&cfg, &data, readout_reg)?.test_mse);
    }
    Ok(DelayHorizonCell {
        map_label: map_label.to_string(),
        delay,
        horizon,
        median_mse: median(&per_seed),
        per_seed_mse: per_seed,
    })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut ranks = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                ranks[k] = avg;
            }
            i = j + 1;
        }
        ranks
    };
    let ra = rank(xs);
    let rb = rank(ys);
    squared_correlation(&ra, &rb).sqrt()
        * {
            // Restore the sign lost by squaring.
            let n = ra.len() as f64;
            let ma = ra.iter().sum::<f64>() / n;
            let mb = rb.iter().sum::<f64>() / n;
            let cov: f64 = ra
                .iter()
                .zip(&rb)
                .map(|(a, b)| (a - ma) * (b - mb))
                .sum();
            if cov >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
}
