//! Mackey–Glass delay-differential benchmark series, normalization, and
//! supervised windowing.
//!
//! The generator integrates
//! `dx/dt = b·x(t−τ) / (1 + x(t−τ)^n) − c·x(t)`
//! with classical fourth-order Runge–Kutta. Within one RK step the delayed
//! term is held at its buffered sample; with `dt` two orders of magnitude
//! below the delay this freezing error is far below the sampling resolution.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

// Inherent f64 methods shadow the trait under std (tests); no_std needs it.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;

/// Parameters of the delay-differential generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgConfig {
    /// Nonlinear gain `b`.
    pub gain: f64,
    /// Linear decay `c`.
    pub decay: f64,
    /// Exponent `n` of the delayed saturation term.
    pub exponent: f64,
    /// Delay `τ` in time units.
    pub delay: f64,
    /// Integration step in time units.
    pub dt: f64,
    /// Keep one sample every `sample_stride` integration steps.
    pub sample_stride: usize,
    /// Total samples generated (including washout).
    pub n_samples: usize,
    /// Constant history `x(t ≤ 0)`.
    pub history_value: f64,
    /// Initial samples discarded.
    pub washout_steps: usize,
}

impl Default for MgConfig {
    fn default() -> Self {
        Self {
            gain: 0.2,
            decay: 0.1,
            exponent: 10.0,
            delay: 17.0,
            dt: 0.1,
            sample_stride: 10,
            n_samples: 6000,
            history_value: 1.2,
            washout_steps: 1000,
        }
    }
}

impl MgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain > 0.0 && self.decay > 0.0 && self.dt > 0.0) {
            return Err(CoreError::InvalidConfig(
                "gain, decay, dt must be positive".to_string(),
            ));
        }
        if self.exponent < 1.0 {
            return Err(CoreError::InvalidConfig("exponent must be >= 1".to_string()));
        }
        if self.delay < 0.0 {
            return Err(CoreError::InvalidConfig("delay must be >= 0".to_string()));
        }
        if self.sample_stride == 0 {
            return Err(CoreError::InvalidConfig("sample_stride must be > 0".to_string()));
        }
        if self.n_samples <= self.washout_steps {
            return Err(CoreError::InvalidConfig(
                "n_samples must exceed washout_steps".to_string(),
            ));
        }
        let steps = self.delay / self.dt;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(CoreError::InvalidConfig(format!(
                "delay {} is not an integer multiple of dt {}",
                self.delay, self.dt
            )));
        }
        Ok(())
    }

    fn delay_steps(&self) -> usize {
        (self.delay / self.dt).round() as usize
    }
}

/// A uniformly sampled scalar series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// Time units between consecutive samples.
    pub dt_effective: f64,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn mg_rhs(cfg: &MgConfig, x: f64, x_delayed: f64) -> f64 {
    cfg.gain * x_delayed / (1.0 + x_delayed.powf(cfg.exponent)) - cfg.decay * x
}

/// One RK4 step. For `delay > 0` the delayed term is the frozen buffered
/// value; for `delay == 0` the system is an ODE and every stage evaluates
/// the instantaneous state.
fn rk4_step(cfg: &MgConfig, x: f64, x_delayed: Option<f64>) -> f64 {
    let f = |v: f64| mg_rhs(cfg, v, x_delayed.unwrap_or(v));
    let h = cfg.dt;
    let k1 = f(x);
    let k2 = f(x + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h * k2);
    let k4 = f(x + h * k3);
    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates the system and returns the post-washout, strided samples.
pub fn generate_mackey_glass(cfg: &MgConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let delay_steps = cfg.delay_steps();
    let total_steps = cfg
        .n_samples
        .saturating_sub(1)
        .saturating_mul(cfg.sample_stride);

    // Ring buffer of the last `delay_steps` states, seeded with history.
    let mut buffer = alloc::vec![cfg.history_value; delay_steps.max(1)];
    let mut x = cfg.history_value;
    let mut samples = Vec::with_capacity(cfg.n_samples);
    samples.push(x);

    for step in 0..total_steps {
        let delayed = if delay_steps == 0 {
            None
        } else {
            Some(buffer[step % delay_steps])
        };
        x = rk4_step(cfg, x, delayed);
        if !x.is_finite() {
            return Err(CoreError::IntegrationDiverged { step });
        }
        if delay_steps > 0 {
            buffer[step % delay_steps] = x;
        }
        if (step + 1) % cfg.sample_stride == 0 {
            samples.push(x);
        }
    }

    Ok(TimeSeries {
        values: samples.split_off(cfg.washout_steps),
        dt_effective: cfg.dt * cfg.sample_stride as f64,
    })
}

/// Affine range mapper fitted on observed data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub observed_min: f64,
    pub observed_max: f64,
    pub target_lo: f64,
    pub target_hi: f64,
}

impl Scaler {
    pub fn transform(&self, x: f64) -> f64 {
        self.target_lo
            + (x - self.observed_min) / (self.observed_max - self.observed_min)
                * (self.target_hi - self.target_lo)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        self.observed_min
            + (y - self.target_lo) / (self.target_hi - self.target_lo)
                * (self.observed_max - self.observed_min)
    }

    pub fn transform_all(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.transform(x)).collect()
    }
}

/// Fits the affine map `[min, max] → [target_lo, target_hi]` on `values`.
pub fn fit_scaler(values: &[f64], target_lo: f64, target_hi: f64) -> Result<Scaler> {
    if values.len() < 2 {
        return Err(CoreError::DegenerateScale);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        return Err(CoreError::DegenerateScale);
    }
    Ok(Scaler {
        observed_min: lo,
        observed_max: hi,
        target_lo,
        target_hi,
    })
}

/// Sliding-window supervised framing of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedDataset {
    /// One row per step: `window_len` consecutive samples.
    pub inputs: Matrix,
    /// Target `horizon` steps past the window end.
    pub targets: Vec<f64>,
    pub window_len: usize,
    pub horizon: usize,
}

impl WindowedDataset {
    pub fn n_rows(&self) -> usize {
        self.inputs.rows()
    }
}

/// Frames `series` into rows `samples[i..i+window_len]` with target
/// `samples[i + window_len − 1 + horizon]`.
pub fn make_windows(series: &[f64], window_len: usize, horizon: usize) -> Result<WindowedDataset> {
    if window_len == 0 || horizon == 0 {
        return Err(CoreError::InvalidConfig(
            "window_len and horizon must be positive".to_string(),
        ));
    }
    if series.len() <= window_len + horizon {
        return Err(CoreError::SeriesTooShort {
            len: series.len(),
            window: window_len,
            horizon,
        });
    }
    let t_eff = series.len() - window_len - horizon + 1;
    let mut inputs = Matrix::zeros(t_eff, window_len);
    let mut targets = Vec::with_capacity(t_eff);
    for i in 0..t_eff {
        inputs
            .row_mut(i)
            .copy_from_slice(&series[i..i + window_len]);
        targets.push(series[i + window_len - 1 + horizon]);
    }
    Ok(WindowedDataset {
        inputs,
        targets,
        window_len,
        horizon,
    })
}

/// Chronological split into the first `n_train` rows and the rest.
pub fn split_train_test(
    ds: &WindowedDataset,
    n_train: usize,
) -> Result<(WindowedDataset, WindowedDataset)> {
    let n = ds.n_rows();
    if n_train == 0 || n_train >= n {
        return Err(CoreError::BadSplit { n_train, n_rows: n });
    }
    let head = WindowedDataset {
        inputs: ds.inputs.slice_rows(0, n_train),
        targets: ds.targets[..n_train].to_vec(),
        window_len: ds.window_len,
        horizon: ds.horizon,
    };
    let tail = WindowedDataset {
        inputs: ds.inputs.slice_rows(n_train, n),
        targets: ds.targets[n_train..].to_vec(),
        window_len: ds.window_len,
        horizon: ds.horizon,
    };
    Ok((head, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn chaotic_cfg(n_samples: usize) -> MgConfig {
        MgConfig {
            n_samples,
            washout_steps: 0,
            ..MgConfig::default()
        }
    }

    #[test]
    fn fixed_point_history_stays_constant() {
        // x* = 1 solves b·x/(1+x^n) = c·x for b = 0.2, c = 0.1, n = 10.
        let cfg = MgConfig {
            history_value: 1.0,
            n_samples: 2000,
            washout_steps: 0,
            ..MgConfig::default()
        };
        let ts = generate_mackey_glass(&cfg).unwrap();
        for &v in &ts.values {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn chaotic_run_is_bounded_and_aperiodic() {
        let cfg = MgConfig {
            n_samples: 10_000,
            washout_steps: 0,
            ..MgConfig::default()
        };
        let ts = generate_mackey_glass(&cfg).unwrap();
        assert_eq!(ts.len(), 10_000);
        for &v in &ts.values {
            assert!((0.2..=1.5).contains(&v), "sample {v} out of range");
        }
        // No exact period ≤ 500 over the tail of the sequence.
        let v = &ts.values[2000..];
        for period in 1..=500usize {
            let matches = v[period..]
                .iter()
                .zip(v.iter())
                .all(|(a, b)| (a - b).abs() < 1e-9);
            assert!(!matches, "found exact period {period}");
        }
    }

    /// Independent scalar RK4 oracle for the delay-free ODE.
    fn oracle_rk4(x0: f64, dt: f64, steps: usize) -> f64 {
        let f = |x: f64| 0.2 * x / (1.0 + x.powi(10)) - 0.1 * x;
        let mut x = x0;
        for _ in 0..steps {
            let k1 = f(x);
            let k2 = f(x + 0.5 * dt * k1);
            let k3 = f(x + 0.5 * dt * k2);
            let k4 = f(x + dt * k3);
            x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        x
    }

    #[test]
    fn delay_zero_matches_independent_rk4() {
        let cfg = MgConfig {
            delay: 0.0,
            sample_stride: 1,
            n_samples: 200,
            washout_steps: 0,
            ..MgConfig::default()
        };
        let ts = generate_mackey_glass(&cfg).unwrap();
        for (i, &v) in ts.values.iter().enumerate() {
            assert_abs_diff_eq!(v, oracle_rk4(1.2, 0.1, i), epsilon = 1e-10);
        }
    }

    #[test]
    fn rk4_is_fourth_order_for_delay_zero() {
        // Halving dt must reduce the 10-step-horizon error against a dt/100
        // reference by at least 8x.
        let reference = |t_end: f64| {
            let cfg = MgConfig {
                delay: 0.0,
                dt: 0.001,
                sample_stride: 1,
                n_samples: (t_end / 0.001).round() as usize + 1,
                washout_steps: 0,
                ..MgConfig::default()
            };
            *generate_mackey_glass(&cfg).unwrap().values.last().unwrap()
        };
        let run = |dt: f64, steps: usize| {
            let cfg = MgConfig {
                delay: 0.0,
                dt,
                sample_stride: 1,
                n_samples: steps + 1,
                washout_steps: 0,
                ..MgConfig::default()
            };
            *generate_mackey_glass(&cfg).unwrap().values.last().unwrap()
        };
        let exact = reference(1.0);
        let err_coarse = (run(0.1, 10) - exact).abs();
        let err_fine = (run(0.05, 20) - exact).abs();
        assert!(
            err_coarse >= 8.0 * err_fine,
            "coarse {err_coarse:e} vs fine {err_fine:e}"
        );
    }

    #[test]
    fn trajectories_from_varied_history_stay_bounded() {
        for &h in &[0.5, 0.8, 1.0, 1.2, 1.5] {
            let cfg = MgConfig {
                history_value: h,
                n_samples: 3000,
                washout_steps: 0,
                ..MgConfig::default()
            };
            let ts = generate_mackey_glass(&cfg).unwrap();
            for &v in &ts.values {
                assert!((0.1..=1.6).contains(&v), "history {h}: sample {v}");
            }
        }
    }

    #[test]
    fn washout_and_stride_accounting() {
        let cfg = MgConfig {
            n_samples: 1500,
            washout_steps: 1000,
            ..MgConfig::default()
        };
        let ts = generate_mackey_glass(&cfg).unwrap();
        assert_eq!(ts.len(), 500);
        assert_abs_diff_eq!(ts.dt_effective, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_configs_rejected() {
        let cfg = MgConfig {
            delay: 17.05,
            ..MgConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(CoreError::InvalidConfig(_))));
        let cfg = MgConfig {
            n_samples: 10,
            washout_steps: 10,
            ..MgConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn scaler_examples() {
        let s = fit_scaler(&[0.0, 2.0], 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.transform(1.0), 0.5, epsilon = 1e-15);

        let s = fit_scaler(&[0.2, 1.4], 0.0, core::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(s.transform(1.4), core::f64::consts::PI, epsilon = 1e-15);

        let s = fit_scaler(&[-1.0, 3.0], 0.0, 1.0).unwrap();
        let mut state = 0x12345u64;
        for _ in 0..100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let x = -1.0 + 4.0 * ((state >> 11) as f64 / (1u64 << 53) as f64);
            assert_abs_diff_eq!(s.inverse(s.transform(x)), x, epsilon = 1e-12);
        }

        assert!(matches!(
            fit_scaler(&[1.0, 1.0, 1.0], 0.0, 1.0),
            Err(CoreError::DegenerateScale)
        ));
    }

    #[test]
    fn window_examples() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ds = make_windows(&s, 2, 1).unwrap();
        assert_eq!(ds.n_rows(), 3);
        assert_eq!(ds.inputs.row(0), &[1.0, 2.0]);
        assert_eq!(ds.inputs.row(2), &[3.0, 4.0]);
        assert_eq!(ds.targets, vec![3.0, 4.0, 5.0]);

        let ds = make_windows(&s, 2, 2).unwrap();
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(ds.inputs.row(1), &[2.0, 3.0]);
        assert_eq!(ds.targets, vec![4.0, 5.0]);

        assert!(make_windows(&s, 3, 2).is_err());
    }

    #[test]
    fn window_count_formula_matches_enumeration() {
        let series: Vec<f64> = (0..5000).map(|i| i as f64).collect();
        let ds = make_windows(&series, 20, 20).unwrap();
        assert_eq!(ds.n_rows(), 4961);
        // Explicit enumeration of valid start indices.
        let count = (0..series.len())
            .filter(|i| i + 20 - 1 + 20 < series.len())
            .count();
        assert_eq!(ds.n_rows(), count);
    }

    #[test]
    fn windows_are_exact_slices() {
        let cfg = chaotic_cfg(300);
        let ts = generate_mackey_glass(&cfg).unwrap();
        let ds = make_windows(&ts.values, 20, 5).unwrap();
        for i in 0..ds.n_rows() {
            assert_eq!(ds.inputs.row(i), &ts.values[i..i + 20]);
        }
    }

    #[test]
    fn split_examples() {
        let series: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let ds = make_windows(&series, 2, 1).unwrap();
        assert_eq!(ds.n_rows(), 10);
        let (train, test) = split_train_test(&ds, 8).unwrap();
        assert_eq!(train.n_rows(), 8);
        assert_eq!(test.n_rows(), 2);
        // Concatenation restores the original order exactly.
        let mut all = Vec::new();
        all.extend(train.inputs.iter_rows().map(<[f64]>::to_vec));
        all.extend(test.inputs.iter_rows().map(<[f64]>::to_vec));
        for (i, row) in all.iter().enumerate() {
            assert_eq!(row.as_slice(), ds.inputs.row(i));
        }
        assert!(split_train_test(&ds, 0).is_err());
        assert!(split_train_test(&ds, 10).is_err());
    }
}
