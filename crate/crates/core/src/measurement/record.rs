//! Continuous position records of a harmonic oscillator.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::sampler::{block_layout, block_rng, HusimiSampler};
use super::{MeasurementRun, NoiseModel, Provenance, RunConfig, RunData};
use crate::{DensityMatrix, Error, Result};

const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub omega: f64,
    /// Averaging time, a whole number of periods.
    pub t0: f64,
    pub dt: f64,
    /// `sigma2_*` is the total noise on the extracted quadratures; `s0` is the
    /// white-noise spectral density of the record.
    pub noise: NoiseModel,
    pub samples: usize,
    pub seed: u64,
}

impl TrajectoryConfig {
    pub fn validated(self) -> Result<Self> {
        if !(self.omega > 0.0 && self.t0 > 0.0 && self.dt > 0.0)
            || !(self.omega.is_finite() && self.t0.is_finite() && self.dt.is_finite())
        {
            return Err(Error::InvalidArgument("omega, t0, dt must be positive".into()));
        }
        let periods = self.t0 * self.omega / (2.0 * PI);
        if (periods - periods.round()).abs() > GRID_TOL * periods.max(1.0) || periods.round() < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "t0 must be a whole number of periods, got {periods}"
            )));
        }
        let steps = self.t0 / self.dt;
        if (steps - steps.round()).abs() > GRID_TOL * steps.max(1.0) {
            return Err(Error::InvalidArgument(format!("dt must divide t0, got {steps} steps")));
        }
        if !(self.noise.s0 >= 0.0) {
            return Err(Error::InvalidArgument("s0 must be non-negative".into()));
        }
        Ok(self)
    }

    /// Number of intervals `N`; records hold `N + 1` points.
    pub fn steps(&self) -> usize {
        (self.t0 / self.dt).round() as usize
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.t0 / self.steps() as f64;
        (0..=self.steps()).map(|i| h * i as f64).collect()
    }

    /// Trapezoid weights times `2 cos(w t) / t0` and `2 sin(w t) / t0`.
    pub(crate) fn filters(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.steps();
        let h = self.t0 / n as f64;
        let (mut c, mut s) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
        for (i, t) in self.times().into_iter().enumerate() {
            let w = if i == 0 || i == n { h / 2.0 } else { h } * 2.0 / self.t0;
            c.push(w * (self.omega * t).cos());
            s.push(w * (self.omega * t).sin());
        }
        (c, s)
    }

    /// Exact variance the record noise adds to `(x_est, p_est)`.
    pub fn estimator_noise_variance(&self) -> (f64, f64) {
        let var = self.noise.s0 / (self.t0 / self.steps() as f64);
        let (c, s) = self.filters();
        (
            c.iter().map(|v| v * v).sum::<f64>() * var,
            s.iter().map(|v| v * v).sum::<f64>() * var,
        )
    }

    /// Variance of the initial smoothing so that smoothing plus record noise
    /// equals `noise.sigma2_*`.
    pub fn initial_variances(&self) -> (f64, f64) {
        let (vx, vp) = self.estimator_noise_variance();
        (self.noise.sigma2_x - vx, self.noise.sigma2_p - vp)
    }
}

fn record<R: Rng>(cfg: &TrajectoryConfig, times: &[f64], x0: f64, p0: f64, rng: &mut R) -> Vec<f64> {
    let sd = (cfg.noise.s0 / (cfg.t0 / cfg.steps() as f64)).sqrt();
    times
        .iter()
        .map(|&t| {
            let (s, c) = (cfg.omega * t).sin_cos();
            let clean = x0 * c + p0 * s;
            if sd > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                clean + sd * z
            } else {
                clean
            }
        })
        .collect()
}

/// Streams the records of block `b`: initial point from `sampler` (or
/// `fixed`), then the noisy trajectory.
pub(crate) fn for_each_record<F: FnMut(Vec<f64>)>(
    cfg: &TrajectoryConfig,
    sampler: Option<&HusimiSampler>,
    fixed: (f64, f64),
    block: usize,
    count: usize,
    times: &[f64],
    mut f: F,
) -> Result<()> {
    let mut rng = block_rng(cfg.seed, block);
    for _ in 0..count {
        let (x0, p0) = match sampler {
            Some(s) => s.draw(&mut rng)?,
            None => fixed,
        };
        f(record(cfg, times, x0, p0, &mut rng));
    }
    Ok(())
}

fn run_records(
    cfg: TrajectoryConfig,
    sampler: Option<&HusimiSampler>,
    fixed: (f64, f64),
    state: String,
) -> Result<MeasurementRun> {
    let times = cfg.times();
    let layout = block_layout(cfg.samples);
    let blocks: Vec<Vec<Vec<f64>>> = layout
        .par_iter()
        .enumerate()
        .map(|(b, &count)| {
            let mut out = Vec::with_capacity(count);
            for_each_record(&cfg, sampler, fixed, b, count, &times, |r| out.push(r))?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(MeasurementRun {
        config: RunConfig::Record(cfg),
        provenance: Provenance { state, seed: cfg.seed },
        data: RunData::Records {
            times,
            values: blocks.into_iter().flatten().collect(),
        },
    })
}

/// `x(t_i) = x0 cos(w t_i) + p0 sin(w t_i) + xi_i` with `Var xi_i = s0 / dt`,
/// `(x0, p0)` drawn from `W` smoothed so that the extracted quadratures carry
/// total noise `config.noise.sigma2_*`.
pub fn simulate_record(rho: &DensityMatrix, config: &TrajectoryConfig) -> Result<MeasurementRun> {
    let cfg = config.validated()?;
    let (sx, sp) = cfg.initial_variances();
    let sampler = HusimiSampler::new(rho, sx, sp)?;
    run_records(cfg, Some(&sampler), (0.0, 0.0), super::state_label(rho))
}

/// Records from a fixed initial point.
pub fn simulate_fixed(x0: f64, p0: f64, config: &TrajectoryConfig) -> Result<MeasurementRun> {
    let cfg = config.validated()?;
    run_records(cfg, None, (x0, p0), format!("point:{x0},{p0}"))
}

pub(crate) fn extract_one(cfg: &TrajectoryConfig, filters: &(Vec<f64>, Vec<f64>), rec: &[f64]) -> (f64, f64) {
    debug_assert_eq!(rec.len(), cfg.steps() + 1);
    let x = filters.0.iter().zip(rec).map(|(w, v)| w * v).sum();
    let p = filters.1.iter().zip(rec).map(|(w, v)| w * v).sum();
    (x, p)
}

/// `x_est = (2/t0) int cos(w t) x dt`, `p_est = (2/t0) int sin(w t) x dt` by
/// the trapezoid rule.
pub fn extract_quadratures(run: &MeasurementRun) -> Result<Vec<(f64, f64)>> {
    let cfg = match &run.config {
        RunConfig::Record(c) => c.validated()?,
        RunConfig::Direct { .. } => {
            return Err(Error::InvalidArgument("run holds no time records".into()))
        }
    };
    let RunData::Records { values, .. } = &run.data else {
        return Err(Error::InvalidArgument("run holds no time records".into()));
    };
    let f = cfg.filters();
    values
        .iter()
        .map(|r| {
            if r.len() != cfg.steps() + 1 {
                return Err(Error::DimensionMismatch(r.len(), cfg.steps() + 1));
            }
            Ok(extract_one(&cfg, &f, r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s0: f64) -> TrajectoryConfig {
        TrajectoryConfig {
            omega: 1.0,
            t0: 2.0 * PI,
            dt: 2.0 * PI / 1000.0,
            noise: NoiseModel { sigma2_x: 1.0, sigma2_p: 1.0, s0 },
            samples: 3,
            seed: 1,
        }
    }

    #[test]
    fn noiseless_cosine() {
        let run = simulate_fixed(1.0, 0.0, &cfg(0.0)).unwrap();
        let RunData::Records { times, values } = &run.data else { panic!() };
        for (t, v) in times.iter().zip(&values[0]) {
            assert_eq!(*v, t.cos());
        }
        let q = extract_quadratures(&run).unwrap();
        assert!((q[0].0 - 1.0).abs() < 1e-12 && q[0].1.abs() < 1e-12);
    }

    #[test]
    fn rejects_partial_periods() {
        let mut c = cfg(0.0);
        c.t0 = 5.0;
        assert!(c.validated().is_err());
        let mut c = cfg(0.0);
        c.dt = 0.3;
        assert!(c.validated().is_err());
    }

    #[test]
    fn estimator_variance_close_to_white_noise_limit() {
        let c = cfg(0.01);
        let (vx, vp) = c.estimator_noise_variance();
        let want = 2.0 * 0.01 / c.t0;
        assert!((vx - want).abs() < 2e-3 * want);
        assert!((vp - want).abs() < 2e-3 * want);
    }
}
