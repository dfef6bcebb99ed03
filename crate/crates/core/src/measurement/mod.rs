//! Noisy detection of phase-space quadratures and recovery of Weyl moments.
//!
//! Detection adds independent Gaussian noise to `(x, p)`, so the measured
//! density is `W * G`. Its cumulants differ from those of `W` only at second
//! order, which makes deconvolution exact on cumulants.

mod cumulants;
mod record;
mod sampler;

pub use cumulants::{
    convolve, convolve_moments, cumulants_to_moments, deconvolve, deconvolve_moments,
    moments_to_cumulants, CumulantTable, MAX_CUMULANT_ORDER,
};
pub use record::{extract_quadratures, simulate_fixed, simulate_record, TrajectoryConfig};
pub use sampler::{HusimiSampler, ENVELOPE_FACTOR, GRID_MARGIN, MAX_BLOCKS, VACUUM_VARIANCE};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::wigner::{wigner_grid, GridSpec, PhaseSpaceGrid};
use crate::witness::{witness_value, witness_value_from_moments, ReportState};
use crate::{DensityMatrix, Error, MomentTable, PolynomialWitness, Result, WitnessReport};
use sampler::{block_layout, block_rng};

/// Bootstrap resamples used for standard errors.
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Standard errors required below zero to claim a violation.
pub const DECISION_SIGMAS: f64 = 3.0;
/// Tolerated negativity of the tabulated smoothed density.
pub const POSITIVITY_TOL: f64 = 1e-12;

/// Gaussian detection noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma2_x: f64,
    pub sigma2_p: f64,
    /// White-noise spectral density of continuous records.
    #[serde(default)]
    pub s0: f64,
}

impl NoiseModel {
    pub fn new(sigma2_x: f64, sigma2_p: f64) -> Result<Self> {
        Self { sigma2_x, sigma2_p, s0: 0.0 }.validated()
    }

    pub fn with_s0(mut self, s0: f64) -> Result<Self> {
        self.s0 = s0;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.sigma2_x) || !ok(self.sigma2_p) || !(self.s0 >= 0.0 && self.s0.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid noise model {self:?}")));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub state: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum RunConfig {
    Direct { noise: NoiseModel, samples: usize, seed: u64 },
    Record(TrajectoryConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunData {
    Pairs(Vec<(f64, f64)>),
    Records { times: Vec<f64>, values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRun {
    pub config: RunConfig,
    pub provenance: Provenance,
    pub data: RunData,
}

impl MeasurementRun {
    pub fn len(&self) -> usize {
        match &self.data {
            RunData::Pairs(v) => v.len(),
            RunData::Records { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn state_label(rho: &DensityMatrix) -> String {
    let d = rho.dim();
    if rho.max_off_diagonal() == 0.0 {
        if let Some(n) = (0..d).find(|&n| rho.entries()[(n, n)].re == 1.0) {
            return format!("fock:{n}");
        }
    }
    format!("density:{d}")
}

/// `n` independent draws from `W * G`, reproducible from `seed`.
pub fn sample_convolved(
    rho: &DensityMatrix,
    noise: &NoiseModel,
    n: usize,
    seed: u64,
) -> Result<MeasurementRun> {
    let noise = noise.validated()?;
    let sampler = sampler::sampler_for(rho, &noise)?;
    let blocks: Vec<Vec<(f64, f64)>> = block_layout(n)
        .par_iter()
        .enumerate()
        .map(|(b, &count)| {
            let mut rng = block_rng(seed, b);
            (0..count).map(|_| sampler.draw(&mut rng)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(MeasurementRun {
        config: RunConfig::Direct { noise, samples: n, seed },
        provenance: Provenance { state: state_label(rho), seed },
        data: RunData::Pairs(blocks.into_iter().flatten().collect()),
    })
}

/// `W * G` tabulated on a grid by trapezoid convolution of the Wigner grid.
/// For noise at or above the vacuum width the result must be non-negative.
pub fn convolved_density_grid(
    rho: &DensityMatrix,
    noise: &NoiseModel,
    spec: GridSpec,
) -> Result<PhaseSpaceGrid> {
    let noise = noise.validated()?;
    let mut grid = wigner_grid(rho, spec)?;
    let (nx, np) = (grid.nx, grid.np);
    let kernel = |var: f64, h: f64, n: usize| -> Vec<f64> {
        let norm = h / (2.0 * std::f64::consts::PI * var).sqrt();
        (0..n).map(|k| norm * (-(h * k as f64).powi(2) / (2.0 * var)).exp()).collect()
    };
    let kx = kernel(noise.sigma2_x, spec.dx(), nx);
    let kp = kernel(noise.sigma2_p, spec.dp(), np);
    let mut tmp = vec![0.0; nx * np];
    tmp.par_chunks_mut(np).enumerate().for_each(|(i, row)| {
        for (k, wrow) in grid.values.chunks(np).enumerate() {
            let g = kx[i.abs_diff(k)];
            for (r, w) in row.iter_mut().zip(wrow) {
                *r += g * w;
            }
        }
    });
    grid.values.par_chunks_mut(np).zip(tmp.par_chunks(np)).for_each(|(out, row)| {
        for (j, o) in out.iter_mut().enumerate() {
            *o = row.iter().enumerate().map(|(l, v)| kp[j.abs_diff(l)] * v).sum();
        }
    });
    let min = grid.values.iter().copied().fold(f64::INFINITY, f64::min);
    if noise.sigma2_x >= VACUUM_VARIANCE && noise.sigma2_p >= VACUUM_VARIANCE && min < -POSITIVITY_TOL {
        return Err(Error::NegativeDensity(min));
    }
    Ok(grid)
}

/// Power sums `sum x^n p^m` for `n + m <= order` over one block.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    pub order: usize,
    pub count: usize,
    sums: Vec<f64>,
}

impl PowerSums {
    pub fn new(order: usize) -> Self {
        let len = MomentTable::indices(order).count();
        Self { order, count: 0, sums: vec![0.0; len] }
    }

    pub fn push(&mut self, x: f64, p: f64) {
        let k = self.order;
        let mut xs = [1.0; MAX_CUMULANT_ORDER + 1];
        let mut ps = [1.0; MAX_CUMULANT_ORDER + 1];
        for i in 1..=k {
            xs[i] = xs[i - 1] * x;
            ps[i] = ps[i - 1] * p;
        }
        for (s, (n, m)) in self.sums.iter_mut().zip(MomentTable::indices(k)) {
            *s += xs[n] * ps[m];
        }
        self.count += 1;
    }

    pub fn add(&mut self, other: &Self) {
        debug_assert_eq!(self.order, other.order);
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        self.count += other.count;
    }

    /// Sample means as a moment table.
    pub fn moments(&self) -> Result<MomentTable> {
        if self.count == 0 {
            return Err(Error::InvalidArgument("no samples".into()));
        }
        let inv = 1.0 / self.count as f64;
        let entries: BTreeMap<_, _> = MomentTable::indices(self.order)
            .zip(&self.sums)
            .map(|(k, s)| (k, s * inv))
            .collect();
        MomentTable::from_entries(self.order, entries)
    }
}

/// How samples are produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Detection {
    /// Direct noisy readout of both quadratures.
    Direct(NoiseModel),
    /// Fourier components of continuous position records.
    Record(TrajectoryConfig),
}

impl Detection {
    /// Total Gaussian noise on the quadratures entering the moments.
    pub fn total_noise(&self) -> NoiseModel {
        match self {
            Self::Direct(n) => *n,
            Self::Record(c) => c.noise,
        }
    }
}

/// Per-block power sums, in block order.
pub fn sample_moments(
    rho: &DensityMatrix,
    detection: &Detection,
    order: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<PowerSums>> {
    if order > MAX_CUMULANT_ORDER {
        return Err(Error::InvalidArgument(format!(
            "moment order {order} exceeds {MAX_CUMULANT_ORDER}"
        )));
    }
    let layout = block_layout(n);
    match detection {
        Detection::Direct(noise) => {
            let sampler = sampler::sampler_for(rho, &noise.validated()?)?;
            layout
                .par_iter()
                .enumerate()
                .map(|(b, &count)| {
                    let mut rng = block_rng(seed, b);
                    let mut sums = PowerSums::new(order);
                    for _ in 0..count {
                        let (x, p) = sampler.draw(&mut rng)?;
                        sums.push(x, p);
                    }
                    Ok(sums)
                })
                .collect()
        }
        Detection::Record(cfg) => {
            let cfg = TrajectoryConfig { samples: n, seed, ..*cfg }.validated()?;
            let (sx, sp) = cfg.initial_variances();
            let sampler = HusimiSampler::new(rho, sx, sp)?;
            let times = cfg.times();
            let filters = cfg.filters();
            layout
                .par_iter()
                .enumerate()
                .map(|(b, &count)| {
                    let mut sums = PowerSums::new(order);
                    record::for_each_record(&cfg, Some(&sampler), (0.0, 0.0), b, count, &times, |r| {
                        let (x, p) = record::extract_one(&cfg, &filters, &r);
                        sums.push(x, p);
                    })?;
                    Ok(sums)
                })
                .collect()
        }
    }
}

/// Outcome of the sample, deconvolve, evaluate pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct Recovery {
    pub config: Detection,
    pub samples: usize,
    pub seed: u64,
    pub empirical_moments: MomentTable,
    pub deconvolved_moments: MomentTable,
    /// `value` is the recovered `<f^2>_W`; `violated` applies the
    /// `value + 3 SE < 0` rule.
    pub witness: WitnessReport,
    /// `<f^2>_W` of the true state, for reference.
    pub exact_value: f64,
    pub stderr_bootstrap: f64,
    /// Bootstrap standard errors of the recovered radial moments.
    pub radial_stderr: BTreeMap<usize, f64>,
}

fn recovered(sums: &PowerSums, noise: &NoiseModel, f: &PolynomialWitness) -> Result<(MomentTable, f64)> {
    let table = deconvolve_moments(&sums.moments()?, noise)?;
    let v = witness_value_from_moments(&table, f)?;
    Ok((table, v))
}

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Simulates `n` detections, deconvolves the moments and evaluates
/// `<f^2>_W`, with a block-bootstrap standard error.
pub fn recover_witness(
    rho: &DensityMatrix,
    detection: &Detection,
    witness: &PolynomialWitness,
    n: usize,
    seed: u64,
) -> Result<Recovery> {
    let order = 2 * witness.order();
    if order > MAX_CUMULANT_ORDER {
        return Err(Error::InvalidArgument(format!(
            "witness order {} needs moments beyond {MAX_CUMULANT_ORDER}",
            witness.order()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let noise = detection.total_noise();
    let blocks = sample_moments(rho, detection, order, n, seed)?;
    let mut total = PowerSums::new(order);
    for b in &blocks {
        total.add(b);
    }
    let empirical = total.moments()?;
    let (table, value) = recovered(&total, &noise, witness)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut values = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut radial: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut acc = PowerSums::new(order);
        for _ in 0..blocks.len() {
            acc.add(blocks.choose(&mut rng).expect("non-empty"));
        }
        let (t, v) = recovered(&acc, &noise, witness)?;
        values.push(v);
        for (&j, &r) in &t.radial {
            radial.entry(j).or_default().push(r);
        }
    }
    let se = if blocks.len() > 1 { std_dev(&values) } else { f64::INFINITY };
    let radial_stderr = radial
        .into_iter()
        .map(|(j, v)| (j, if blocks.len() > 1 { std_dev(&v) } else { f64::INFINITY }))
        .collect();

    let report = WitnessReport {
        witness: witness.clone(),
        state: ReportState::Mixed(rho.clone()),
        value,
        min_eigenvalue: None,
        eigenvector: Vec::new(),
        eigenvector_im: None,
        basis: Vec::new(),
        violated: value + DECISION_SIGMAS * se < 0.0,
        degenerate: false,
    };
    Ok(Recovery {
        config: *detection,
        samples: n,
        seed,
        empirical_moments: empirical,
        deconvolved_moments: table,
        witness: report,
        exact_value: witness_value(rho, witness)?,
        stderr_bootstrap: se,
        radial_stderr,
    })
}
