//! Exact sampling from the noise-smoothed Wigner function.
//!
//! For noise variance `s >= 1/2` per quadrature, `W * G_s = Q * G_{s - 1/2}`
//! with `Q(x, p) = <alpha|rho|alpha> / (2 pi)` the Husimi function. `Q` is
//! evaluated exactly and sampled by rejection from a uniform proposal; the
//! remaining Gaussian part is added as independent noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use super::NoiseModel;
use crate::{DensityMatrix, Error, Result, C64};

/// Vacuum smoothing variance per quadrature.
pub const VACUUM_VARIANCE: f64 = 0.5;
/// Margin beyond `sqrt(2 n_max + 1)` covered by the proposal box.
pub const GRID_MARGIN: f64 = 6.0;
/// Envelope safety factor over the tabulated maximum.
pub const ENVELOPE_FACTOR: f64 = 1.05;
const ENVELOPE_GRID: usize = 256;
const BOUNDARY_TOL: f64 = 1e-9;

/// Block layout shared by every sampling routine: `n` samples split into at
/// most `MAX_BLOCKS` consecutive blocks, block `b` drawn from ChaCha8 stream `b`.
pub const MAX_BLOCKS: usize = 1000;

pub(crate) fn block_layout(n: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let size = n.div_ceil(MAX_BLOCKS);
    let full = n / size;
    let mut out = vec![size; full];
    if n % size != 0 {
        out.push(n % size);
    }
    out
}

pub(crate) fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Husimi function of a fixed state with a rejection envelope.
#[derive(Debug, Clone)]
pub struct HusimiSampler {
    dim: usize,
    rho: Vec<C64>,
    diagonal: Option<Vec<f64>>,
    half_width: f64,
    envelope: f64,
    extra_sd: (f64, f64),
}

impl HusimiSampler {
    /// Sampler for `W * G` with per-quadrature variances `(sx, sp)`, both `>= 1/2`.
    pub fn new(rho: &DensityMatrix, sx: f64, sp: f64) -> Result<Self> {
        for s in [sx, sp] {
            if !(s >= VACUUM_VARIANCE) {
                return Err(Error::NoiseBelowThreshold(s));
            }
        }
        let dim = rho.support() + 1;
        let e = rho.entries();
        let rho_vec: Vec<C64> = (0..dim * dim).map(|k| e[(k / dim, k % dim)]).collect();
        let diagonal = (rho.max_off_diagonal() == 0.0)
            .then(|| (0..dim).map(|n| e[(n, n)].re).collect());
        let half_width = ((2 * (dim - 1) + 1) as f64).sqrt() + GRID_MARGIN;
        let mut s = Self {
            dim,
            rho: rho_vec,
            diagonal,
            half_width,
            envelope: 0.0,
            extra_sd: ((sx - VACUUM_VARIANCE).sqrt(), (sp - VACUUM_VARIANCE).sqrt()),
        };
        s.envelope = s.tabulate()? * ENVELOPE_FACTOR;
        Ok(s)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    /// Maximum of `Q` on the tabulation grid; fails if `Q` is not negligible
    /// on the boundary.
    fn tabulate(&self) -> Result<f64> {
        let l = self.half_width;
        let h = 2.0 * l / (ENVELOPE_GRID - 1) as f64;
        let (mut max, mut edge) = (0.0f64, 0.0f64);
        for i in 0..ENVELOPE_GRID {
            for j in 0..ENVELOPE_GRID {
                let q = self.q(-l + h * i as f64, -l + h * j as f64);
                if !q.is_finite() {
                    return Err(Error::NonFinite("Husimi function".into()));
                }
                max = max.max(q);
                if i == 0 || j == 0 || i == ENVELOPE_GRID - 1 || j == ENVELOPE_GRID - 1 {
                    edge = edge.max(q);
                }
            }
        }
        if max <= 0.0 || edge > BOUNDARY_TOL * max {
            return Err(Error::GridUnderflow(edge));
        }
        Ok(max)
    }

    /// `Q(x, p) = <alpha|rho|alpha> / (2 pi)`, `alpha = (x + i p) / sqrt 2`.
    pub fn q(&self, x: f64, p: f64) -> f64 {
        let a2 = 0.5 * (x * x + p * p);
        let v = if let Some(diag) = &self.diagonal {
            let mut term = 1.0;
            let mut acc = 0.0;
            for (n, &pn) in diag.iter().enumerate() {
                if n > 0 {
                    term *= a2 / n as f64;
                }
                acc += pn * term;
            }
            acc
        } else {
            let alpha = C64::new(x, p) / std::f64::consts::SQRT_2;
            let mut c = Vec::with_capacity(self.dim);
            c.push(C64::new(1.0, 0.0));
            for n in 1..self.dim {
                c.push(c[n - 1] * alpha / (n as f64).sqrt());
            }
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..self.dim {
                let mut row = C64::new(0.0, 0.0);
                for n in 0..self.dim {
                    row += self.rho[m * self.dim + n] * c[n];
                }
                acc += c[m].conj() * row;
            }
            acc.re
        };
        v * (-a2).exp() / (2.0 * PI)
    }

    /// One draw from `W * G`.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Result<(f64, f64)> {
        let l = self.half_width;
        loop {
            let x = rng.random_range(-l..l);
            let p = rng.random_range(-l..l);
            let u = rng.random::<f64>() * self.envelope;
            let q = self.q(x, p);
            if q > self.envelope {
                return Err(Error::NonConvergence {
                    what: "rejection envelope",
                    estimate: q / self.envelope,
                });
            }
            if u < q {
                let zx: f64 = rng.sample(StandardNormal);
                let zp: f64 = rng.sample(StandardNormal);
                return Ok((x + self.extra_sd.0 * zx, p + self.extra_sd.1 * zp));
            }
        }
    }
}

/// Checks the noise model against the smoothing threshold.
pub(crate) fn sampler_for(rho: &DensityMatrix, noise: &NoiseModel) -> Result<HusimiSampler> {
    HusimiSampler::new(rho, noise.sigma2_x, noise.sigma2_p)
}
