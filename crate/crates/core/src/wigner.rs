//! Wigner function on phase-space grids.
//!
//! `W(x, p) = (1/pi) int <x+y| rho |x-y> e^(-2 i p y) dy`, evaluated with
//! Hermite functions from their three-term recurrence and composite
//! Gauss–Legendre quadrature in `y`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quadrature::GaussLegendre;
use crate::{DensityMatrix, Error, Result, C64};

const PANEL_NODES: usize = 20;
const MIN_NODES: usize = 200;

/// Oscillator eigenfunctions `psi_0(x) .. psi_{dim-1}(x)`.
pub fn hermite_functions(x: f64, dim: usize, out: &mut Vec<f64>) {
    out.clear();
    if dim == 0 {
        return;
    }
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if dim > 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
}

/// Position density `<x| rho |x>`.
pub fn position_density(rho: &DensityMatrix, x: f64) -> f64 {
    let d = rho.support() + 1;
    let mut psi = Vec::with_capacity(d);
    hermite_functions(x, d, &mut psi);
    let e = rho.entries();
    let mut acc = 0.0;
    for m in 0..d {
        for n in 0..d {
            acc += (e[(m, n)] * psi[m] * psi[n]).re;
        }
    }
    acc
}

/// Rectangular grid request; endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub p0: f64,
    pub p1: f64,
    pub np: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, n: usize) -> Self {
        Self {
            x0: -half_width,
            x1: half_width,
            nx: n,
            p0: -half_width,
            p1: half_width,
            np: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x0, self.x1, self.p0, self.p1].iter().all(|v| v.is_finite());
        if !finite || self.nx < 2 || self.np < 2 || self.x1 <= self.x0 || self.p1 <= self.p0 {
            return Err(Error::InvalidArgument(format!("bad grid spec {self:?}")));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p1 - self.p0) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx() * i as f64
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p0 + self.dp() * j as f64
    }
}

/// Tabulated `W(x, p)`; `values[i * np + j]` is at `(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub p0: f64,
    pub p1: f64,
    pub np: usize,
    pub values: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub(crate) fn from_values(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.nx * spec.np);
        Self {
            x0: spec.x0,
            x1: spec.x1,
            nx: spec.nx,
            p0: spec.p0,
            p1: spec.p1,
            np: spec.np,
            values,
        }
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            x0: self.x0,
            x1: self.x1,
            nx: self.nx,
            p0: self.p0,
            p1: self.p1,
            np: self.np,
        }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.np + j]
    }

    /// Riemann sum of `f(x, p) W(x, p) dx dp`.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let spec = self.spec();
        let mut acc = 0.0;
        for i in 0..self.nx {
            for j in 0..self.np {
                acc += f(spec.x(i), spec.p(j)) * self.value(i, j);
            }
        }
        acc * spec.dx() * spec.dp()
    }

    /// `int W dp` at each `x_i`.
    pub fn marginal_x(&self) -> Vec<f64> {
        let dp = self.spec().dp();
        (0..self.nx)
            .map(|i| (0..self.np).map(|j| self.value(i, j)).sum::<f64>() * dp)
            .collect()
    }

    /// `int W dx` at each `p_j`.
    pub fn marginal_p(&self) -> Vec<f64> {
        let dx = self.spec().dx();
        (0..self.np)
            .map(|j| (0..self.nx).map(|i| self.value(i, j)).sum::<f64>() * dx)
            .collect()
    }

    /// CSV with header `x,p,w`.
    pub fn to_csv(&self) -> String {
        let spec = self.spec();
        let mut out = String::from("x,p,w\n");
        for i in 0..self.nx {
            for j in 0..self.np {
                out.push_str(&format!("{},{},{}\n", spec.x(i), spec.p(j), self.value(i, j)));
            }
        }
        out
    }
}

/// Quadrature in `y` adapted to the state's extent and the largest `|p|`.
struct YRule {
    nodes: Vec<(f64, f64)>,
}

impl YRule {
    fn new(support: usize, max_abs_p: f64) -> Self {
        let extent = (2.0 * support as f64 + 1.0).sqrt() + 8.0;
        // wavenumbers: Hermite oscillation ~ sqrt(2n+1) in each factor, 2p from the phase
        let wavenumber = 2.0 * (2.0 * support as f64 + 1.0).sqrt() + 2.0 * max_abs_p;
        let needed = (wavenumber * 2.0 * extent * 1.5).ceil() as usize;
        let panels = needed.max(MIN_NODES).div_ceil(PANEL_NODES);
        let rule = GaussLegendre::new(PANEL_NODES);
        let h = 2.0 * extent / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_NODES);
        for k in 0..panels {
            let lo = -extent + h * k as f64;
            rule.push_mapped(lo, lo + h, &mut nodes);
        }
        Self { nodes }
    }
}

/// `u(y) = sum_mn rho_mn psi_m(x+y) psi_n(x-y)` at each node.
fn kernel_row(rho: &DensityMatrix, d: usize, x: f64, rule: &YRule) -> Vec<C64> {
    let e = rho.entries();
    let mut plus = Vec::with_capacity(d);
    let mut minus = Vec::with_capacity(d);
    rule.nodes
        .iter()
        .map(|&(y, w)| {
            hermite_functions(x + y, d, &mut plus);
            hermite_functions(x - y, d, &mut minus);
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..d {
                if plus[m] == 0.0 {
                    continue;
                }
                let mut row = C64::new(0.0, 0.0);
                for n in 0..d {
                    row += e[(m, n)] * minus[n];
                }
                acc += row * plus[m];
            }
            acc * w
        })
        .collect()
}

fn transform(row: &[C64], rule: &YRule, p: f64) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for (u, &(y, _)) in row.iter().zip(&rule.nodes) {
        acc += u * C64::from_polar(1.0, -2.0 * p * y);
    }
    acc.re / PI
}

/// `W(x, p)` at a single point.
pub fn wigner_point(rho: &DensityMatrix, x: f64, p: f64) -> Result<f64> {
    let d = rho.support() + 1;
    let rule = YRule::new(d - 1, p.abs());
    let row = kernel_row(rho, d, x, &rule);
    let w = transform(&row, &rule, p);
    if !w.is_finite() {
        return Err(Error::NonFinite(format!("W({x}, {p})")));
    }
    Ok(w)
}

/// Tabulates `W` on the grid. Rows are independent, so the result does not
/// depend on the number of threads.
pub fn wigner_grid(rho: &DensityMatrix, spec: GridSpec) -> Result<PhaseSpaceGrid> {
    spec.validate()?;
    let d = rho.support() + 1;
    let max_p = spec.p0.abs().max(spec.p1.abs());
    let rule = YRule::new(d - 1, max_p);
    let rows: Vec<Vec<f64>> = (0..spec.nx)
        .into_par_iter()
        .map(|i| {
            let row = kernel_row(rho, d, spec.x(i), &rule);
            (0..spec.np).map(|j| transform(&row, &rule, spec.p(j))).collect()
        })
        .collect();
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "W at grid cell ({}, {})",
            k / spec.np,
            k % spec.np
        )));
    }
    Ok(PhaseSpaceGrid::from_values(spec, values))
}
