//! The power-law regularised wavefunction
//! `psi(x) = exp(-|x|/2) |x|^(eps - 1/2) / sqrt(2 Gamma(2 eps))`.
//!
//! As `eps -> 0` its `(2xp)^2` Weyl moment approaches `-1`, the lower bound
//! for the `2xp + c0` family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::quadrature::{composite, power_endpoint, GaussLegendre};
use crate::special::gamma;
use crate::wigner::{GridSpec, PhaseSpaceGrid};
use crate::{Error, Result};

/// Largest supported `eps`.
pub const MAX_EPSILON: f64 = 5.0;
/// Agreement required between an `n`-node and a `2n`-node evaluation.
pub const DOUBLING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedStateParams {
    pub epsilon: f64,
    /// Constant offset of the witness `2xp + c0`.
    pub c0: f64,
    /// Gauss–Legendre points per panel.
    pub nodes: usize,
    /// Integration range beyond the singular point.
    pub cutoff: f64,
}

impl RegularizedStateParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        Self {
            epsilon,
            c0: 0.0,
            nodes: 20,
            cutoff: 60.0,
        }
        .validated()
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.epsilon > 0.0 && self.epsilon <= MAX_EPSILON) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, {MAX_EPSILON}], got {}",
                self.epsilon
            )));
        }
        if !self.c0.is_finite() {
            return Err(Error::InvalidArgument("c0 must be finite".into()));
        }
        if self.nodes < 2 || !(self.cutoff > 1.0) {
            return Err(Error::InvalidArgument("need nodes >= 2 and cutoff > 1".into()));
        }
        Ok(self)
    }

    fn norm_const(&self) -> f64 {
        2.0 * gamma(2.0 * self.epsilon)
    }

    /// `psi(x)`; infinite at the origin for `eps < 1/2`.
    pub fn psi(&self, x: f64) -> f64 {
        let a = x.abs();
        (-a / 2.0).exp() * a.powf(self.epsilon - 0.5) / self.norm_const().sqrt()
    }
}

/// `2 * int_0^cutoff x^(2 eps - 1) e^-x h(x) dx / (2 Gamma(2 eps))`.
fn even_density_integral<H: Fn(f64) -> f64>(p: &RegularizedStateParams, rule: &GaussLegendre, h: H) -> f64 {
    let alpha = 2.0 * p.epsilon - 1.0;
    let g = |t: f64| (-t).exp() * h(t);
    let near = power_endpoint(alpha, 1.0, rule, g);
    let panels = (p.cutoff - 1.0).ceil() as usize;
    let far = composite(rule, 1.0, p.cutoff, panels, |t| t.powf(alpha) * g(t));
    2.0 * (near + far) / p.norm_const()
}

fn with_doubling<F: Fn(&GaussLegendre) -> f64>(what: &'static str, nodes: usize, tol: f64, f: F) -> Result<f64> {
    let coarse = f(&GaussLegendre::new(nodes));
    let fine = f(&GaussLegendre::new(2 * nodes));
    if !fine.is_finite() {
        return Err(Error::NonFinite(what.into()));
    }
    let estimate = (fine - coarse).abs();
    if estimate > tol * fine.abs().max(1.0) {
        return Err(Error::NonConvergence { what, estimate });
    }
    Ok(fine)
}

/// `int |psi|^2 dx`.
pub fn psi_norm_check(params: &RegularizedStateParams) -> Result<f64> {
    let p = params.validated()?;
    let norm = with_doubling("norm quadrature", p.nodes, DOUBLING_TOL, |rule| {
        even_density_integral(&p, rule, |_| 1.0)
    })?;
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NonConvergence {
            what: "norm quadrature",
            estimate: (norm - 1.0).abs(),
        });
    }
    Ok(norm)
}

/// `<(2xp + c0)^2>_W = int |phi|^2 dx - 1`, with
/// `phi = (c0 - i - 2 i x d/dx) psi = (c0 - i (2 eps - |x|)) psi`.
pub fn fb_moment(params: &RegularizedStateParams) -> Result<f64> {
    let p = params.validated()?;
    let (eps, c0) = (p.epsilon, p.c0);
    let phi2 = with_doubling("phi quadrature", p.nodes, DOUBLING_TOL, |rule| {
        even_density_integral(&p, rule, |t| c0 * c0 + (t - 2.0 * eps).powi(2))
    })?;
    Ok(phi2 - 1.0)
}

/// `int_0^len t^alpha h(t) dt` with a graded mesh near `t = 0` and panels of
/// width at most `width` elsewhere.
fn singular_segment<H: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    alpha: f64,
    len: f64,
    width: f64,
    h: H,
) -> f64 {
    if len <= 0.0 {
        return 0.0;
    }
    let near = len.min(width);
    let mut acc = power_endpoint(alpha, near, rule, &h);
    if len > near {
        let panels = ((len - near) / width).ceil() as usize;
        acc += composite(rule, near, len, panels, |t| t.powf(alpha) * h(t));
    }
    acc
}

fn wigner_with_rule(p: &RegularizedStateParams, rule: &GaussLegendre, x: f64, mom: f64) -> f64 {
    let (x, mom) = (x.abs(), mom.abs());
    let eps = p.epsilon;
    let width = if mom > 0.0 { (1.0 / mom).min(0.5) } else { 0.5 };
    let amp = 1.0 / p.norm_const().sqrt();
    let inv_n = 1.0 / p.norm_const();
    if x == 0.0 {
        // psi(y)^2 = e^-y y^(2 eps - 1) / N
        let v = singular_segment(rule, 2.0 * eps - 1.0, p.cutoff, width, |t| {
            (-t).exp() * inv_n * (2.0 * mom * t).cos()
        });
        return 2.0 * v / PI;
    }
    let alpha = eps - 0.5;
    // y in [0, x], t = x - y
    let inner = singular_segment(rule, alpha, x, width, |t| {
        (-t / 2.0).exp() * amp * p.psi(2.0 * x - t) * (2.0 * mom * (x - t)).cos()
    });
    // y in [x, x + cutoff], t = y - x
    let outer = singular_segment(rule, alpha, p.cutoff, width, |t| {
        (-t / 2.0).exp() * amp * p.psi(2.0 * x + t) * (2.0 * mom * (x + t)).cos()
    });
    2.0 * (inner + outer) / PI
}

/// `W(x, p) = (1/pi) int psi(x + y) psi(x - y) cos(2 p y) dy`, split at the
/// singular point `y = |x|`. Fails if halving the panel resolution moves the
/// result by more than the doubling tolerance.
pub fn wigner_point(params: &RegularizedStateParams, x: f64, p: f64) -> Result<f64> {
    let prm = params.validated()?;
    if !x.is_finite() || !p.is_finite() {
        return Err(Error::InvalidArgument("phase-space point must be finite".into()));
    }
    with_doubling("regularized Wigner quadrature", prm.nodes, DOUBLING_TOL, |rule| {
        wigner_with_rule(&prm, rule, x, p)
    })
}

/// `W` on a grid, without the doubling check.
pub fn wigner_grid(params: &RegularizedStateParams, spec: GridSpec) -> Result<PhaseSpaceGrid> {
    let prm = params.validated()?;
    spec.validate()?;
    let rule = GaussLegendre::new(prm.nodes);
    let values: Vec<f64> = (0..spec.nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = spec.x(i);
            let rule = &rule;
            (0..spec.np).map(move |j| wigner_with_rule(&prm, rule, x, spec.p(j)))
        })
        .collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("regularized Wigner value {bad}")));
    }
    Ok(PhaseSpaceGrid::from_values(spec, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_epsilon() {
        for e in [0.0, -0.1, 5.5, f64::NAN] {
            assert!(RegularizedStateParams::new(e).is_err());
        }
    }

    #[test]
    fn norm_exponential_case() {
        let p = RegularizedStateParams::new(0.5).unwrap();
        assert!((psi_norm_check(&p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fb_moment_with_offset() {
        let p = RegularizedStateParams::new(0.3).unwrap().with_c0(1.5);
        let v = fb_moment(&p).unwrap();
        assert!((v - (2.25 + 0.6 - 1.0)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn wigner_exponential_closed_form() {
        let p = RegularizedStateParams::new(0.5).unwrap();
        let (x, m) = (1.0f64, 1.2f64);
        let d = 1.0 + 4.0 * m * m;
        let want = (-x).exp() / PI * ((2.0 * m).sin() / (2.0 * m * d) + (2.0 * m).cos() / d);
        let got = wigner_point(&p, x, m).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn wigner_origin_exponential() {
        // W(0, 0) = (1/pi) int e^-y dy
        let p = RegularizedStateParams::new(0.5).unwrap();
        assert!((wigner_point(&p, 0.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-10);
    }
}
