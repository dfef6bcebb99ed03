//! Gauss–Legendre rules, composite panels and endpoint-singular integrals.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }

    /// Mapped nodes and weights for `[a, b]`, appended to `out`.
    pub fn push_mapped(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        out.extend(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(&t, &w)| (mid + half * t, w * half)),
        );
    }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal panels on `[a, b]`.
pub fn composite<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}

/// Geometrically graded panels `[0, L r^K], [L r^K, L r^(K-1)], ..., [L r, L]`.
fn graded_panels(length: f64, ratio: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    for k in (0..levels).rev() {
        edges.push(length * ratio.powi(k as i32 + 1));
    }
    // the outermost panel carries most of the mass; split it further
    let lo = length * ratio;
    for k in 1..=4 {
        edges.push(lo + (length - lo) * k as f64 / 4.0);
    }
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Integrates `t^alpha * g(t)` over `[0, length]` for `alpha > -1` and smooth `g`.
///
/// The substitution `t = u^(1/(alpha+1))` removes the power singularity; the
/// remaining weak non-smoothness of `g(u^q)` at `u = 0` is absorbed by a
/// geometrically graded Gauss–Legendre mesh.
pub fn power_endpoint<F: FnMut(f64) -> f64>(
    alpha: f64,
    length: f64,
    rule: &GaussLegendre,
    mut g: F,
) -> f64 {
    debug_assert!(alpha > -1.0);
    if length <= 0.0 {
        return 0.0;
    }
    let beta = alpha + 1.0;
    let q = 1.0 / beta;
    let upper = length.powf(beta);
    let levels = 14;
    graded_panels(upper, 0.2, levels)
        .into_iter()
        .map(|(lo, hi)| rule.integrate(lo, hi, |u| g(u.powf(q))) / beta)
        .sum()
}
