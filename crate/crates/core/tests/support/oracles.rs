//! Independent reference computations for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Nelder–Mead simplex minimiser in two variables.
pub fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, start: [f64; 2], step: f64, tol: f64) -> ([f64; 2], f64) {
    let mut s = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut v = s.map(|p| f(p));
    for _ in 0..20_000 {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        s = idx.map(|i| s[i]);
        v = idx.map(|i| v[i]);
        if (v[2] - v[0]).abs() <= tol * (1.0 + v[0].abs()) {
            let size = ((s[2][0] - s[0][0]).abs()).max((s[2][1] - s[0][1]).abs());
            if size < 1e-9 {
                break;
            }
        }
        let c = [(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0];
        let at = |t: f64| [c[0] + t * (s[2][0] - c[0]), c[1] + t * (s[2][1] - c[1])];
        let r = at(-1.0);
        let fr = f(r);
        if fr < v[0] {
            let e = at(-2.0);
            let fe = f(e);
            if fe < fr {
                s[2] = e;
                v[2] = fe;
            } else {
                s[2] = r;
                v[2] = fr;
            }
        } else if fr < v[1] {
            s[2] = r;
            v[2] = fr;
        } else {
            let k = if fr < v[2] { at(-0.5) } else { at(0.5) };
            let fk = f(k);
            if fk < v[2].min(fr) {
                s[2] = k;
                v[2] = fk;
            } else {
                for i in 1..3 {
                    s[i] = [(s[i][0] + s[0][0]) / 2.0, (s[i][1] + s[0][1]) / 2.0];
                    v[i] = f(s[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    (s[best], v[best])
}

fn binom_i(n: u32, k: u32) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `<r^(2k)>_W` of `|n>` from `W_n = (-1)^n e^(-r^2) L_n(2 r^2) / pi`, integrated
/// term by term in exact integer arithmetic.
pub fn fock_radial_moment(n: u32, k: u32) -> f64 {
    let mut acc: i128 = 0;
    for j in 0..=n {
        // int_0^inf u^(k+j) e^-u du / j! = (k+j)! / j!
        let ratio: i128 = ((j + 1)..=(j + k)).map(|v| v as i128).product();
        let term = binom_i(n, j) * (1i128 << j) * ratio;
        acc += if j % 2 == 0 { term } else { -term };
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    (sign * acc) as f64
}

/// Wigner function of `|n>` at radius squared `r2`.
pub fn fock_wigner(n: u32, r2: f64) -> f64 {
    // Laguerre recurrence
    let y = 2.0 * r2;
    let (mut l0, mut l1) = (1.0, 1.0 - y);
    let l = match n {
        0 => l0,
        _ => {
            for k in 1..n {
                let k = k as f64;
                let l2 = ((2.0 * k + 1.0 - y) * l1 - k * l0) / (k + 1.0);
                l0 = l1;
                l1 = l2;
            }
            l1
        }
    };
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * (-r2).exp() * l / PI
}

/// Explicit Hermite functions for `n <= 3`.
pub fn hermite_function(n: u32, x: f64) -> f64 {
    let h = match n {
        0 => 1.0,
        1 => 2.0 * x,
        2 => 4.0 * x * x - 2.0,
        3 => 8.0 * x * x * x - 12.0 * x,
        _ => panic!("explicit form only for n <= 3"),
    };
    let fact = [1.0, 1.0, 2.0, 6.0][n as usize];
    h * (-x * x / 2.0).exp() / (2f64.powi(n as i32) * fact * PI.sqrt()).sqrt()
}

/// Number of eigenvalues of the symmetric matrix `a` below `t`, from the
/// inertia of `A - tI` (Sylvester), via unpivoted LDL^T.
pub fn count_below(a: &[Vec<f64>], t: f64) -> usize {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= t;
    }
    let mut neg = 0;
    for k in 0..n {
        let mut d = m[k][k];
        if d == 0.0 {
            d = 1e-300;
        }
        if d < 0.0 {
            neg += 1;
        }
        for i in (k + 1)..n {
            let f = m[i][k] / d;
            for j in (k + 1)..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    neg
}

/// Smallest eigenvalue by bisection on the eigenvalue count.
pub fn smallest_eigenvalue(a: &[Vec<f64>]) -> f64 {
    let bound = a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max) + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(a, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 * bound {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `E[z^k]` for a centred Gaussian of variance `var`.
pub fn gaussian_moment(k: u32, var: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let dfact: f64 = (1..k).step_by(2).map(|v| v as f64).product();
    dfact * var.powi(k as i32 / 2)
}

/// `a|psi>` on real amplitude vectors (the last level is dropped).
pub fn lower(psi: &[f64]) -> Vec<f64> {
    (0..psi.len())
        .map(|n| if n + 1 < psi.len() { ((n + 1) as f64).sqrt() * psi[n + 1] } else { 0.0 })
        .collect()
}

/// `a^dag|psi>`, truncated to the same length.
pub fn raise(psi: &[f64]) -> Vec<f64> {
    (0..psi.len())
        .map(|n| if n > 0 { (n as f64).sqrt() * psi[n - 1] } else { 0.0 })
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `<psi| x^2 |psi>` with `x = (a + a^dag)/sqrt 2`; `psi` padded by the caller.
pub fn x_squared(psi: &[f64]) -> f64 {
    let xp: Vec<f64> = lower(psi).iter().zip(raise(psi)).map(|(a, b)| (a + b) / 2f64.sqrt()).collect();
    dot(&xp, &xp)
}
