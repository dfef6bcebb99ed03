//! Cyclic Jacobi eigensolver for small real symmetric matrices.
//!
//! Hermitian matrices are handled through the real embedding
//! `[[Re H, -Im H], [Im H, Re H]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled.

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Largest matrix accepted by the solver.
pub const MAX_SIZE: usize = 256;

/// Eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

/// Full decomposition, eigenvalues ascending, eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Smallest eigenvalue with its unit eigenvector.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub degenerate: bool,
    /// `||M v - lambda v||`.
    pub residual: f64,
}

/// Smallest eigenpair of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigenPair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub degenerate: bool,
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(n, m.ncols()));
    }
    if n == 0 || n > MAX_SIZE {
        return Err(Error::InvalidArgument(format!(
            "eigensolver size {n} outside 1..={MAX_SIZE}"
        )));
    }
    let scale = m.amax().max(1.0);
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            dev = dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if dev > 1e-12 * scale {
        return Err(Error::NotSymmetric(dev));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigensolver input".into()));
    }
    Ok(())
}

/// Diagonalises a real symmetric matrix with cyclic Jacobi rotations.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    check_symmetric(m)?;
    let n = m.nrows();
    let mut a = m.clone();
    // symmetrise exactly so rotations act on a truly symmetric array
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let mut converged = n == 1;
    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].abs())
            .sum();
        if off == 0.0 {
            converged = true;
            break;
        }
        let thresh = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let g = 100.0 * a[(p, q)].abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[(p, q)] = 0.0;
                    continue;
                }
                if a[(p, q)].abs() <= thresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    a[(p, q)] / h
                } else {
                    let theta = 0.5 * h / a[(p, q)];
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * a[(p, q)];
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[(p, q)] = 0.0;
                for j in 0..p {
                    rotate(&mut a, j, p, j, q, s, tau);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, p, j, j, q, s, tau);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, p, j, q, j, s, tau);
                }
                for j in 0..n {
                    rotate(&mut v, j, p, j, q, s, tau);
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "Jacobi eigensolver",
            estimate: (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].abs())
                .sum(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

#[inline]
fn rotate(a: &mut DMatrix<f64>, i: usize, j: usize, k: usize, l: usize, s: f64, tau: f64) {
    let g = a[(i, j)];
    let h = a[(k, l)];
    a[(i, j)] = g - s * (h + g * tau);
    a[(k, l)] = h + s * (g - h * tau);
}

/// Flips the sign so the largest-magnitude component is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Smallest eigenvalue and its eigenvector, largest component positive.
pub fn min_eigenpair(m: &DMatrix<f64>) -> Result<EigenPair> {
    let eig = jacobi_eigen(m)?;
    let mut vector: Vec<f64> = eig.vectors.column(0).iter().copied().collect();
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    vector.iter_mut().for_each(|x| *x /= norm);
    fix_sign(&mut vector);
    let value = eig.values[0];
    let degenerate = eig.values.len() > 1 && eig.values[1] - eig.values[0] < DEGENERACY_GAP;
    let residual = residual(m, value, &vector);
    Ok(EigenPair {
        value,
        vector,
        degenerate,
        residual,
    })
}

fn residual(m: &DMatrix<f64>, value: f64, vector: &[f64]) -> f64 {
    let n = vector.len();
    (0..n)
        .map(|i| {
            let mv: f64 = (0..n).map(|j| m[(i, j)] * vector[j]).sum();
            (mv - value * vector[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Smallest eigenpair of a Hermitian matrix.
///
/// Real inputs (imaginary parts at most `1e-14` times the matrix scale) are
/// solved directly; otherwise the real embedding is used. The returned vector
/// has its largest component real and positive.
pub fn min_eigenpair_hermitian(h: &DMatrix<C64>) -> Result<HermitianEigenPair> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::DimensionMismatch(n, h.ncols()));
    }
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let max_im = h.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_im <= 1e-14 * scale {
        let re = h.map(|z| z.re);
        let pair = min_eigenpair(&re)?;
        return Ok(HermitianEigenPair {
            value: pair.value,
            vector: pair.vector.iter().map(|&x| C64::new(x, 0.0)).collect(),
            degenerate: pair.degenerate,
        });
    }
    let emb = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = jacobi_eigen(&emb)?;
    let col = eig.vectors.column(0);
    let mut vector: Vec<C64> = (0..n).map(|i| C64::new(col[i], col[i + n])).collect();
    let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut best = 0;
    for (i, z) in vector.iter().enumerate() {
        if z.norm() > vector[best].norm() {
            best = i;
        }
    }
    let phase = vector[best].conj() / vector[best].norm();
    vector.iter_mut().for_each(|z| *z = *z * phase / norm);
    vector[best].im = 0.0;
    // every eigenvalue of the embedding appears twice
    let degenerate = eig.values.len() > 2 && eig.values[2] - eig.values[0] < DEGENERACY_GAP;
    Ok(HermitianEigenPair {
        value: eig.values[0],
        vector,
        degenerate,
    })
}
