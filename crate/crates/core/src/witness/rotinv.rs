//! Closed forms for phase-averaged (Fock-diagonal) states.

use serde::Serialize;

use crate::weyl::radial_moment;
use crate::{DensityMatrix, Error, Result};

/// Largest off-diagonal density-matrix entry accepted as rotationally invariant.
pub const ROTATION_TOL: f64 = 1e-10;

/// One row of the `f_a` positivity scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaRow {
    pub n: usize,
    pub r2: f64,
    pub r4: f64,
    /// `(4n^2 + 4n + 2) - (2n + 1)^2` in integer arithmetic.
    pub margin_closed: i64,
    /// `<r^4> - <r^2>^2` from Weyl moments.
    pub margin_moments: f64,
}

/// Compares `<r^4>` with `<r^2>^2` for `|0>, ..., |n_max>`.
pub fn fa_scan(n_max: usize) -> Result<Vec<FaRow>> {
    (0..=n_max)
        .map(|n| {
            let rho = DensityMatrix::fock(n);
            let r2 = radial_moment(&rho, 1)?;
            let r4 = radial_moment(&rho, 2)?;
            let k = n as i64;
            Ok(FaRow {
                n,
                r2,
                r4,
                margin_closed: (4 * k * k + 4 * k + 2) - (2 * k + 1) * (2 * k + 1),
                margin_moments: r4 - r2 * r2,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FcMinimum {
    pub c30: f64,
    pub c10: f64,
    pub value: f64,
    /// The quadratic re-evaluated at `(c30, c10)`.
    pub quadratic_check: f64,
}

/// `<f_c^2>` of a rotationally invariant state in terms of radial moments.
pub fn fc_quadratic(r2: f64, r4: f64, r6: f64, c30: f64, c10: f64) -> f64 {
    (5.0 * c30 * c30 + 2.0 * c30 + 1.0) * r6 / 16.0
        + (3.0 * c30 + 1.0) * c10 * r4 / 4.0
        + c10 * c10 * r2 / 2.0
}

/// Minimum of the `f_c` quadratic.
pub fn rotinv_fc_minimum(r2: f64, r4: f64, r6: f64) -> Result<FcMinimum> {
    let den = 10.0 * r6 * r2 - 9.0 * r4 * r4;
    if den.abs() <= 1e-12 {
        return Err(Error::Degenerate(den));
    }
    let c30 = (3.0 * r4 * r4 - 2.0 * r6 * r2) / den;
    let c10 = -r4 * r6 / den;
    let value = r6 * (r6 * r2 - r4 * r4) / (2.0 * den);
    Ok(FcMinimum {
        c30,
        c10,
        value,
        quadratic_check: fc_quadratic(r2, r4, r6, c30, c10),
    })
}

fn check_rotation(rho: &DensityMatrix) -> Result<()> {
    let off = rho.max_off_diagonal();
    if off > ROTATION_TOL {
        return Err(Error::NotRotationallyInvariant(off));
    }
    Ok(())
}

/// `f_c` minimum using the radial moments of `rho`.
pub fn rotinv_fc_for_state(rho: &DensityMatrix) -> Result<FcMinimum> {
    check_rotation(rho)?;
    rotinv_fc_minimum(
        radial_moment(rho, 1)?,
        radial_moment(rho, 2)?,
        radial_moment(rho, 3)?,
    )
}

/// `<f_d^2> = a c20^2 + b c0^2 + c c20 c0 + d c20 + e c0 + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdQuadratic {
    pub c20_sq: f64,
    pub c0_sq: f64,
    pub cross: f64,
    pub c20: f64,
    pub c0: f64,
    pub constant: f64,
}

impl FdQuadratic {
    pub fn from_radial(r2: f64, r4: f64, r6: f64, r8: f64) -> Self {
        Self {
            c20_sq: r4,
            c0_sq: 1.0,
            cross: 2.0 * r2,
            c20: 2.0 * r6,
            c0: 2.0 * r4,
            constant: r8,
        }
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [self.c20_sq, self.c0_sq, self.cross, self.c20, self.c0, self.constant]
    }

    pub fn eval(&self, c20: f64, c0: f64) -> f64 {
        self.c20_sq * c20 * c20
            + self.c0_sq * c0 * c0
            + self.cross * c20 * c0
            + self.c20 * c20
            + self.c0 * c0
            + self.constant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdMinimum {
    pub c20: f64,
    pub c0: f64,
    pub value: f64,
    pub quadratic: FdQuadratic,
}

/// Stationary point of the `f_d` quadratic.
pub fn rotinv_fd_minimum(rho: &DensityMatrix) -> Result<FdMinimum> {
    check_rotation(rho)?;
    let r: Vec<f64> = (1..=4).map(|j| radial_moment(rho, j)).collect::<Result<_>>()?;
    let q = FdQuadratic::from_radial(r[0], r[1], r[2], r[3]);
    // gradient: [[2a, c], [c, 2b]] (c20, c0) = -(d, e)
    let (h11, h12, h22) = (2.0 * q.c20_sq, q.cross, 2.0 * q.c0_sq);
    let det = h11 * h22 - h12 * h12;
    if det.abs() <= 1e-12 * h11.abs().max(1.0) {
        return Err(Error::Degenerate(det));
    }
    let c20 = (-q.c20 * h22 + q.c0 * h12) / det;
    let c0 = (-q.c0 * h11 + q.c20 * h12) / det;
    Ok(FdMinimum {
        c20,
        c0,
        value: q.eval(c20, c0),
        quadratic: q,
    })
}
