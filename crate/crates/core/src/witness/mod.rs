//! Polynomial negativity witnesses.
//!
//! For any probability density `<f^2> >= 0`. Evaluated against the Wigner
//! function, `<f^2>_W = sum c_nm c_n'm' <x^(n+n') p^(m+m')>_W`, and a negative
//! value certifies that `W` is somewhere negative.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::eigen::min_eigenpair_hermitian;
use crate::fock::padded_dim;
use crate::weyl::{MomentEvaluator, WeylCache};
use crate::{DensityMatrix, Error, FockState, Result, C64};

mod fb;
mod rotinv;

pub use fb::{
    fb_determinant_exact, fb_matrix, fb_quadratic_form, fb_search, general_order2_search,
    necessity_scan, default_c0_grid, NecessityReport, Order2Family, Order2SearchConfig,
    Order2SearchResult, TridiagonalWitnessMatrix,
};
pub use rotinv::{
    fa_scan, fc_quadratic, rotinv_fc_minimum, rotinv_fc_for_state, rotinv_fd_minimum, FaRow,
    FcMinimum, FdMinimum, FdQuadratic,
};

/// Values below `-VIOLATION_TOL` count as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Real polynomial `f(x, p) = sum c_nm x^n p^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialWitness {
    coeffs: BTreeMap<(usize, usize), f64>,
    order: usize,
}

impl PolynomialWitness {
    /// Drops zero coefficients; rejects the zero polynomial.
    pub fn new(coeffs: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient {c} for {k:?}")));
            }
            *map.entry(k).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        let order = map
            .keys()
            .map(|(n, m)| n + m)
            .max()
            .ok_or(Error::ZeroPolynomial)?;
        Ok(Self { coeffs: map, order })
    }

    /// `c00 + c10 x + c01 p`.
    pub fn linear(c00: f64, c10: f64, c01: f64) -> Result<Self> {
        Self::new([((0, 0), c00), ((1, 0), c10), ((0, 1), c01)])
    }

    /// `x^2 + p^2 + c0`.
    pub fn fa(c0: f64) -> Self {
        Self::new([((2, 0), 1.0), ((0, 2), 1.0), ((0, 0), c0)]).expect("non-zero")
    }

    /// `2 x p + c0`.
    pub fn fb(c0: f64) -> Self {
        Self::new([((1, 1), 2.0), ((0, 0), c0)]).expect("non-zero")
    }

    /// `x (x^2 + p^2) + (c30 - 1) x^3 + c10 x`.
    pub fn fc(c30: f64, c10: f64) -> Self {
        Self::new([((3, 0), c30), ((1, 2), 1.0), ((1, 0), c10)]).expect("non-zero")
    }

    /// `r^4 + c20 r^2 + c0` with `r^2 = x^2 + p^2`.
    pub fn fd(c20: f64, c0: f64) -> Self {
        Self::new([
            ((4, 0), 1.0),
            ((2, 2), 2.0),
            ((0, 4), 1.0),
            ((2, 0), c20),
            ((0, 2), c20),
            ((0, 0), c0),
        ])
        .expect("non-zero")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize, m: usize) -> f64 {
        self.coeffs.get(&(n, m)).copied().unwrap_or(0.0)
    }

    /// Polynomial product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (&(n, m), &a) in &self.coeffs {
            for (&(k, l), &b) in &other.coeffs {
                *out.entry((n + k, m + l)).or_insert(0.0) += a * b;
            }
        }
        Self::new(out)
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("square of a non-zero polynomial is non-zero")
    }

    /// `f(T(x, p))` for an affine phase-space map.
    pub fn transformed(&self, t: &PhaseSpaceTransform) -> Result<Self> {
        let [[a, b], [c, d]] = t.linear();
        let xs = Self::new([((1, 0), a), ((0, 1), b), ((0, 0), t.shift.0)])?;
        let ps = Self::new([((1, 0), c), ((0, 1), d), ((0, 0), t.shift.1)])?;
        let one = Self::new([((0, 0), 1.0)])?;
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (&(n, m), &coef) in &self.coeffs {
            let mut term = one.clone();
            for _ in 0..n {
                term = term.mul(&xs)?;
            }
            for _ in 0..m {
                term = term.mul(&ps)?;
            }
            for (&k, &v) in &term.coeffs {
                *acc.entry(k).or_insert(0.0) += coef * v;
            }
        }
        Self::new(acc)
    }

    /// `W(g)` for this polynomial `g` in dimension `cache.dim()`.
    pub fn weyl_matrix(&self, cache: &mut WeylCache) -> DMatrix<C64> {
        let d = cache.dim();
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for (&(n, m), &c) in &self.coeffs {
            acc += cache.weyl(n, m) * C64::new(c, 0.0);
        }
        acc
    }
}

/// Rotation by `angle`, then squeezing `(g x, p / g)`, then shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceTransform {
    pub angle: f64,
    pub squeeze: f64,
    pub shift: (f64, f64),
}

impl Default for PhaseSpaceTransform {
    fn default() -> Self {
        Self {
            angle: 0.0,
            squeeze: 1.0,
            shift: (0.0, 0.0),
        }
    }
}

impl PhaseSpaceTransform {
    fn linear(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        let g = self.squeeze;
        // x' = g (x cos + p sin), p' = (p cos - x sin) / g
        [[g * c, g * s], [-s / g, c / g]]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::default()
    }
}

/// `[[n, m, c], ...]` wire form.
impl Serialize for PolynomialWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            coeffs: Vec<(usize, usize, f64)>,
        }
        Wire {
            coeffs: self.coeffs.iter().map(|(&(n, m), &c)| (n, m, c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolynomialWitness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            coeffs: Vec<(usize, usize, f64)>,
        }
        let w = Wire::deserialize(d)?;
        PolynomialWitness::new(w.coeffs.into_iter().map(|(n, m, c)| ((n, m), c)))
            .map_err(serde::de::Error::custom)
    }
}

/// `<f^2>_W` for a state.
pub fn witness_value(rho: &DensityMatrix, f: &PolynomialWitness) -> Result<f64> {
    let sq = f.square();
    let mut eval = MomentEvaluator::new(rho, sq.order())?;
    let mut acc = 0.0;
    for (&(n, m), &c) in sq.coeffs() {
        acc += c * eval.moment(n, m)?;
    }
    Ok(acc)
}

/// `<f^2>_W` from a table of moments.
pub fn witness_value_from_moments(
    table: &crate::MomentTable,
    f: &PolynomialWitness,
) -> Result<f64> {
    let sq = f.square();
    if sq.order() > table.max_order {
        return Err(Error::InvalidArgument(format!(
            "witness needs moments to order {}, table has {}",
            sq.order(),
            table.max_order
        )));
    }
    Ok(sq.coeffs().iter().map(|(&(n, m), &c)| c * table.get(n, m)).sum())
}

/// Matrix `<b_i| W(f^2) |b_j>` on the listed Fock levels.
pub fn quadratic_form(f: &PolynomialWitness, basis: &[usize]) -> Result<DMatrix<C64>> {
    let top = basis.iter().copied().max().ok_or_else(|| {
        Error::InvalidArgument("empty basis for the quadratic form".into())
    })?;
    let sq = f.square();
    let mut cache = WeylCache::new(padded_dim(top, sq.order()))?;
    let full = sq.weyl_matrix(&mut cache);
    Ok(restrict(&full, basis))
}

pub(crate) fn restrict(full: &DMatrix<C64>, basis: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(basis.len(), basis.len(), |i, j| full[(basis[i], basis[j])])
}

/// Outcome of a witness evaluation or minimisation.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub witness: PolynomialWitness,
    pub state: ReportState,
    /// `<f^2>_W` recomputed from the state's Weyl moments.
    pub value: f64,
    /// Smallest eigenvalue of the quadratic form when a minimisation ran.
    pub min_eigenvalue: Option<f64>,
    /// Minimising coefficients in `basis` (real parts when the form is complex).
    pub eigenvector: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvector_im: Option<Vec<f64>>,
    pub basis: Vec<usize>,
    pub violated: bool,
    pub degenerate: bool,
}

/// State attached to a report.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum ReportState {
    Pure(FockState),
    Mixed(DensityMatrix),
}

impl ReportState {
    pub fn density_matrix(&self) -> DensityMatrix {
        match self {
            Self::Pure(s) => DensityMatrix::pure(s),
            Self::Mixed(r) => r.clone(),
        }
    }
}

impl WitnessReport {
    /// Plain evaluation of `<f^2>_W` on a given state.
    pub fn evaluate(rho: &DensityMatrix, f: &PolynomialWitness) -> Result<Self> {
        let value = witness_value(rho, f)?;
        Ok(Self {
            witness: f.clone(),
            state: ReportState::Mixed(rho.clone()),
            value,
            min_eigenvalue: None,
            eigenvector: Vec::new(),
            eigenvector_im: None,
            basis: Vec::new(),
            violated: value < -VIOLATION_TOL,
            degenerate: false,
        })
    }

    /// Minimises `<f^2>_W` over pure states spanned by `basis`.
    pub fn minimize(f: &PolynomialWitness, basis: &[usize]) -> Result<Self> {
        let form = quadratic_form(f, basis)?;
        Self::from_form(f, basis, &form)
    }

    pub(crate) fn from_form(
        f: &PolynomialWitness,
        basis: &[usize],
        form: &DMatrix<C64>,
    ) -> Result<Self> {
        let pair = min_eigenpair_hermitian(form)?;
        let top = basis.iter().copied().max().unwrap_or(0);
        let mut amps = vec![C64::new(0.0, 0.0); top + 1];
        for (&n, &v) in basis.iter().zip(&pair.vector) {
            amps[n] = v;
        }
        let state = FockState::new(amps)?;
        let value = witness_value(&DensityMatrix::pure(&state), f)?;
        let complex = pair.vector.iter().any(|z| z.im != 0.0);
        Ok(Self {
            witness: f.clone(),
            state: ReportState::Pure(state),
            value,
            min_eigenvalue: Some(pair.value),
            eigenvector: pair.vector.iter().map(|z| z.re).collect(),
            eigenvector_im: complex.then(|| pair.vector.iter().map(|z| z.im).collect()),
            basis: basis.to_vec(),
            violated: value < -VIOLATION_TOL,
            degenerate: pair.degenerate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_zero() {
        assert_eq!(PolynomialWitness::fb(0.0).order(), 2);
        assert_eq!(PolynomialWitness::fd(-12.0, 26.0).order(), 4);
        assert!(matches!(
            PolynomialWitness::new([((1, 1), 0.0)]),
            Err(Error::ZeroPolynomial)
        ));
        let f = PolynomialWitness::new([((3, 0), 0.0), ((1, 0), 2.0)]).unwrap();
        assert_eq!(f.order(), 1);
    }

    #[test]
    fn fc_expansion() {
        // x (x^2 + p^2) + (c30 - 1) x^3 = c30 x^3 + x p^2
        let f = PolynomialWitness::fc(0.3, -0.5);
        assert_eq!(f.coeff(3, 0), 0.3);
        assert_eq!(f.coeff(1, 2), 1.0);
        assert_eq!(f.coeff(1, 0), -0.5);
    }

    #[test]
    fn fd_vs_one_photon() {
        let rho = DensityMatrix::fock(1);
        let v = witness_value(&rho, &PolynomialWitness::fd(0.0, 0.0)).unwrap();
        assert!((v - 216.0).abs() < 1e-10);
        let v = witness_value(&rho, &PolynomialWitness::fd(-12.0, 26.0)).unwrap();
        assert!((v + 28.0).abs() < 1e-9);
    }

    #[test]
    fn linear_witness_is_non_negative() {
        for n in 0..6 {
            let rho = DensityMatrix::fock(n);
            let v = witness_value(&rho, &PolynomialWitness::linear(0.0, 1.0, 1.0).unwrap()).unwrap();
            assert!((v - (2 * n + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_of_fb() {
        // rotating 2xp by pi/4 gives p^2 - x^2
        let t = PhaseSpaceTransform {
            angle: std::f64::consts::FRAC_PI_4,
            ..Default::default()
        };
        let f = PolynomialWitness::fb(0.0).transformed(&t).unwrap();
        assert!((f.coeff(2, 0) + 1.0).abs() < 1e-15);
        assert!((f.coeff(0, 2) - 1.0).abs() < 1e-15);
        assert!(f.coeff(1, 1).abs() < 1e-15);
    }

    #[test]
    fn squeezing_leaves_fb_invariant() {
        let t = PhaseSpaceTransform {
            squeeze: 1.7,
            ..Default::default()
        };
        let f = PolynomialWitness::fb(0.4).transformed(&t).unwrap();
        assert!((f.coeff(1, 1) - 2.0).abs() < 1e-14);
        assert!((f.coeff(0, 0) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn json_shape() {
        let js = serde_json::to_string(&PolynomialWitness::fb(1.5)).unwrap();
        assert_eq!(js, r#"{"coeffs":[[0,0,1.5],[1,1,2.0]]}"#);
        let back: PolynomialWitness = serde_json::from_str(&js).unwrap();
        assert_eq!(back, PolynomialWitness::fb(1.5));
    }
}
