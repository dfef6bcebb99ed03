//! Truncated Fock-space states and operators.
//!
//! Operators are built naively in a `D`-dimensional basis, so products of
//! truncated matrices are wrong in their last rows. Every moment computation
//! in the crate therefore pads the basis to `n_max + k + 2`, where `n_max` is
//! the highest occupied level and `k` the polynomial order (see
//! [`padded_dim`]).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::{Error, Result, C64};

const NORM_TOL: f64 = 1e-12;

/// Truncation dimension that keeps order-`order` moments of a state supported
/// on `0..=support` exact.
pub fn padded_dim(support: usize, order: usize) -> usize {
    support + order + 2
}

/// Pure state `sum_n v_n |n>` in a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: Vec<C64>,
}

impl FockState {
    /// Normalised state from raw amplitudes.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let mut state = Self::unnormalized(amplitudes)?;
        let norm = state.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        state.amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(state)
    }

    /// Keeps the amplitudes as given; for intermediate algebra.
    pub fn unnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("Fock dimension must be >= 1".into()));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// The number state `|n>` in dimension `n + 1`.
    pub fn basis(n: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); n + 1];
        amplitudes[n] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Normalised superposition of the listed levels.
    pub fn superposition(terms: &[(usize, C64)]) -> Result<Self> {
        let dim = terms.iter().map(|(n, _)| n + 1).max().unwrap_or(0);
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        for &(n, a) in terms {
            amplitudes[n] += a;
        }
        Self::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitude of level `n`, zero beyond the truncation.
    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Highest level with a non-zero amplitude.
    pub fn support(&self) -> usize {
        self.amplitudes
            .iter()
            .rposition(|z| *z != C64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    /// Same state in dimension `dim` (zero padded or truncated).
    pub fn resized(&self, dim: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(dim.max(1), C64::new(0.0, 0.0));
        Self { amplitudes }
    }

    pub fn to_vector(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_column_slice(&self.amplitudes)
    }

    /// Serialises as `[[re, im], ...]`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for FockState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.amplitudes.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        let amplitudes = pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        FockState::unnormalized(amplitudes).map_err(serde::de::Error::custom)
    }
}

/// Hermitian, positive, unit-trace matrix in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates hermiticity, trace and positivity.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || n != entries.ncols() {
            return Err(Error::InvalidDensityMatrix(format!(
                "shape {}x{}",
                n,
                entries.ncols()
            )));
        }
        let herm = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (entries[(i, j)] - entries[(j, i)].conj()).norm())
            .fold(0.0, f64::max);
        if herm > NORM_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian ({herm:e})"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let rho = Self { entries };
        let min_eig = eigen::min_eigenpair_hermitian(&rho.entries)?.value;
        if min_eig < -1e-10 {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    /// `|psi><psi|`.
    pub fn pure(state: &FockState) -> Self {
        let v = state.to_vector();
        let norm2 = state.norm().powi(2);
        Self {
            entries: (&v * v.adjoint()) / C64::new(norm2, 0.0),
        }
    }

    /// `|n><n|`.
    pub fn fock(n: usize) -> Self {
        Self::pure(&FockState::basis(n))
    }

    /// `sum_i p_i |psi_i><psi_i|` with weights renormalised to one.
    pub fn mixture(components: &[(f64, FockState)]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("empty mixture".into()));
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if components.iter().any(|(p, _)| *p < 0.0 || !p.is_finite()) || total <= 0.0 {
            return Err(Error::InvalidArgument("mixture weights must be >= 0".into()));
        }
        let dim = components.iter().map(|(_, s)| s.dim()).max().unwrap_or(1);
        let mut entries = DMatrix::<C64>::zeros(dim, dim);
        for (p, s) in components {
            let rho = Self::pure(&s.resized(dim));
            entries += rho.entries * C64::new(p / total, 0.0);
        }
        Self::new(entries)
    }

    /// Diagonal state `sum_n p_n |n><n|`.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let comps: Vec<(f64, FockState)> = probabilities
            .iter()
            .enumerate()
            .map(|(n, &p)| (p, FockState::basis(n)))
            .collect();
        Self::mixture(&comps)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// Highest level `n` with a non-zero row or column.
    pub fn support(&self) -> usize {
        let n = self.dim();
        (0..n)
            .rev()
            .find(|&i| (0..n).any(|j| self.entries[(i, j)] != C64::new(0.0, 0.0)))
            .unwrap_or(0)
    }

    /// Same state embedded in (or cut to) dimension `dim`.
    pub fn resized(&self, dim: usize) -> Self {
        let n = self.dim();
        let entries = DMatrix::from_fn(dim, dim, |i, j| {
            if i < n && j < n {
                self.entries[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self { entries }
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[(i, j)].norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows: Vec<Vec<[f64; 2]>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = self.entries[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("density matrix must be square"));
        }
        let entries = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
        DensityMatrix::new(entries).map_err(serde::de::Error::custom)
    }
}

/// Operator label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorKind {
    X,
    P,
    A,
    Adag,
    N,
    /// `omega * a^dagger a` with hbar = 1.
    Hamiltonian,
    Custom(String),
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Self::X),
            "p" => Ok(Self::P),
            "a" => Ok(Self::A),
            "adag" => Ok(Self::Adag),
            "n" => Ok(Self::N),
            "h" | "hamiltonian" => Ok(Self::Hamiltonian),
            other => Err(Error::UnknownOperator(other.to_string())),
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::X => f.write_str("x"),
            Self::P => f.write_str("p"),
            Self::A => f.write_str("a"),
            Self::Adag => f.write_str("adag"),
            Self::N => f.write_str("n"),
            Self::Hamiltonian => f.write_str("h"),
            Self::Custom(s) => f.write_str(s),
        }
    }
}

/// Operator matrix in the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub entries: DMatrix<C64>,
    pub label: OperatorKind,
    /// Oscillator frequency; only the Hamiltonian depends on it.
    pub omega: f64,
}

impl OperatorMatrix {
    pub fn custom(entries: DMatrix<C64>, label: &str) -> Self {
        Self {
            entries,
            label: OperatorKind::Custom(label.to_string()),
            omega: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self::custom(self.entries.adjoint(), &format!("({})^dag", self.label))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.entries - self.entries.adjoint())
            .iter()
            .all(|z| z.norm() <= tol)
    }

    /// Applies the operator to a state of the same dimension.
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), state.dim()));
        }
        let out = &self.entries * state.to_vector();
        FockState::unnormalized(out.iter().copied().collect())
    }
}

fn lowering(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Truncated matrix of a ladder, quadrature or number operator.
pub fn build_operator(kind: OperatorKind, dim: usize) -> Result<OperatorMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument("operator dimension must be >= 1".into()));
    }
    let a = lowering(dim);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let entries = match &kind {
        OperatorKind::A => a,
        OperatorKind::Adag => a.adjoint(),
        OperatorKind::X => (&a + a.adjoint()) * C64::new(s, 0.0),
        OperatorKind::P => (a.adjoint() - &a) * C64::new(0.0, s),
        OperatorKind::N | OperatorKind::Hamiltonian => {
            DMatrix::from_fn(dim, dim, |i, j| {
                C64::new(if i == j { i as f64 } else { 0.0 }, 0.0)
            })
        }
        OperatorKind::Custom(tag) => return Err(Error::UnknownOperator(tag.clone())),
    };
    Ok(OperatorMatrix {
        entries,
        label: kind,
        omega: 1.0,
    })
}

/// Like [`build_operator`] but from a textual tag (`x`, `p`, `a`, `adag`, `n`, `h`).
pub fn build_operator_by_tag(tag: &str, dim: usize) -> Result<OperatorMatrix> {
    build_operator(tag.parse()?, dim)
}

/// `omega * n` as a Hamiltonian.
pub fn hamiltonian(omega: f64, dim: usize) -> Result<OperatorMatrix> {
    let mut h = build_operator(OperatorKind::Hamiltonian, dim)?;
    h.entries *= C64::new(omega, 0.0);
    h.omega = omega;
    Ok(h)
}

/// `Tr(op rho)`.
pub fn expectation(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<C64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), op.dim()));
    }
    Ok(trace_product(&op.entries, rho.entries()))
}

/// Real expectation of a Hermitian operator; errors if the imaginary part
/// exceeds `1e-10` (relative to the magnitude for large values).
pub fn expectation_real(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<f64> {
    real_part_checked(expectation(rho, op)?)
}

pub(crate) fn real_part_checked(z: C64) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite("expectation value".into()));
    }
    if z.im.abs() > 1e-10 * z.re.abs().max(1.0) {
        return Err(Error::NonReal(z.im));
    }
    Ok(z.re)
}

/// `Tr(a b)` without forming the product.
pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Sublattice `{offset, offset + spacing, ...}` of Fock levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub offset: usize,
    pub spacing: usize,
}

impl Lattice {
    pub fn new(offset: usize, spacing: usize) -> Result<Self> {
        if spacing == 0 || offset >= spacing {
            return Err(Error::InvalidArgument(format!(
                "lattice needs 0 <= offset < spacing (got {offset}, {spacing})"
            )));
        }
        Ok(Self { offset, spacing })
    }

    /// First `levels` members.
    pub fn levels(&self, levels: usize) -> Vec<usize> {
        (0..levels).map(|k| self.offset + k * self.spacing).collect()
    }

    pub fn contains(&self, n: usize) -> bool {
        n % self.spacing == self.offset
    }
}

/// Keeps only levels `n = offset (mod spacing)` and renormalises.
pub fn project_lattice(state: &FockState, offset: usize, spacing: usize) -> Result<FockState> {
    let lattice = Lattice::new(offset, spacing)?;
    let amplitudes: Vec<C64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, &z)| if lattice.contains(n) { z } else { C64::new(0.0, 0.0) })
        .collect();
    FockState::new(amplitudes).map_err(|_| Error::EmptyProjection { offset, spacing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn lowering_operator_dim_two() {
        let a = build_operator(OperatorKind::A, 2).unwrap();
        assert_eq!(a.entries[(0, 1)], c(1.0));
        assert_eq!(a.entries.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn position_operator_dim_two() {
        let x = build_operator(OperatorKind::X, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((x.entries[(0, 1)] - c(s)).norm() < 1e-15);
        assert!((x.entries[(1, 0)] - c(s)).norm() < 1e-15);
        assert_eq!(x.entries[(0, 0)], c(0.0));
    }

    #[test]
    fn number_operator() {
        let n = build_operator(OperatorKind::N, 4).unwrap();
        for i in 0..4 {
            assert_eq!(n.entries[(i, i)], c(i as f64));
        }
    }

    #[test]
    fn unknown_tag() {
        assert!(matches!(
            build_operator_by_tag("q", 3),
            Err(Error::UnknownOperator(_))
        ));
        assert!(build_operator(OperatorKind::X, 0).is_err());
    }

    #[test]
    fn quadratures_hermitian() {
        for d in 1..8 {
            assert!(build_operator(OperatorKind::X, d).unwrap().is_hermitian(0.0));
            assert!(build_operator(OperatorKind::P, d).unwrap().is_hermitian(0.0));
        }
    }

    #[test]
    fn expectations() {
        let rho1 = DensityMatrix::fock(1);
        let n = build_operator(OperatorKind::N, 2).unwrap();
        assert!((expectation(&rho1, &n).unwrap() - c(1.0)).norm() < 1e-15);

        // 2n + 1 on |1> gives <r^2>_W = 3
        let mut op = n.clone();
        op.entries = op.entries * c(2.0) + DMatrix::identity(2, 2);
        assert!((expectation_real(&rho1, &op).unwrap() - 3.0).abs() < 1e-15);

        let rho0 = DensityMatrix::fock(0).resized(4);
        let x = build_operator(OperatorKind::X, 4).unwrap();
        let x2 = OperatorMatrix::custom(&x.entries * &x.entries, "x^2");
        assert!((expectation_real(&rho0, &x2).unwrap() - 0.5).abs() < 1e-15);

        assert!(matches!(
            expectation(&rho0, &n),
            Err(Error::DimensionMismatch(4, 2))
        ));
    }

    #[test]
    fn hamiltonian_carries_omega() {
        let h = hamiltonian(2.5, 3).unwrap();
        assert_eq!(h.omega, 2.5);
        assert_eq!(h.entries[(2, 2)], c(5.0));
    }

    #[test]
    fn lattice_projection() {
        let s = FockState::from_real(&[1.0, 1.0]).unwrap();
        let p = project_lattice(&s, 0, 2).unwrap();
        assert_eq!(p.amplitude(0), c(1.0));
        assert_eq!(p.amplitude(1), c(0.0));

        let s = FockState::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let q = project_lattice(&s, 0, 4).unwrap();
        for (a, b) in q.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }

        let err = project_lattice(&FockState::basis(1), 0, 2);
        assert!(matches!(err, Err(Error::EmptyProjection { .. })));
        assert!(project_lattice(&s, 4, 4).is_err());
    }

    #[test]
    fn normalisation_and_support() {
        let s = FockState::from_real(&[3.0, 0.0, 4.0, 0.0]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert_eq!(s.support(), 2);
        assert!(matches!(FockState::from_real(&[0.0, 0.0]), Err(Error::ZeroNorm)));
        assert!(FockState::new(vec![]).is_err());
        let raw = FockState::unnormalized(vec![c(2.0)]).unwrap();
        assert_eq!(raw.norm(), 2.0);
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = DMatrix::from_element(2, 2, c(0.0));
        assert!(DensityMatrix::new(bad_trace).is_err());
        let not_psd = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(not_psd).is_err());
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(DensityMatrix::new(not_herm).is_err());
        let mix = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        assert_eq!(mix.max_off_diagonal(), 0.0);
        assert_eq!(mix.support(), 1);
    }

    #[test]
    fn json_is_pairs() {
        let s = FockState::superposition(&[(0, c(1.0)), (1, C64::new(0.0, 1.0))]).unwrap();
        let js = s.to_json().unwrap();
        assert!(js.starts_with("[["));
        assert_eq!(FockState::from_json(&js).unwrap(), s);
        let rho = DensityMatrix::pure(&s);
        assert_eq!(DensityMatrix::from_json(&rho.to_json().unwrap()).unwrap(), rho);
    }
}
