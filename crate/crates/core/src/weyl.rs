//! Weyl-symmetrised moments of the Wigner function.
//!
//! `<x^n p^m>_W = Tr(W(x^n p^m) rho)` with the McCoy form
//! `W(x^n p^m) = 2^-n sum_j C(n, j) x^j p^m x^(n-j)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::fock::{build_operator, padded_dim, real_part_checked, trace_product, OperatorKind};
use crate::special::binomial;
use crate::{DensityMatrix, Error, OperatorMatrix, Result, C64};

/// Powers of `x` and `p` in a fixed truncation, reused across many Weyl products.
#[derive(Debug, Clone)]
pub struct WeylCache {
    dim: usize,
    x_pows: Vec<DMatrix<C64>>,
    p_pows: Vec<DMatrix<C64>>,
}

impl WeylCache {
    pub fn new(dim: usize) -> Result<Self> {
        let x = build_operator(OperatorKind::X, dim)?.entries;
        let p = build_operator(OperatorKind::P, dim)?.entries;
        Ok(Self {
            dim,
            x_pows: vec![DMatrix::identity(dim, dim), x],
            p_pows: vec![DMatrix::identity(dim, dim), p],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn ensure(&mut self, n: usize, m: usize) {
        while self.x_pows.len() <= n {
            let next = &self.x_pows[self.x_pows.len() - 1] * &self.x_pows[1];
            self.x_pows.push(next);
        }
        while self.p_pows.len() <= m {
            let next = &self.p_pows[self.p_pows.len() - 1] * &self.p_pows[1];
            self.p_pows.push(next);
        }
    }

    /// McCoy symmetrisation from the `x` side.
    pub fn weyl(&mut self, n: usize, m: usize) -> DMatrix<C64> {
        self.ensure(n, m);
        let mut acc = DMatrix::<C64>::zeros(self.dim, self.dim);
        for j in 0..=n {
            let c = binomial(n as u32, j as u32);
            acc += (&self.x_pows[j] * &self.p_pows[m] * &self.x_pows[n - j]) * C64::new(c, 0.0);
        }
        acc / C64::new(2f64.powi(n as i32), 0.0)
    }

    /// Same operator symmetrised from the `p` side; equal to [`Self::weyl`].
    pub fn weyl_p_side(&mut self, n: usize, m: usize) -> DMatrix<C64> {
        self.ensure(n, m);
        let mut acc = DMatrix::<C64>::zeros(self.dim, self.dim);
        for j in 0..=m {
            let c = binomial(m as u32, j as u32);
            acc += (&self.p_pows[j] * &self.x_pows[n] * &self.p_pows[m - j]) * C64::new(c, 0.0);
        }
        acc / C64::new(2f64.powi(m as i32), 0.0)
    }
}

/// `W(x^n p^m)` in dimension `dim`; requires `dim >= n + m + 2`.
///
/// Matrix elements between levels below `dim - n - m - 1` are exact.
pub fn weyl_operator(n: usize, m: usize, dim: usize) -> Result<OperatorMatrix> {
    if dim < padded_dim(0, n + m) {
        return Err(Error::Truncation {
            dim,
            support: 0,
            order: n + m,
        });
    }
    let mut cache = WeylCache::new(dim)?;
    Ok(OperatorMatrix::custom(
        cache.weyl(n, m),
        &format!("W(x^{n} p^{m})"),
    ))
}

/// Moments evaluator bound to one state, padded for a maximal order.
pub(crate) struct MomentEvaluator {
    cache: WeylCache,
    rho: DensityMatrix,
}

impl MomentEvaluator {
    pub(crate) fn new(rho: &DensityMatrix, max_order: usize) -> Result<Self> {
        let dim = padded_dim(rho.support(), max_order);
        Ok(Self {
            cache: WeylCache::new(dim)?,
            rho: rho.resized(dim),
        })
    }

    pub(crate) fn moment(&mut self, n: usize, m: usize) -> Result<f64> {
        let w = self.cache.weyl(n, m);
        real_part_checked(trace_product(&w, self.rho.entries()))
    }
}

/// `<x^n p^m>_W`.
pub fn moment(rho: &DensityMatrix, n: usize, m: usize) -> Result<f64> {
    MomentEvaluator::new(rho, n + m)?.moment(n, m)
}

/// `<(x^2 + p^2)^j>_W` from the binomial expansion over Cartesian moments.
pub fn radial_moment(rho: &DensityMatrix, j: usize) -> Result<f64> {
    let mut eval = MomentEvaluator::new(rho, 2 * j)?;
    let mut acc = 0.0;
    for i in 0..=j {
        acc += binomial(j as u32, i as u32) * eval.moment(2 * i, 2 * (j - i))?;
    }
    Ok(acc)
}

/// All Weyl moments with `n + m <= max_order`, plus radial moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub max_order: usize,
    pub entries: BTreeMap<(usize, usize), f64>,
    pub radial: BTreeMap<usize, f64>,
}

impl MomentTable {
    /// Builds the table from Cartesian entries; radial moments are derived.
    pub fn from_entries(max_order: usize, entries: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        for n in 0..=max_order {
            for m in 0..=(max_order - n) {
                if !entries.contains_key(&(n, m)) {
                    return Err(Error::InvalidArgument(format!(
                        "moment table missing entry ({n}, {m})"
                    )));
                }
            }
        }
        let radial = (0..=max_order / 2)
            .map(|j| {
                let v = (0..=j)
                    .map(|i| binomial(j as u32, i as u32) * entries[&(2 * i, 2 * (j - i))])
                    .sum();
                (j, v)
            })
            .collect();
        Ok(Self {
            max_order,
            entries,
            radial,
        })
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries.get(&(n, m)).copied().unwrap_or(f64::NAN)
    }

    pub fn radial(&self, j: usize) -> f64 {
        self.radial.get(&j).copied().unwrap_or(f64::NAN)
    }

    /// Every `(n, m)` index with `n + m <= order`, graded by total order.
    pub fn indices(order: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..=order).flat_map(|k| (0..=k).map(move |m| (k - m, m)))
    }
}

/// Wire form: `{max_order, entries: [[n, m, v], ...], radial: [[j, v], ...]}`.
#[derive(Serialize, Deserialize)]
struct MomentTableWire {
    max_order: usize,
    entries: Vec<(usize, usize, f64)>,
    radial: Vec<(usize, f64)>,
}

impl Serialize for MomentTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MomentTableWire {
            max_order: self.max_order,
            entries: Self::indices(self.max_order)
                .map(|(n, m)| (n, m, self.get(n, m)))
                .collect(),
            radial: self.radial.iter().map(|(&j, &v)| (j, v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MomentTableWire::deserialize(d)?;
        let entries = wire.entries.into_iter().map(|(n, m, v)| ((n, m), v)).collect();
        MomentTable::from_entries(wire.max_order, entries).map_err(serde::de::Error::custom)
    }
}

/// Fills every `(n, m)` with `n + m <= max_order`.
pub fn moment_table(rho: &DensityMatrix, max_order: usize) -> Result<MomentTable> {
    let mut eval = MomentEvaluator::new(rho, max_order)?;
    let mut entries = BTreeMap::new();
    for (n, m) in MomentTable::indices(max_order) {
        entries.insert((n, m), eval.moment(n, m)?);
    }
    MomentTable::from_entries(max_order, entries)
}
