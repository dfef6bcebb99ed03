//! The order-two family `f_b = 2xp + c0` and its tridiagonal eigenproblem.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::{restrict, PhaseSpaceTransform, PolynomialWitness, WitnessReport};
use crate::eigen::min_eigenpair_hermitian;
use crate::fock::padded_dim;
use crate::weyl::WeylCache;
use crate::{Error, Lattice, Result, C64};

/// `(2xp)^2` restricted to `{|0>, |4>, |8>, ...}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagonalWitnessMatrix {
    pub size: usize,
    /// `A_k = 32 k^2 + 8 k + 1`.
    pub diag: Vec<f64>,
    /// `B_k = -sqrt(4k (4k-1) (4k-2) (4k-3))`, `k = 1..size`.
    pub offdiag: Vec<f64>,
    /// `B_k^2` as exact integers.
    pub offdiag_squared: Vec<i64>,
    pub basis: Vec<usize>,
}

impl TridiagonalWitnessMatrix {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i + 1 == j {
                self.offdiag[i]
            } else if j + 1 == i {
                self.offdiag[j]
            } else {
                0.0
            }
        })
    }
}

fn diag_exact(k: i64) -> i64 {
    32 * k * k + 8 * k + 1
}

fn offdiag_squared_exact(k: i64) -> Option<i64> {
    let m = 4 * k;
    m.checked_mul(m - 1)?.checked_mul(m - 2)?.checked_mul(m - 3)
}

/// Closed-form tridiagonal matrix with `levels` rows.
pub fn fb_matrix(levels: usize) -> Result<TridiagonalWitnessMatrix> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be >= 1".into()));
    }
    let diag = (0..levels as i64).map(|k| diag_exact(k) as f64).collect();
    let offdiag_squared: Vec<i64> = (1..levels as i64)
        .map(|k| offdiag_squared_exact(k).ok_or(Error::Overflow(k as usize)))
        .collect::<Result<_>>()?;
    let offdiag = offdiag_squared.iter().map(|&b2| -(b2 as f64).sqrt()).collect();
    Ok(TridiagonalWitnessMatrix {
        size: levels,
        diag,
        offdiag,
        offdiag_squared,
        basis: Lattice { offset: 0, spacing: 4 }.levels(levels),
    })
}

/// Exact determinant from `D_k = A_k D_{k-1} - B_k^2 D_{k-2}`.
pub fn fb_determinant_exact(levels: usize) -> Result<i64> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be >= 1".into()));
    }
    let (mut prev, mut cur) = (1i64, diag_exact(0));
    for k in 1..levels as i64 {
        let overflow = Error::Overflow(k as usize);
        let b2 = offdiag_squared_exact(k).ok_or(Error::Overflow(k as usize))?;
        let next = diag_exact(k)
            .checked_mul(cur)
            .and_then(|a| b2.checked_mul(prev).and_then(|b| a.checked_sub(b)))
            .ok_or(overflow)?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `<b_i| W((2xp + c0)^2) |b_j>` on a lattice, built from Weyl moments.
pub fn fb_quadratic_form(c0: f64, lattice: Lattice, levels: usize) -> Result<DMatrix<C64>> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be >= 1".into()));
    }
    super::quadratic_form(&PolynomialWitness::fb(c0), &lattice.levels(levels))
}

/// Minimises `<(2xp + c0)^2>_W` over states on the first `levels` lattice sites.
pub fn fb_search(c0: f64, lattice: Lattice, levels: usize) -> Result<WitnessReport> {
    let form = fb_quadratic_form(c0, lattice, levels)?;
    WitnessReport::from_form(&PolynomialWitness::fb(c0), &lattice.levels(levels), &form)
}

/// `-10, -9.75, ..., 10`.
pub fn default_c0_grid() -> Vec<f64> {
    (-40..=40).map(|i| f64::from(i) * 0.25).collect()
}

/// The two canonical order-two families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order2Family {
    /// `x^2 + p^2 + c0`
    Fa,
    /// `2xp + c0`
    Fb,
}

impl Order2Family {
    fn base(self) -> PolynomialWitness {
        match self {
            Self::Fa => PolynomialWitness::fa(0.0),
            Self::Fb => PolynomialWitness::fb(0.0),
        }
    }

    pub fn witness(self, c0: f64) -> PolynomialWitness {
        match self {
            Self::Fa => PolynomialWitness::fa(c0),
            Self::Fb => PolynomialWitness::fb(c0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Order2SearchConfig {
    pub c0_grid: Vec<f64>,
    pub lattices: Vec<Lattice>,
    pub levels: usize,
    pub transforms: Vec<PhaseSpaceTransform>,
    pub families: Vec<Order2Family>,
}

impl Default for Order2SearchConfig {
    fn default() -> Self {
        Self {
            c0_grid: default_c0_grid(),
            lattices: vec![Lattice { offset: 0, spacing: 2 }, Lattice { offset: 1, spacing: 2 }],
            levels: 9,
            transforms: vec![PhaseSpaceTransform::default()],
            families: vec![Order2Family::Fa, Order2Family::Fb],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Order2SearchResult {
    pub best: WitnessReport,
    pub family: Order2Family,
    pub c0: f64,
    pub lattice: Lattice,
    pub transform: PhaseSpaceTransform,
    /// Number of eigenproblems solved.
    pub evaluated: usize,
    /// Smallest eigenvalue found per family, in `families` order.
    pub family_minima: Vec<(Order2Family, f64)>,
}

/// `W(g^2)`, `W(g)` for `f = g + c0`, so that `W(f^2) = W(g^2) + 2 c0 W(g) + c0^2`.
struct FormParts {
    square: DMatrix<C64>,
    linear: DMatrix<C64>,
}

impl FormParts {
    fn new(g: &PolynomialWitness, top: usize) -> Result<Self> {
        let mut cache = WeylCache::new(padded_dim(top, 2 * g.order()))?;
        Ok(Self {
            square: g.square().weyl_matrix(&mut cache),
            linear: g.weyl_matrix(&mut cache),
        })
    }

    fn form(&self, c0: f64, basis: &[usize]) -> DMatrix<C64> {
        let sq = restrict(&self.square, basis);
        let lin = restrict(&self.linear, basis);
        let id = DMatrix::<C64>::identity(basis.len(), basis.len());
        sq + lin * C64::new(2.0 * c0, 0.0) + id * C64::new(c0 * c0, 0.0)
    }
}

/// Scans the `f_a` and `f_b` families over `c0`, lattices and optional
/// phase-space transforms. Tasks are solved in parallel and merged in task
/// order, so ties resolve to the first parameter set.
pub fn general_order2_search(config: &Order2SearchConfig) -> Result<Order2SearchResult> {
    if config.levels == 0 || config.c0_grid.is_empty() || config.lattices.is_empty() {
        return Err(Error::InvalidArgument("empty order-two search".into()));
    }
    if config.c0_grid.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("c0 grid must be finite".into()));
    }
    let top = config
        .lattices
        .iter()
        .map(|l| l.offset + (config.levels - 1) * l.spacing)
        .max()
        .unwrap_or(0);

    let mut tasks = Vec::new();
    let mut parts = Vec::new();
    for &family in &config.families {
        for &transform in &config.transforms {
            let g = family.base().transformed(&transform)?;
            // the shift may introduce a constant; it is absorbed into c0 below
            let (g, shift_c0) = split_constant(g)?;
            parts.push(FormParts::new(&g, top)?);
            for &lattice in &config.lattices {
                for &c0 in &config.c0_grid {
                    tasks.push((parts.len() - 1, family, transform, lattice, c0, c0 + shift_c0));
                }
            }
        }
    }

    let values: Vec<f64> = tasks
        .par_iter()
        .map(|&(part, _, _, lattice, _, eff_c0)| {
            let basis = lattice.levels(config.levels);
            min_eigenpair_hermitian(&parts[part].form(eff_c0, &basis)).map(|p| p.value)
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let family_minima = config
        .families
        .iter()
        .map(|&fam| {
            let m = tasks
                .iter()
                .zip(&values)
                .filter(|(t, _)| t.1 == fam)
                .map(|(_, &v)| v)
                .fold(f64::INFINITY, f64::min);
            (fam, m)
        })
        .collect();

    let (part, family, transform, lattice, c0, eff_c0) = tasks[best];
    let witness = family.witness(c0).transformed(&transform)?;
    let basis = lattice.levels(config.levels);
    let report = WitnessReport::from_form(&witness, &basis, &parts[part].form(eff_c0, &basis))?;
    Ok(Order2SearchResult {
        best: report,
        family,
        c0,
        lattice,
        transform,
        evaluated: values.len(),
        family_minima,
    })
}

fn split_constant(g: PolynomialWitness) -> Result<(PolynomialWitness, f64)> {
    let c = g.coeff(0, 0);
    let rest = PolynomialWitness::new(g.coeffs().iter().filter(|(k, _)| **k != (0, 0)).map(|(&k, &v)| (k, v)))?;
    Ok((rest, c))
}

/// Result of the restricted "at least five Fock states" check.
#[derive(Debug, Clone, Serialize)]
pub struct NecessityReport {
    /// (subset, c0) pairs examined.
    pub cases: usize,
    pub min_value: f64,
    pub argmin_basis: Vec<usize>,
    pub argmin_c0: f64,
    pub max_subset_size: usize,
}

fn subsets(items: &[usize], max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(items: &[usize], start: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, max, cur, out);
            cur.pop();
        }
    }
    rec(items, 0, max_size, &mut Vec::new(), &mut out);
    out
}

/// Minimum of `<(2xp + c0)^2>_W` over every superposition of at most four
/// Fock states drawn from `{0, 2, ..., 18}` or `{1, 3, ..., 17}`, for each
/// `c0` in the grid. The spacing-four lattice up to `|16>` is a subset of
/// the even one.
pub fn necessity_scan(c0_grid: &[f64]) -> Result<NecessityReport> {
    const MAX_SUBSET: usize = 4;
    let even: Vec<usize> = (0..=18).step_by(2).collect();
    let odd: Vec<usize> = (1..=17).step_by(2).collect();
    let mut all = subsets(&even, MAX_SUBSET);
    all.extend(subsets(&odd, MAX_SUBSET));

    let parts = FormParts::new(&PolynomialWitness::new([((1, 1), 2.0)])?, 18)?;
    let tasks: Vec<(usize, f64)> = (0..all.len())
        .flat_map(|s| c0_grid.iter().map(move |&c| (s, c)))
        .collect();
    let values: Vec<f64> = tasks
        .par_iter()
        .map(|&(s, c0)| min_eigenpair_hermitian(&parts.form(c0, &all[s])).map(|p| p.value))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    Ok(NecessityReport {
        cases: values.len(),
        min_value: values[best],
        argmin_basis: all[tasks[best].0].clone(),
        argmin_c0: tasks[best].1,
        max_subset_size: MAX_SUBSET,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_entries() {
        let m = fb_matrix(5).unwrap();
        assert_eq!(m.diag, vec![1.0, 41.0, 145.0, 313.0, 545.0]);
        assert_eq!(m.offdiag_squared, vec![24, 1680, 11880, 43680]);
        assert_eq!(m.basis, vec![0, 4, 8, 12, 16]);
        assert_eq!(fb_matrix(2).unwrap().offdiag_squared, vec![24]);
        assert!(fb_matrix(0).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(fb_determinant_exact(1).unwrap(), 1);
        assert_eq!(fb_determinant_exact(2).unwrap(), 17);
        assert_eq!(fb_determinant_exact(5).unwrap(), -10_447_775);
        assert!(matches!(fb_determinant_exact(200), Err(Error::Overflow(_))));
    }

    #[test]
    fn single_level_vacuum() {
        let r = fb_search(0.0, Lattice::new(0, 4).unwrap(), 1).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(!r.violated);
    }

    #[test]
    fn subset_counts() {
        let s = subsets(&[1, 2, 3, 4, 5], 2);
        assert_eq!(s.len(), 5 + 10);
    }

    #[test]
    fn c0_grid() {
        let g = default_c0_grid();
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], -10.0);
        assert_eq!(g[40], 0.0);
        assert_eq!(g[80], 10.0);
    }

    #[test]
    fn levels_one_no_violation() {
        let cfg = Order2SearchConfig {
            levels: 1,
            ..Default::default()
        };
        let res = general_order2_search(&cfg).unwrap();
        assert!(!res.best.violated);
    }
}
