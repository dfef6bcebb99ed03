//! Bivariate moment/cumulant conversion and Gaussian (de)convolution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::NoiseModel;
use crate::special::binomial;
use crate::{Error, MomentTable, Result};

/// Largest order handled by the conversions.
pub const MAX_CUMULANT_ORDER: usize = 8;

/// Joint cumulants `<<x^n p^m>>` for `1 <= n + m <= max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantTable {
    pub max_order: usize,
    pub entries: BTreeMap<(usize, usize), f64>,
}

impl CumulantTable {
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries.get(&(n, m)).copied().unwrap_or(f64::NAN)
    }

    fn check(max_order: usize) -> Result<()> {
        if max_order > MAX_CUMULANT_ORDER {
            return Err(Error::InvalidArgument(format!(
                "cumulant order {max_order} exceeds {MAX_CUMULANT_ORDER}"
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CumulantWire {
    max_order: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Serialize for CumulantTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CumulantWire {
            max_order: self.max_order,
            entries: self.entries.iter().map(|(&(n, m), &v)| (n, m, v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CumulantTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CumulantWire::deserialize(d)?;
        Ok(Self {
            max_order: w.max_order,
            entries: w.entries.into_iter().map(|(n, m, v)| ((n, m), v)).collect(),
        })
    }
}

/// Sum over the lower-order terms of
/// `mu_{n,m} = sum_{i<n, j<=m} C(n-1,i) C(m,j) kappa_{n-i,m-j} mu_{i,j}`
/// (recursing along `m` when `n = 0`), excluding the `kappa_{n,m} mu_{0,0}` term.
fn lower_terms(
    n: usize,
    m: usize,
    mu: &BTreeMap<(usize, usize), f64>,
    kappa: &BTreeMap<(usize, usize), f64>,
) -> f64 {
    let mut acc = 0.0;
    if n > 0 {
        for i in 0..n {
            for j in 0..=m {
                if i == 0 && j == 0 {
                    continue;
                }
                acc += binomial((n - 1) as u32, i as u32)
                    * binomial(m as u32, j as u32)
                    * kappa[&(n - i, m - j)]
                    * mu[&(i, j)];
            }
        }
    } else {
        for j in 1..m {
            acc += binomial((m - 1) as u32, j as u32) * kappa[&(0, m - j)] * mu[&(0, j)];
        }
    }
    acc
}

fn graded(order: usize) -> impl Iterator<Item = (usize, usize)> {
    MomentTable::indices(order).filter(|&(n, m)| n + m > 0)
}

/// Raw moments to joint cumulants.
pub fn moments_to_cumulants(m: &MomentTable) -> Result<CumulantTable> {
    CumulantTable::check(m.max_order)?;
    let mu0 = m.get(0, 0);
    if (mu0 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("moment (0,0) must be 1, got {mu0}")));
    }
    let mut kappa = BTreeMap::new();
    for (n, k) in graded(m.max_order) {
        let v = m.get(n, k) - lower_terms(n, k, &m.entries, &kappa);
        kappa.insert((n, k), v);
    }
    Ok(CumulantTable {
        max_order: m.max_order,
        entries: kappa,
    })
}

/// Joint cumulants to raw moments.
pub fn cumulants_to_moments(c: &CumulantTable) -> Result<MomentTable> {
    CumulantTable::check(c.max_order)?;
    for (n, m) in graded(c.max_order) {
        if !c.entries.contains_key(&(n, m)) {
            return Err(Error::InvalidArgument(format!("cumulant table missing ({n}, {m})")));
        }
    }
    let mut mu = BTreeMap::new();
    mu.insert((0, 0), 1.0);
    for (n, m) in graded(c.max_order) {
        let v = c.entries[&(n, m)] + lower_terms(n, m, &mu, &c.entries);
        mu.insert((n, m), v);
    }
    MomentTable::from_entries(c.max_order, mu)
}

fn shift_variances(c: &CumulantTable, dx: f64, dp: f64) -> CumulantTable {
    let mut out = c.clone();
    if c.max_order >= 2 {
        *out.entries.get_mut(&(2, 0)).expect("order-2 entry") += dx;
        *out.entries.get_mut(&(0, 2)).expect("order-2 entry") += dp;
    }
    out
}

/// Removes independent Gaussian detection noise: only the variances change.
pub fn deconvolve(measured: &CumulantTable, noise: &NoiseModel) -> CumulantTable {
    shift_variances(measured, -noise.sigma2_x, -noise.sigma2_p)
}

/// Adds independent Gaussian detection noise.
pub fn convolve(exact: &CumulantTable, noise: &NoiseModel) -> CumulantTable {
    shift_variances(exact, noise.sigma2_x, noise.sigma2_p)
}

/// Moments of `W * G` for Gaussian noise, computed exactly.
pub fn convolve_moments(exact: &MomentTable, noise: &NoiseModel) -> Result<MomentTable> {
    cumulants_to_moments(&convolve(&moments_to_cumulants(exact)?, noise))
}

/// Moments of `W` recovered from moments of `W * G`.
pub fn deconvolve_moments(measured: &MomentTable, noise: &NoiseModel) -> Result<MomentTable> {
    cumulants_to_moments(&deconvolve(&moments_to_cumulants(measured)?, noise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gaussian_moment;

    fn gaussian(order: usize, vx: f64, vp: f64) -> MomentTable {
        let entries = MomentTable::indices(order)
            .map(|(n, m)| ((n, m), gaussian_moment(n as u32, vx) * gaussian_moment(m as u32, vp)))
            .collect();
        MomentTable::from_entries(order, entries).unwrap()
    }

    #[test]
    fn gaussian_has_only_variances() {
        let c = moments_to_cumulants(&gaussian(8, 1.0, 1.0)).unwrap();
        for (&(n, m), &v) in &c.entries {
            let want = if (n, m) == (2, 0) || (n, m) == (0, 2) { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-9, "({n},{m}) = {v}");
        }
    }

    #[test]
    fn variance_subtraction() {
        let mut c = moments_to_cumulants(&gaussian(4, 1.5, 0.7)).unwrap();
        c.entries.insert((3, 1), 0.25);
        let noise = NoiseModel::new(1.0, 0.2).unwrap();
        let d = deconvolve(&c, &noise);
        assert!((d.get(2, 0) - 0.5).abs() < 1e-12);
        assert!((d.get(0, 2) - 0.5).abs() < 1e-12);
        assert_eq!(d.get(3, 1), 0.25);
    }

    #[test]
    fn order_limit() {
        let m = gaussian(9, 1.0, 1.0);
        assert!(moments_to_cumulants(&m).is_err());
    }

    #[test]
    fn wire_round_trip() {
        let c = moments_to_cumulants(&gaussian(3, 1.0, 2.0)).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: CumulantTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
