mod support;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracles::{fock_radial_moment, gaussian_moment};
use wigner_negativity::measurement::{
    convolve, convolve_moments, convolved_density_grid, cumulants_to_moments, deconvolve,
    deconvolve_moments, extract_quadratures, moments_to_cumulants, recover_witness,
    sample_convolved, simulate_fixed, simulate_record, CumulantTable, Detection, NoiseModel,
    RunData, TrajectoryConfig,
};
use wigner_negativity::weyl::moment_table;
use wigner_negativity::wigner::GridSpec;
use wigner_negativity::{DensityMatrix, FockState, MomentTable, PolynomialWitness, C64};

fn pairs(rho: &DensityMatrix, s2: f64, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let run = sample_convolved(rho, &NoiseModel::new(s2, s2).unwrap(), n, seed).unwrap();
    match run.data {
        RunData::Pairs(v) => v,
        RunData::Records { .. } => unreachable!(),
    }
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn period_config(periods: f64, steps: usize, s0: f64, sigma2: f64, samples: usize, seed: u64) -> TrajectoryConfig {
    let t0 = 2.0 * PI * periods;
    TrajectoryConfig {
        omega: 1.0,
        t0,
        dt: t0 / steps as f64,
        noise: NoiseModel::new(sigma2, sigma2).unwrap().with_s0(s0).unwrap(),
        samples,
        seed,
    }
}

fn gaussian_table(order: usize, vx: f64, vp: f64) -> MomentTable {
    let entries = MomentTable::indices(order)
        .map(|(n, m)| ((n, m), gaussian_moment(n as u32, vx) * gaussian_moment(m as u32, vp)))
        .collect();
    MomentTable::from_entries(order, entries).unwrap()
}

#[test]
fn vacuum_sample_variance() {
    let n = 200_000;
    let v = pairs(&DensityMatrix::fock(0), 0.5, n, 3);
    let bound = 3.0 * (2.0 / n as f64).sqrt();
    let xs: Vec<f64> = v.iter().map(|s| s.0 * s.0).collect();
    let ps: Vec<f64> = v.iter().map(|s| s.1 * s.1).collect();
    assert!((mean_and_se(&xs).0 - 1.0).abs() < bound);
    assert!((mean_and_se(&ps).0 - 1.0).abs() < bound);
}

#[test]
fn one_photon_ring() {
    let noise = NoiseModel::new(0.5, 0.5).unwrap();
    let v = pairs(&DensityMatrix::fock(1), 0.5, 200_000, 5);
    let r2: Vec<f64> = v.iter().map(|(x, p)| x * x + p * p).collect();
    let (m, se) = mean_and_se(&r2);
    // raw ring radius includes the detector variance
    assert!((m - 4.0).abs() < 4.0 * se, "{m} +- {se}");
    let mut raw = std::collections::BTreeMap::new();
    for (n, k) in MomentTable::indices(2) {
        let vals: Vec<f64> = v.iter().map(|(x, p)| x.powi(n as i32) * p.powi(k as i32)).collect();
        raw.insert((n, k), mean_and_se(&vals).0);
    }
    let table = MomentTable::from_entries(2, raw).unwrap();
    let back = deconvolve_moments(&table, &noise).unwrap();
    assert!((back.radial(1) - 3.0).abs() < 4.0 * se);
}

#[test]
fn empty_run() {
    assert!(sample_convolved(&DensityMatrix::fock(1), &NoiseModel::new(0.5, 0.5).unwrap(), 0, 9)
        .unwrap()
        .is_empty());
}

#[test]
fn gaussian_cumulants_vanish() {
    let c = moments_to_cumulants(&gaussian_table(8, 1.0, 1.0)).unwrap();
    for (&(n, m), &v) in &c.entries {
        let expect = if (n, m) == (2, 0) || (n, m) == (0, 2) { 1.0 } else { 0.0 };
        assert!((v - expect).abs() < 1e-9, "({n},{m}) = {v}");
    }
}

#[test]
fn one_photon_fourth_cumulant() {
    let t = moment_table(&DensityMatrix::fock(1), 4).unwrap();
    let c = moments_to_cumulants(&t).unwrap();
    // marginal moments of a rotation-invariant state from radial moments
    let mu2 = fock_radial_moment(1, 1) / 2.0;
    let mu4 = fock_radial_moment(1, 2) * 3.0 / 8.0;
    let kappa4 = mu4 - 3.0 * mu2 * mu2;
    assert!((kappa4 + 3.0).abs() < 1e-12);
    assert!((c.get(4, 0) - kappa4).abs() < 1e-10);
    assert!((c.get(0, 4) - kappa4).abs() < 1e-10);
}

#[test]
fn variance_subtraction_example() {
    let mut entries = std::collections::BTreeMap::new();
    entries.insert((1, 0), 0.0);
    entries.insert((0, 1), 0.0);
    entries.insert((2, 0), 1.5);
    entries.insert((1, 1), 0.2);
    entries.insert((0, 2), 1.5);
    let measured = CumulantTable { max_order: 2, entries };
    let out = deconvolve(&measured, &NoiseModel::new(1.0, 1.0).unwrap());
    assert!((out.get(2, 0) - 0.5).abs() < 1e-15);
    assert!((out.get(0, 2) - 0.5).abs() < 1e-15);
    assert_eq!(out.get(1, 1), 0.2);
}

#[test]
fn convolved_moments_match_samples() {
    let rho = DensityMatrix::fock(1);
    let noise = NoiseModel::new(0.5, 0.5).unwrap();
    let exact = convolve_moments(&moment_table(&rho, 4).unwrap(), &noise).unwrap();
    let v = pairs(&rho, 0.5, 1_000_000, 17);
    for (n, m) in MomentTable::indices(4).filter(|&(n, m)| n + m > 0) {
        let vals: Vec<f64> = v.iter().map(|(x, p)| x.powi(n as i32) * p.powi(m as i32)).collect();
        let (mean, se) = mean_and_se(&vals);
        assert!((mean - exact.get(n, m)).abs() < 5.0 * se, "({n},{m}): {mean} vs {} +- {se}", exact.get(n, m));
    }
}

#[test]
fn convolved_density_positive() {
    let spec = GridSpec::square(6.0, 61);
    let g = convolved_density_grid(&DensityMatrix::fock(1), &NoiseModel::new(0.5, 0.5).unwrap(), spec).unwrap();
    assert!(g.values.iter().all(|&v| v >= -1e-12));
    assert!((g.integrate(|_, _| 1.0) - 1.0).abs() < 1e-3);
    let narrow = convolved_density_grid(&DensityMatrix::fock(1), &NoiseModel::new(0.05, 0.05).unwrap(), spec).unwrap();
    assert!(narrow.values.iter().any(|&v| v < 0.0));
}

#[test]
fn noiseless_extraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cfg = period_config(1.0, 1000, 0.0, 0.5, 1, 0);
    for _ in 0..100 {
        let (x0, p0) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let run = simulate_fixed(x0, p0, &cfg).unwrap();
        let (x, p) = extract_quadratures(&run).unwrap()[0];
        assert!((x - x0).abs() < 1e-5 && (p - p0).abs() < 1e-5);
    }
    for (x0, p0) in [(1.0, 0.0), (0.3, -0.7)] {
        let run = simulate_fixed(x0, p0, &cfg).unwrap();
        if let RunData::Records { times, values } = &run.data {
            if (x0, p0) == (1.0, 0.0) {
                for (t, v) in times.iter().zip(&values[0]) {
                    assert!((v - t.cos()).abs() < 1e-14);
                }
            }
        }
        let (x, p) = extract_quadratures(&run).unwrap()[0];
        assert!((x - x0).abs() < 1e-5 && (p - p0).abs() < 1e-5);
    }
}

fn extracted_variance(periods: f64, s0: f64, seed: u64) -> (f64, f64) {
    let cfg = period_config(periods, 200, s0, 5.0, 10_000, seed);
    let est = extract_quadratures(&simulate_fixed(0.0, 0.0, &cfg).unwrap()).unwrap();
    let xs: Vec<f64> = est.iter().map(|e| e.0).collect();
    let ps: Vec<f64> = est.iter().map(|e| e.1).collect();
    let var = |v: &[f64]| {
        let (m, _) = mean_and_se(v);
        v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    (var(&xs), var(&ps))
}

#[test]
fn estimator_variance_law() {
    let s0 = 0.05;
    for periods in [1.0, 2.0] {
        let t0 = 2.0 * PI * periods;
        let (vx, vp) = extracted_variance(periods, s0, 21);
        let target = 2.0 * s0 / t0;
        assert!((vx / target - 1.0).abs() < 0.1, "{vx} vs {target}");
        assert!((vp / target - 1.0).abs() < 0.1, "{vp} vs {target}");
    }
    let (short, _) = extracted_variance(1.0, s0, 22);
    let (long, _) = extracted_variance(2.0, s0, 23);
    assert!((short / long - 2.0).abs() < 0.2);
}

#[test]
fn vacuum_record_time_average() {
    let cfg = period_config(1.0, 400, 0.0, 0.5, 20_000, 8);
    let run = simulate_record(&DensityMatrix::fock(0), &cfg).unwrap();
    let RunData::Records { values, .. } = &run.data else { unreachable!() };
    let n = cfg.steps();
    let avgs: Vec<f64> = values
        .iter()
        .map(|r| r[..n].iter().map(|v| v * v).sum::<f64>() / n as f64)
        .collect();
    // total variance per quadrature 0.5 + 0.5, so <x0^2 + p0^2>/2 = 1
    let (m, se) = mean_and_se(&avgs);
    assert!((m - 1.0).abs() < 4.0 * se, "{m} +- {se}");
}

#[test]
fn record_noise_below_vacuum_rejected() {
    let cfg = period_config(1.0, 100, 2.0, 0.6, 10, 1);
    assert!(simulate_record(&DensityMatrix::fock(0), &cfg).is_err());
}

#[test]
fn deterministic_runs() {
    let cfg = period_config(1.0, 50, 0.01, 1.0, 300, 77);
    let a = simulate_record(&DensityMatrix::fock(1), &cfg).unwrap();
    let b = simulate_record(&DensityMatrix::fock(1), &cfg).unwrap();
    assert_eq!(a, b);
    let rho = DensityMatrix::fock(2);
    let noise = NoiseModel::new(0.5, 0.5).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let s1 = one.install(|| sample_convolved(&rho, &noise, 5000, 4).unwrap());
    let s4 = four.install(|| sample_convolved(&rho, &noise, 5000, 4).unwrap());
    assert_eq!(s1, s4);
}

#[test]
fn vacuum_fb_recovery() {
    let det = Detection::Direct(NoiseModel::new(0.5, 0.5).unwrap());
    let r = recover_witness(&DensityMatrix::fock(0), &det, &PolynomialWitness::fb(0.0), 200_000, 12).unwrap();
    assert!((r.exact_value - 1.0).abs() < 1e-12);
    assert!(r.witness.value + 3.0 * r.stderr_bootstrap >= 0.0);
    assert!(!r.witness.violated);
    assert!((r.witness.value - 1.0).abs() < 4.0 * r.stderr_bootstrap);
}

#[test]
fn vacuum_fb_recovery_from_records() {
    let cfg = period_config(1.0, 100, 0.02, 1.0, 20_000, 31);
    let r = recover_witness(&DensityMatrix::fock(0), &Detection::Record(cfg), &PolynomialWitness::fb(0.0), 20_000, 31).unwrap();
    assert!(!r.witness.violated);
    assert!((r.witness.value - 1.0).abs() < 4.0 * r.stderr_bootstrap);
}

#[test]
fn small_sample_no_claim() {
    let det = Detection::Direct(NoiseModel::new(0.5, 0.5).unwrap());
    let r = recover_witness(&DensityMatrix::fock(1), &det, &PolynomialWitness::fd(-12.0, 26.0), 1000, 42).unwrap();
    assert_eq!(r.witness.violated, r.witness.value + 3.0 * r.stderr_bootstrap < 0.0);
    assert!(!r.witness.violated);
}

#[test]
fn wide_noise_recovers_r4() {
    let det = Detection::Direct(NoiseModel::new(2.0, 2.0).unwrap());
    let r = recover_witness(&DensityMatrix::fock(1), &det, &PolynomialWitness::fa(0.0), 1_000_000, 6).unwrap();
    let r4 = r.deconvolved_moments.radial(2);
    let se = r.radial_stderr[&2];
    assert!((r4 - 10.0).abs() < 3.0 * se, "{r4} +- {se}");
}

#[test]
fn recovery_rejects_high_order() {
    let det = Detection::Direct(NoiseModel::new(0.5, 0.5).unwrap());
    let f = PolynomialWitness::new([((5, 0), 1.0)]).unwrap();
    assert!(recover_witness(&DensityMatrix::fock(0), &det, &f, 100, 1).is_err());
}

fn random_rho(seed: u64, dim: usize) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    DensityMatrix::pure(&FockState::new(amps).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cumulant_round_trip(seed in any::<u64>(), dim in 1usize..5, order in 1usize..=8) {
        let t = moment_table(&random_rho(seed, dim), order).unwrap();
        let back = cumulants_to_moments(&moments_to_cumulants(&t).unwrap()).unwrap();
        for (n, m) in MomentTable::indices(order) {
            let a = t.get(n, m);
            prop_assert!((back.get(n, m) - a).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn deconvolve_inverts_convolve(seed in any::<u64>(), sx in 0.01f64..3.0, sp in 0.01f64..3.0) {
        let noise = NoiseModel::new(sx, sp).unwrap();
        let c = moments_to_cumulants(&moment_table(&random_rho(seed, 4), 6).unwrap()).unwrap();
        let back = deconvolve(&convolve(&c, &noise), &noise);
        for (k, v) in &c.entries {
            prop_assert!((back.entries[k] - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn convolving_gaussians_adds_variances(v1 in 0.1f64..2.0, v2 in 0.1f64..2.0) {
        let noise = NoiseModel::new(v2, v2).unwrap();
        let out = convolve_moments(&gaussian_table(6, v1, v1), &noise).unwrap();
        let expect = gaussian_table(6, v1 + v2, v1 + v2);
        for (n, m) in MomentTable::indices(6) {
            let e = expect.get(n, m);
            prop_assert!((out.get(n, m) - e).abs() <= 1e-10 * e.abs().max(1.0));
        }
    }
}
