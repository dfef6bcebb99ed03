//! Command handlers.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};
use wigner_negativity::measurement::{recover_witness, Detection, NoiseModel, Recovery, TrajectoryConfig};
use wigner_negativity::regularized::{self, RegularizedStateParams};
use wigner_negativity::state_spec::parse_state;
use wigner_negativity::weyl::moment_table;
use wigner_negativity::wigner::{self, GridSpec};
use wigner_negativity::witness::{
    fa_scan, fb_determinant_exact, fb_matrix, fb_search, general_order2_search, necessity_scan,
    rotinv_fc_for_state, rotinv_fd_minimum, Order2SearchConfig, PhaseSpaceTransform,
};
use wigner_negativity::{DensityMatrix, Lattice, WitnessReport};

use crate::parse::{parse_list, parse_pair, parse_witness};
use crate::{reproduce, Cli, CliError, Command, Format, WitnessCommand, EXIT_NUMERICAL, EXIT_OK, SCHEMA_VERSION};

pub struct Outcome {
    json: Value,
    csv: Option<String>,
    format: Format,
    out_path: Option<String>,
    pub exit_code: i32,
}

impl Outcome {
    fn new(command: &str, body: Value) -> Self {
        let mut map = Map::new();
        map.insert("schema".into(), json!(SCHEMA_VERSION));
        map.insert("command".into(), json!(command));
        if let Value::Object(fields) = body {
            map.extend(fields);
        }
        Self {
            json: Value::Object(map),
            csv: None,
            format: Format::Json,
            out_path: None,
            exit_code: EXIT_OK,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn emit(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let text = match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone().ok_or_else(|| {
                CliError::Usage("this command has no tabular output; use --format json".into())
            })?,
        };
        match &self.out_path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| CliError::Usage(format!("cannot write {p}: {e}"))),
            None => out
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Numerical(e.to_string()))
}

fn ensure_finite<'a>(what: &str, values: impl IntoIterator<Item = &'a f64>) -> Result<(), CliError> {
    if values.into_iter().any(|v| !v.is_finite()) {
        return Err(CliError::Numerical(format!("{what} is not finite")));
    }
    Ok(())
}

fn state(spec: &str) -> Result<DensityMatrix, CliError> {
    Ok(parse_state(spec)?.density_matrix())
}

fn report_finite(r: &WitnessReport) -> Result<(), CliError> {
    ensure_finite("witness value", [r.value].iter().chain(&r.eigenvector).chain(r.min_eigenvalue.iter()))
}

fn require_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::Usage("--seed is required for randomized commands".into()))
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let mut outcome = match &cli.command {
        Command::Moments(a) => {
            let rho = state(&a.state)?;
            let t = moment_table(&rho, a.max_order)?;
            ensure_finite("moment", t.entries.values())?;
            let mut csv = String::from("n,m,value\n");
            for (&(n, m), v) in &t.entries {
                csv.push_str(&format!("{n},{m},{v}\n"));
            }
            Outcome::new("moments", json!({"state": a.state, "table": to_value(&t)?})).with_csv(csv)
        }
        Command::Wigner(a) => {
            let rho = state(&a.state)?;
            if let Some(p) = &a.point {
                let (x, mom) = parse_pair(p, "--point")?;
                let w = wigner::wigner_point(&rho, x, mom)?;
                Outcome::new("wigner", json!({"state": a.state, "x": x, "p": mom, "w": w}))
                    .with_csv(format!("x,p,w\n{x},{mom},{w}\n"))
            } else {
                let spec = GridSpec { x0: a.x0, x1: a.x1, nx: a.nx, p0: a.p0, p1: a.p1, np: a.np };
                let g = wigner::wigner_grid(&rho, spec)?;
                let csv = g.to_csv();
                Outcome::new("wigner", json!({"state": a.state, "grid": to_value(&g)?})).with_csv(csv)
            }
        }
        Command::Witness(w) => witness(w)?,
        Command::Regularized(a) => {
            let p = RegularizedStateParams::new(a.epsilon)?.with_c0(a.c0);
            let fb = regularized::fb_moment(&p)?;
            let mut body = json!({
                "epsilon": a.epsilon,
                "c0": a.c0,
                "fb_moment": fb,
                "expected": a.c0 * a.c0 + 2.0 * a.epsilon - 1.0,
            });
            if a.check_norm {
                body["norm"] = json!(regularized::psi_norm_check(&p)?);
            }
            if let Some(pt) = &a.wigner {
                let (x, mom) = parse_pair(pt, "--wigner")?;
                body["wigner"] = json!({"x": x, "p": mom, "w": regularized::wigner_point(&p, x, mom)?});
            }
            Outcome::new("regularized", body)
        }
        Command::Simulate(a) => {
            let seed = require_seed(a.seed)?;
            let rho = state(&a.state)?;
            let (sx, sp) = parse_pair(&a.noise, "--noise")?;
            let det = Detection::Direct(NoiseModel::new(sx, sp)?);
            let rec = recover_witness(&rho, &det, &parse_witness(&a.witness)?, a.samples, seed)?;
            let mut o = Outcome::new("simulate", recovery_body(&a.state, &rec)?);
            o.out_path = a.out.clone();
            o
        }
        Command::SimulateRecord(a) => {
            let seed = require_seed(a.seed)?;
            let rho = state(&a.state)?;
            let (sx, sp) = parse_pair(&a.noise, "--noise")?;
            let cfg = TrajectoryConfig {
                omega: a.omega,
                t0: a.t0,
                dt: a.dt,
                noise: NoiseModel::new(sx, sp)?.with_s0(a.s0)?,
                samples: a.samples,
                seed,
            };
            let det = Detection::Record(cfg.validated()?);
            let rec = recover_witness(&rho, &det, &parse_witness(&a.witness)?, a.samples, seed)?;
            let mut o = Outcome::new("simulate-record", recovery_body(&a.state, &rec)?);
            o.out_path = a.out.clone();
            o
        }
        Command::ReproducePaper(a) => {
            let report = reproduce::reproduce_paper(a.seed, a.samples);
            let csv = report.to_csv();
            let mut o = Outcome::new("reproduce-paper", to_value(&report)?).with_csv(csv);
            if !report.all_pass() {
                o.exit_code = EXIT_NUMERICAL;
            }
            o
        }
    };
    outcome.format = cli.format;
    Ok(outcome)
}

fn recovery_body(state: &str, rec: &Recovery) -> Result<Value, CliError> {
    report_finite(&rec.witness)?;
    ensure_finite("moment", rec.deconvolved_moments.entries.values())?;
    let mut body = to_value(rec)?;
    body["state"] = json!(state);
    Ok(body)
}

fn lattice(offset: usize, spacing: usize) -> Result<Lattice, CliError> {
    Ok(Lattice::new(offset, spacing)?)
}

fn witness(w: &WitnessCommand) -> Result<Outcome, CliError> {
    Ok(match w {
        WitnessCommand::Fb(a) => {
            let r = fb_search(a.c0, lattice(a.offset, a.spacing)?, a.levels)?;
            report_finite(&r)?;
            let mut body = json!({
                "levels": a.levels,
                "c0": a.c0,
                "offset": a.offset,
                "spacing": a.spacing,
                "report": to_value(&r)?,
            });
            if a.offset == 0 && a.spacing == 4 {
                body["tridiagonal"] = to_value(&fb_matrix(a.levels)?)?;
                body["determinant"] = match fb_determinant_exact(a.levels) {
                    Ok(d) => json!(d),
                    Err(_) => Value::Null,
                };
            }
            Outcome::new("witness fb", body)
        }
        WitnessCommand::Scan(a) => {
            if !(a.c0_step > 0.0) || a.c0_max < a.c0_min {
                return Err(CliError::Usage("c0 grid needs step > 0 and max >= min".into()));
            }
            let steps = ((a.c0_max - a.c0_min) / a.c0_step + 1e-9).floor() as usize;
            let grid: Vec<f64> = (0..=steps).map(|i| a.c0_min + a.c0_step * i as f64).collect();
            let angles = a.angles.as_deref().map(|s| parse_list(s, "--angles")).transpose()?;
            let squeezes = a.squeezes.as_deref().map(|s| parse_list(s, "--squeezes")).transpose()?;
            let mut transforms = Vec::new();
            for &angle in angles.as_deref().unwrap_or(&[0.0]) {
                for &squeeze in squeezes.as_deref().unwrap_or(&[1.0]) {
                    if !(squeeze > 0.0) {
                        return Err(CliError::Usage("squeeze factors must be positive".into()));
                    }
                    transforms.push(PhaseSpaceTransform { angle, squeeze, shift: (0.0, 0.0) });
                }
            }
            let cfg = Order2SearchConfig {
                c0_grid: grid.clone(),
                levels: a.levels,
                transforms,
                ..Default::default()
            };
            let res = general_order2_search(&cfg)?;
            report_finite(&res.best)?;
            let mut body = json!({"search": to_value(&res)?});
            if a.necessity {
                body["necessity"] = to_value(&necessity_scan(&grid)?)?;
            }
            Outcome::new("witness scan", body)
        }
        WitnessCommand::Rotinv(a) => {
            let rho = state(&a.state)?;
            let body = match a.family {
                crate::RotinvFamily::Fc => json!({"family": "fc", "minimum": to_value(&rotinv_fc_for_state(&rho)?)?}),
                crate::RotinvFamily::Fd => json!({"family": "fd", "minimum": to_value(&rotinv_fd_minimum(&rho)?)?}),
            };
            Outcome::new("witness rotinv", json!({"state": a.state, "result": body}))
        }
        WitnessCommand::Fa(a) => {
            let rows = fa_scan(a.n_max)?;
            let mut csv = String::from("n,r2,r4,margin_closed,margin_moments\n");
            for r in &rows {
                csv.push_str(&format!("{},{},{},{},{}\n", r.n, r.r2, r.r4, r.margin_closed, r.margin_moments));
            }
            Outcome::new("witness fa", json!({"rows": to_value(&rows)?})).with_csv(csv)
        }
        WitnessCommand::Value(a) => {
            let rho = state(&a.state)?;
            let r = WitnessReport::evaluate(&rho, &parse_witness(&a.witness)?)?;
            report_finite(&r)?;
            Outcome::new("witness value", json!({"state": a.state, "report": to_value(&r)?}))
        }
    })
}

