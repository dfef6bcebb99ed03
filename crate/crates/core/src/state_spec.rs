//! Textual state descriptions used by the command line.
//!
//! - `fock:<n>`
//! - `mix:fock:<n>@<p>,fock:<m>@<q>,...` (weights renormalised)
//! - `superpos:<n1>:<re>[+i<im>],<n2>:<re>[-i<im>],...` (amplitudes normalised)

use crate::{DensityMatrix, Error, FockState, Result, C64};

/// A parsed state, pure or mixed.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedState {
    Pure(FockState),
    Mixed(DensityMatrix),
}

impl ParsedState {
    pub fn density_matrix(&self) -> DensityMatrix {
        match self {
            Self::Pure(s) => DensityMatrix::pure(s),
            Self::Mixed(rho) => rho.clone(),
        }
    }
}

fn parse_level(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad Fock level `{s}`")))
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{s}`")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number `{s}`")));
    }
    Ok(v)
}

/// `re`, `re+iim`, `re-iim`.
fn parse_amplitude(s: &str) -> Result<C64> {
    let s = s.trim();
    for (sep, sign) in [("+i", 1.0), ("-i", -1.0)] {
        if let Some(pos) = s.rfind(sep) {
            if pos > 0 {
                let re = parse_f64(&s[..pos])?;
                let im = parse_f64(&s[pos + 2..])?;
                return Ok(C64::new(re, sign * im));
            }
        }
    }
    Ok(C64::new(parse_f64(s)?, 0.0))
}

fn parse_fock(s: &str) -> Result<usize> {
    let rest = s
        .trim()
        .strip_prefix("fock:")
        .ok_or_else(|| Error::Parse(format!("expected `fock:<n>`, got `{s}`")))?;
    parse_level(rest)
}

/// Parses a state description.
pub fn parse_state(spec: &str) -> Result<ParsedState> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("mix:") {
        let mut comps = Vec::new();
        for part in rest.split(',') {
            let (state, weight) = part
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("mixture component `{part}` lacks `@<p>`")))?;
            comps.push((parse_f64(weight)?, FockState::basis(parse_fock(state)?)));
        }
        return Ok(ParsedState::Mixed(DensityMatrix::mixture(&comps)?));
    }
    if let Some(rest) = spec.strip_prefix("superpos:") {
        let mut terms = Vec::new();
        for part in rest.split(',') {
            let (n, amp) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("term `{part}` should be `<n>:<amp>`")))?;
            terms.push((parse_level(n)?, parse_amplitude(amp)?));
        }
        return FockState::superposition(&terms)
            .map(ParsedState::Pure)
            .map_err(|e| Error::Parse(e.to_string()));
    }
    if spec.starts_with("fock:") {
        return Ok(ParsedState::Pure(FockState::basis(parse_fock(spec)?)));
    }
    Err(Error::Parse(format!("unrecognised state `{spec}`")))
}
