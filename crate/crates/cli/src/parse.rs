//! Small value grammars used by the command line.

use wigner_negativity::PolynomialWitness;

use crate::CliError;

fn numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("{what}: `{t}` is not a finite number")))
        })
        .collect()
}

/// Comma-separated list of finite numbers.
pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    numbers(s, what)
}

/// `"a,b"`.
pub fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    match numbers(s, what)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::Usage(format!("{what}: expected two comma-separated numbers"))),
    }
}

/// Witness mini-language: `fa:C0`, `fb:C0`, `fc:C30,C10`, `fd:C20,C0`,
/// `linear:C00,C10,C01`, `poly:N,M,C;N,M,C;...`.
pub fn parse_witness(s: &str) -> Result<PolynomialWitness, CliError> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("witness `{s}`: expected KIND:ARGS")))?;
    let args = |n: usize| -> Result<Vec<f64>, CliError> {
        let v = numbers(rest, "witness")?;
        if v.len() != n {
            return Err(CliError::Usage(format!("witness `{kind}` takes {n} argument(s)")));
        }
        Ok(v)
    };
    Ok(match kind {
        "fa" => PolynomialWitness::fa(args(1)?[0]),
        "fb" => PolynomialWitness::fb(args(1)?[0]),
        "fc" => {
            let v = args(2)?;
            PolynomialWitness::fc(v[0], v[1])
        }
        "fd" => {
            let v = args(2)?;
            PolynomialWitness::fd(v[0], v[1])
        }
        "linear" => {
            let v = args(3)?;
            PolynomialWitness::linear(v[0], v[1], v[2])?
        }
        "poly" => {
            let mut terms = Vec::new();
            for term in rest.split(';').filter(|t| !t.trim().is_empty()) {
                let parts: Vec<&str> = term.split(',').map(str::trim).collect();
                let [n, m, c] = parts.as_slice() else {
                    return Err(CliError::Usage(format!("poly term `{term}`: expected N,M,C")));
                };
                let exp = |t: &str| {
                    t.parse::<usize>()
                        .map_err(|_| CliError::Usage(format!("poly term `{term}`: bad exponent")))
                };
                let c = numbers(c, "poly coefficient")?[0];
                terms.push(((exp(n)?, exp(m)?), c));
            }
            PolynomialWitness::new(terms)?
        }
        other => return Err(CliError::Usage(format!("unknown witness family `{other}`"))),
    })
}
