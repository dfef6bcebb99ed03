//! Byte-stable outputs. Set `WIGNEG_UPDATE_GOLDEN=1` to rewrite the files.

use std::path::PathBuf;

use wigner_negativity_cli::{run_with, EXIT_OK};

const CASES: &[(&str, &[&str])] = &[
    ("moments_fock1.json", &["moments", "--state", "fock:1", "--max-order", "4"]),
    ("moments_mix.csv", &["--format", "csv", "moments", "--state", "mix:fock:0@0.25,fock:2@0.75", "--max-order", "2"]),
    ("witness_fb5.json", &["witness", "fb", "--levels", "5", "--c0", "0"]),
    ("witness_rotinv_fd1.json", &["witness", "rotinv", "--state", "fock:1", "--family", "fd"]),
    ("witness_fa.csv", &["--format", "csv", "witness", "fa", "--n-max", "5"]),
    ("wigner_fock1.csv", &["--format", "csv", "wigner", "--state", "fock:1", "--x0", "-2", "--x1", "2", "--nx", "5", "--p0", "-1", "--p1", "1", "--np", "3"]),
    ("regularized_0.1.json", &["regularized", "--epsilon", "0.1", "--check-norm", "--wigner", "0.5,0.25"]),
    ("simulate_fock1.json", &["simulate", "--state", "fock:1", "--noise", "0.5,0.5", "--samples", "5000", "--seed", "42", "--witness", "fd:-12,26"]),
    ("simulate_record_fock0.json", &[
        "simulate-record", "--state", "fock:0", "--t0", "6.283185307179586", "--dt", "0.06283185307179586",
        "--s0", "0.01", "--noise", "1,1", "--samples", "2000", "--seed", "7", "--witness", "fb:0",
    ]),
];

fn render(args: &[&str]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("wigneg").chain(args.iter().copied()), &mut out, &mut err);
    assert_eq!(code, EXIT_OK, "{args:?}: {}", String::from_utf8_lossy(&err));
    out
}

#[test]
fn golden_outputs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("WIGNEG_UPDATE_GOLDEN").is_some();
    for (name, args) in CASES {
        let got = render(args);
        assert_eq!(got, render(args), "{name} differs between runs");
        let path = dir.join(name);
        if update {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert!(got == want, "{name} changed; rerun with WIGNEG_UPDATE_GOLDEN=1 if intended");
    }
}
