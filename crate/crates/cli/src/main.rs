fn main() {
    let code = wigner_negativity_cli::run(std::env::args_os());
    std::process::exit(code);
}
