fn main() {
    std::process::exit(dirac_qca_cli::run(std::env::args_os()));
}
