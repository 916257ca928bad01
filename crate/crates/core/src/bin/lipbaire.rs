fn main() {
    std::process::exit(lipschitz_baire::cli::run(std::env::args_os()));
}
