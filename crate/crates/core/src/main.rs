fn main() {
    std::process::exit(spectral_growth::cli::run(std::env::args_os()));
}
