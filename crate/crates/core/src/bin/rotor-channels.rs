fn main() {
    std::process::exit(rotor_channels::harness::cli::run(std::env::args_os()));
}
