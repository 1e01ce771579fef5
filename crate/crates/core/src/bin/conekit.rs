fn main() {
    std::process::exit(conekit::cli::run_cli(std::env::args_os()));
}
