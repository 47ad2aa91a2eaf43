fn main() {
    std::process::exit(fracbdi_cli::run(std::env::args_os()));
}
