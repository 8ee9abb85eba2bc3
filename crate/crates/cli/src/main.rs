fn main() {
    std::process::exit(rzeta_cli::run(std::env::args_os()));
}
