fn main() {
    std::process::exit(sumzeta_cli::run(std::env::args_os()));
}
