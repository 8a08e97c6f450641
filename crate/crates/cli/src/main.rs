fn main() {
    std::process::exit(sigver_cli::run(std::env::args_os()));
}
