fn main() {
    std::process::exit(instrank_cli::run(std::env::args_os()));
}
