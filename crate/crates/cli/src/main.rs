fn main() {
    std::process::exit(rigidity_cli::run(std::env::args_os()));
}
