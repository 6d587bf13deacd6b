fn main() {
    std::process::exit(qadic_cli::run(std::env::args_os()));
}
