fn main() {
    std::process::exit(shellwave_cli::run(std::env::args_os()));
}
