fn main() {
    std::process::exit(smallball_cli::run(std::env::args_os()));
}
