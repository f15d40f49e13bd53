fn main() {
    std::process::exit(gatefid::cli::run(std::env::args_os()));
}
