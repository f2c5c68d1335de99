fn main() {
    std::process::exit(bikegeo_cli::args::run(std::env::args_os()));
}
