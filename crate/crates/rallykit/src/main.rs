fn main() {
    std::process::exit(rallykit::cli::run(std::env::args_os()).code());
}
