fn main() {
    std::process::exit(clustrank::cli::run(std::env::args_os()));
}
