fn main() {
    std::process::exit(dirout::cli::run(std::env::args_os()));
}
