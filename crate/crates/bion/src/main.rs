fn main() {
    std::process::exit(bion::cli::run(std::env::args_os()));
}
