fn main() {
    std::process::exit(manifuse::cli::run(std::env::args_os()));
}
