fn main() {
    std::process::exit(nil3::cli::run(std::env::args_os()));
}
