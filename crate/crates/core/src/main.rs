fn main() {
    std::process::exit(baker_otoc::cli::run(std::env::args_os()));
}
