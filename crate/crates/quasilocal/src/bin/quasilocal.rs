fn main() {
    std::process::exit(quasilocal::cli::run(std::env::args_os()));
}
