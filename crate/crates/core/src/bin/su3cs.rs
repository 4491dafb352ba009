fn main() {
    std::process::exit(su3cs::cli::run(std::env::args_os()));
}
