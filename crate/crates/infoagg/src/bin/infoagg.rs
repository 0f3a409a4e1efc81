fn main() {
    std::process::exit(infoagg::cli::run(std::env::args_os()));
}
