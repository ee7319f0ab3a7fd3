fn main() {
    std::process::exit(qom_sense::cli::run(std::env::args_os()));
}
