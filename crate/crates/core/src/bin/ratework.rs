fn main() {
    std::process::exit(ratework::cli::run(std::env::args_os()));
}
