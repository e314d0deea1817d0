fn main() {
    std::process::exit(cadvote_cli::run(std::env::args_os()));
}
