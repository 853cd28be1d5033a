fn main() {
    std::process::exit(singbound::cli::run(std::env::args_os()));
}
