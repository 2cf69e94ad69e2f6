fn main() {
    std::process::exit(chrestenson::cli::run(std::env::args_os()));
}
