fn main() {
    std::process::exit(attnpath::cli::run(std::env::args_os()));
}
