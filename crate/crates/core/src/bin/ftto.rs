fn main() {
    std::process::exit(ftto::cli::run(std::env::args_os()));
}
