fn main() {
    std::process::exit(certdec::cli::main_with_args(std::env::args_os()));
}
