fn main() {
    std::process::exit(hml::cli::main_with_args(std::env::args_os()));
}
