fn main() {
    std::process::exit(ffc_cli::main_with(std::env::args_os()));
}
