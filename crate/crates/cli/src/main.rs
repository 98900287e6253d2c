fn main() {
    std::process::exit(mixed_milnor_cli::run(std::env::args_os()));
}
