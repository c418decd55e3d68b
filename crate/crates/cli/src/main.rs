fn main() {
    std::process::exit(scalarspec_cli::run(std::env::args_os()));
}
