fn main() {
    std::process::exit(plcert_cli::run(std::env::args_os()));
}
