fn main() {
    std::process::exit(shadowvc_cli::run(std::env::args_os()));
}
