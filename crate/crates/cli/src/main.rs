fn main() {
    std::process::exit(stereoar_cli::run(std::env::args_os()));
}
