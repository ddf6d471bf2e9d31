fn main() {
    std::process::exit(smoothrig_cli::dispatch(std::env::args_os()));
}
