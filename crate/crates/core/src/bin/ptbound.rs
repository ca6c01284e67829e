fn main() {
    std::process::exit(ptbound::cli::main_with_args(std::env::args_os()));
}
