fn main() {
    std::process::exit(ringbumps::cli::main_with_args(std::env::args_os()));
}
