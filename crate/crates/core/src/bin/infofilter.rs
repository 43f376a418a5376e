fn main() {
    std::process::exit(infofilter::cli::main_with_args(std::env::args_os()));
}
