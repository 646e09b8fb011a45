fn main() {
    std::process::exit(worstcase::cli::run(std::env::args_os()));
}
