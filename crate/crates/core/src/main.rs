fn main() {
    std::process::exit(xhail_lite::cli::run(std::env::args_os()));
}
