fn main() {
    std::process::exit(ptsym::cli::run(std::env::args_os()));
}
