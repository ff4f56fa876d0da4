fn main() {
    std::process::exit(nls2d::cli::main(std::env::args_os()));
}
