fn main() {
    std::process::exit(proxdist_cli::run(std::env::args_os()));
}
