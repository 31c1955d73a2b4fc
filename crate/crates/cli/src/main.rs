fn main() {
    std::process::exit(cayley_srg_cli::run(std::env::args_os()));
}
