fn main() {
    std::process::exit(cellplan_cli::run(std::env::args_os()));
}
