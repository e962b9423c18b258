fn main() {
    std::process::exit(qsg_cli::run(std::env::args().collect()));
}
