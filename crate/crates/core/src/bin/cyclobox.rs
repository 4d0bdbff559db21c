fn main() {
    std::process::exit(cyclobox::cli::run());
}
