fn main() {
    std::process::exit(figcap::cli::run())
}
