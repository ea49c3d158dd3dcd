fn main() {
    std::process::exit(hjnet_cli::run());
}
