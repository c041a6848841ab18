fn main() {
    std::process::exit(szegolab::run_cli());
}
