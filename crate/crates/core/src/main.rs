fn main() {
    std::process::exit(trdeg::cli::main());
}
