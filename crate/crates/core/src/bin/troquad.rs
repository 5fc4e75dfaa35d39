fn main() {
    std::process::exit(troquad::cli::main());
}
