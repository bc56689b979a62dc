fn main() {
    std::process::exit(skinheom::cli::main_with(std::env::args()));
}
