fn main() {
    std::process::exit(carroll::cli::main());
}
