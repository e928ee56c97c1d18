fn main() {
    std::process::exit(technometrics::cli::main_with_env());
}
