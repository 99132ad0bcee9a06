fn main() {
    std::process::exit(regge::cli::main_entry(std::env::args_os()));
}
