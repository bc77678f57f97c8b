fn main() {
    std::process::exit(tmc_forge::cli::main_from(std::env::args()));
}
