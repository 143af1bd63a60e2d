fn main() {
    std::process::exit(moead_aawa::bench::cli::main_entry());
}
