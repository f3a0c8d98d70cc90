fn main() {
    std::process::exit(syllogistic::cli::run(std::env::args_os()));
}
