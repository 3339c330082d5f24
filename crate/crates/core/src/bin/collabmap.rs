fn main() {
    std::process::exit(collabmap::cli::run(std::env::args_os()));
}
