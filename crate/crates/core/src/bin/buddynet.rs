fn main() {
    std::process::exit(buddynet::cli::run(std::env::args_os()));
}
