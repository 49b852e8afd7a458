fn main() {
    std::process::exit(difs_cli::run(std::env::args_os()));
}
