fn main() {
    std::process::exit(dibmap_cli::run(std::env::args_os()));
}
