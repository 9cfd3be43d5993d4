fn main() {
    std::process::exit(sl2walk::cli::cli_main(std::env::args_os()));
}
