fn main() {
    std::process::exit(kinesim::interface::cli_main(std::env::args_os()));
}
