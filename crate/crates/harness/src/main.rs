fn main() {
    std::process::exit(lossylab::cli::main(std::env::args_os()));
}
