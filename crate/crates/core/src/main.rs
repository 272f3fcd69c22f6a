fn main() {
    std::process::exit(tunnelsim::cli::main(std::env::args_os()));
}
