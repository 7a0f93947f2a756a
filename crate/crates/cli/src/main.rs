fn main() {
    std::process::exit(kpp_halfline_cli::run(std::env::args_os()));
}
