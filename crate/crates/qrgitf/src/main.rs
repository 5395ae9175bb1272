fn main() {
    std::process::exit(qrgitf::cli::run(std::env::args_os()));
}
