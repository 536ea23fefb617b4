fn main() {
    std::process::exit(slicecal::cli::run(std::env::args_os()));
}
