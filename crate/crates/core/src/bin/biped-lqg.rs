fn main() {
    std::process::exit(biped_lqg::cli::run_from(std::env::args_os()));
}
