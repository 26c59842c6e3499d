fn main() {
    std::process::exit(dcm_lab::cli::main_from(std::env::args_os()));
}
