fn main() {
    std::process::exit(gis_core::cli::run(std::env::args_os()));
}
