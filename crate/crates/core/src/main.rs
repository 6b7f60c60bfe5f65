fn main() {
    std::process::exit(baxter_tq::cli::run(std::env::args_os()));
}
