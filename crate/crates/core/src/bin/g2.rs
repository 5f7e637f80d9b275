fn main() {
    std::process::exit(g2_coherence::cli::run(std::env::args_os()));
}
