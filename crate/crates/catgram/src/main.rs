fn main() {
    std::process::exit(catgram::cli::run());
}
