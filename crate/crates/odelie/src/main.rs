fn main() {
    std::process::exit(odelie::cli::run());
}
