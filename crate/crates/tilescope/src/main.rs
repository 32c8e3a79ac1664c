fn main() {
    std::process::exit(tilescope::run(std::env::args_os()));
}
